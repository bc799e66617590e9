use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willmore_core::elliptic::{
    f_grid_minimum, f_of_k, family_willmore_energy, solve_two_e_equals_f, EllipticModulus,
    EnergyFamilyParams,
};
use willmore_core::fmt::format_g;
use willmore_core::mesh::write_grid_obj;
use willmore_core::mkdv::{
    default_dt, evolve, ConservationReport, FlowState, SpinorState, Stepper,
};
use willmore_core::revolution::{
    build_revolution_mesh, floquet_density, integrate_spinor, monodromy, torus_closure_test,
    willmore_energy, willmore_energy_routes, ClosureVerdict, Monodromy, MonodromyClass,
    SpinorTrajectory, DEFAULT_NY, GEOMETRIC_LAMBDA, MAX_CLOSURE_PERIODS,
};
use willmore_core::spectral::SpectralGrid;
use willmore_core::weierstrass::{
    clifford_fixture_2d, closedness_residual, dirac_residual, induced_geometry, integrate_patch,
    minimal_fixture, willmore_density_integrals, Rect, SpinorField2D, SurfacePatch,
};
use willmore_core::willmore::{
    bound_sweep, case_split_check, clifford_fixture, clifford_r, clifford_s, delta0,
    euler_lagrange_residual, schrodinger_residual, stationary_profile, write_sweep_csv, Branch,
    QuarticCoeffs, DEFAULT_PROFILE_N,
};
use willmore_core::{Error, Parity, PeriodicProfile};

use crate::config::display;
use crate::{g, Checks, Failure, RunConfig};

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    let file = File::create(path)
        .with_context(|| format!("creating {}", display(path)))
        .map_err(Failure::Io)?;
    Ok(BufWriter::new(file))
}

fn finish_file(mut w: BufWriter<File>, path: &Path) -> Result<(), Failure> {
    w.flush()
        .with_context(|| format!("writing {}", display(path)))
        .map_err(Failure::Io)
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(anyhow::Error::new(e).context(format!("writing {}", display(path))))
}

fn monodromy_line(m: &Monodromy) -> String {
    let class = match m.class {
        MonodromyClass::Identity => "identity".to_string(),
        MonodromyClass::MinusIdentity => "minus identity".to_string(),
        MonodromyClass::EllipticRotation { angle } => {
            format!("elliptic, rotation angle {}", g(angle))
        }
        MonodromyClass::Hyperbolic { .. } => "hyperbolic".to_string(),
        MonodromyClass::Parabolic { sign } => format!("parabolic, multiplier {sign}"),
    };
    format!(
        "monodromy: {class} (trace {}, det {})",
        g(m.trace()),
        g(m.det())
    )
}

// ---------------------------------------------------------------------------
// clifford

struct Residuals {
    el: f64,
    a_var: f64,
    res_422: f64,
    schrodinger: f64,
    excluded: usize,
}

fn clifford_residuals(n: usize, p_floor: f64) -> Result<Residuals, Failure> {
    let fx = clifford_fixture(n)?;
    let el = euler_lagrange_residual(&fx.p, &fx.u)?;
    let sch = schrodinger_residual(&fx.p, &fx.u, p_floor)?;
    Ok(Residuals {
        el: el.res_el,
        a_var: el.a_var,
        res_422: el.res_422,
        schrodinger: sch.residual,
        excluded: sch.excluded,
    })
}

pub fn clifford(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let n = cfg.grid(256)?;
    let ny = cfg.ny_or(DEFAULT_NY)?;
    let p_floor = RunConfig::positive(cfg.p_floor.unwrap_or(0.05), "p-floor")?;
    let mesh_out = cfg
        .out_mesh
        .as_deref()
        .map(|p| create(p).map(|w| (w, p)))
        .transpose()?;
    let csv_out = cfg
        .out_csv
        .as_deref()
        .map(|p| create(p).map(|w| (w, p)))
        .transpose()?;
    let fx = clifford_fixture(n)?;
    let mut checks = Checks::new(cfg.tol_scale);

    let w = willmore_energy(&fx.p, 1);
    writeln!(out, "W = {}", format_g(w, 15))?;
    writeln!(out, "2pi^2 = {}", format_g(TWO_PI_SQ, 15))?;
    checks.at_most(out, "W - 2pi^2", w - TWO_PI_SQ, 1e-9)?;

    let quartic = QuarticCoeffs::clifford();
    let px = fx.p.derivative(1);
    let quartic_pointwise: Vec<f64> =
        fx.p.samples()
            .iter()
            .zip(px.samples())
            .map(|(&p, &d)| d * d - quartic.q(p))
            .collect();
    let quartic_res = quartic_pointwise
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    checks.at_most(out, "quartic residual", quartic_res, 1e-9)?;

    let v = fx.v();
    let m = monodromy(&v, GEOMETRIC_LAMBDA)?;
    writeln!(out, "{}", monodromy_line(&m))?;
    let traj = integrate_spinor(&v, GEOMETRIC_LAMBDA, clifford_r(0.0), clifford_s(0.0), 1)?;
    writeln!(out, "closure integral = {}", g(traj.closure_integral()))?;
    let closure = torus_closure_test(&traj, None)?;
    checks.holds(out, "torus closure", closure == ClosureVerdict::Torus)?;

    let coarse = clifford_residuals(n, p_floor)?;
    let fine = clifford_residuals(2 * n, p_floor)?;
    writeln!(
        out,
        "schrodinger exclusion: {} of {} nodes with |p| < {}",
        coarse.excluded,
        n,
        g(p_floor)
    )?;
    writeln!(out, "order check (N = {n} vs {}):", 2 * n)?;
    for (name, c, f) in [
        ("euler-lagrange residual", coarse.el, fine.el),
        ("constant-a deviation", coarse.a_var, fine.a_var),
        ("reduced residual", coarse.res_422, fine.res_422),
        ("schrodinger residual", coarse.schrodinger, fine.schrodinger),
    ] {
        writeln!(out, "  {name}: {} -> {}", g(c), g(f))?;
        checks.near(out, &format!("{name} ratio"), c / f, 4.0, 0.5)?;
    }

    let split = case_split_check();
    let s = split.solutions[0];
    writeln!(
        out,
        "case split: c2 = {}, c1^2 = {}, c0 = {} (printed derivation lists c2 = {})",
        g(s.c2),
        g(s.c1 * s.c1),
        g(s.c0),
        g(split.printed_c2)
    )?;
    for note in &split.notes {
        writeln!(out, "  note: {note}")?;
    }
    checks.at_most(
        out,
        "case split distance to Clifford quartic",
        split.clifford_distance,
        1e-12,
    )?;

    if let Some((mut w, path)) = mesh_out {
        let mesh = build_revolution_mesh(&traj, ny)?;
        mesh.write_obj(&mut w).map_err(write_err(path))?;
        finish_file(w, path)?;
        writeln!(
            out,
            "mesh: {} ({} vertices)",
            display(path),
            mesh.vertex_count()
        )?;
    }
    if let Some((mut w, path)) = csv_out {
        let el = euler_lagrange_residual(&fx.p, &fx.u)?;
        let sch = schrodinger_residual(&fx.p, &fx.u, p_floor)?;
        let mut write = || -> std::io::Result<()> {
            writeln!(w, "x,p,u,quartic_residual,el_residual,schrodinger_residual")?;
            for (j, q) in quartic_pointwise.iter().enumerate() {
                let sr = sch.pointwise[j]
                    .map(|x| format_g(x, 17))
                    .unwrap_or_default();
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    format_g(fx.p.x(j), 17),
                    format_g(fx.p.samples()[j], 17),
                    format_g(fx.u.samples()[j], 17),
                    format_g(*q, 17),
                    format_g(el.pointwise[j], 17),
                    sr
                )?;
            }
            Ok(())
        };
        write().map_err(write_err(path))?;
        finish_file(w, path)?;
        writeln!(out, "residuals: {}", display(path))?;
    }
    checks.finish(out)
}

// ---------------------------------------------------------------------------
// flow

fn read_profile_csv(path: &Path, period: f64) -> Result<PeriodicProfile, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", display(path)))
        .map_err(Failure::Io)?;
    let mut samples = vec![];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or("").trim();
        match last.parse::<f64>() {
            Ok(v) => samples.push(v),
            Err(_) if samples.is_empty() => continue,
            Err(_) => {
                return Err(Failure::Invalid(format!(
                    "{} line {}: not a number: `{last}`",
                    display(path),
                    lineno + 1
                )))
            }
        }
    }
    Ok(PeriodicProfile::new(samples, period)?)
}

fn random_profile(n: usize, seed: u64) -> Result<PeriodicProfile, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=4)
        .map(|k| {
            let k = k as f64;
            (rng.gen_range(-1.0..1.0) / k, rng.gen_range(-1.0..1.0) / k)
        })
        .collect();
    Ok(PeriodicProfile::from_fn(n, 2.0 * PI, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let kx = (k + 1) as f64 * x;
                a * kx.cos() + b * kx.sin()
            })
            .sum()
    })?)
}

/// Splits a run into chunks short enough that the translation between
/// consecutive snapshots stays well inside half a period.
const SHIFT_CHUNK_TIME: f64 = 0.25;

pub fn flow(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let n = cfg.grid(512)?;
    let t_final = RunConfig::positive(cfg.t_final.unwrap_or(1.0), "t-final")?;
    let stepper = match cfg.stepper.as_deref().unwrap_or("if") {
        "if" => Stepper::IntegratingFactor,
        "explicit" => Stepper::Explicit,
        other => {
            return Err(Failure::Invalid(format!(
                "--stepper must be `if` or `explicit`, got `{other}`"
            )))
        }
    };
    let initial = cfg
        .initial
        .clone()
        .unwrap_or_else(|| "clifford".to_string());
    let state = match initial.as_str() {
        "clifford" => {
            let fx = clifford_fixture(n)?;
            let state = FlowState::new(fx.v(), 1);
            if cfg.no_spinor {
                state
            } else {
                state.with_spinor(SpinorState {
                    r: fx.r.samples().to_vec(),
                    s: fx.s.samples().to_vec(),
                    lambda: GEOMETRIC_LAMBDA,
                    parity: Parity::Antiperiodic,
                })
            }
        }
        "zero" => FlowState::new(PeriodicProfile::zeros(n, 2.0 * PI)?, 1),
        "random" => FlowState::new(random_profile(n, cfg.seed)?, 1),
        path => {
            let period = RunConfig::positive(cfg.period.unwrap_or(2.0 * PI), "period")?;
            FlowState::new(read_profile_csv(Path::new(path), period)?, 1)
        }
    };
    let csv = cfg
        .out_csv
        .as_deref()
        .map(|p| create(p).map(|w| (w, p)))
        .transpose()?;

    let v0 = state.v.clone();
    let suggested = default_dt(&v0, 1, stepper);
    let dt_req = RunConfig::positive(cfg.dt.unwrap_or(suggested), "dt")?;
    let steps = (t_final / dt_req).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    writeln!(
        out,
        "initial = {initial}, N = {}, period = {}",
        v0.len(),
        g(v0.period())
    )?;
    writeln!(
        out,
        "dt = {} ({steps} steps, suggested {})",
        g(dt),
        g(suggested)
    )?;
    let rs_scale = state.spinor.as_ref().map(|sp| {
        v0.step()
            * sp.r
                .iter()
                .zip(&sp.s)
                .map(|(a, b)| (a * b).abs())
                .sum::<f64>()
    });

    let grid = SpectralGrid::new(v0.len(), v0.period());
    let chunk = ((SHIFT_CHUNK_TIME / dt).floor() as usize).max(1);
    let mut state = state;
    let mut report = ConservationReport::default();
    let mut shift = 0.0;
    let mut done = 0;
    while done < steps {
        let k = chunk.min(steps - done);
        let before = state.v.clone();
        let (next, rep) = evolve(state, dt, k, stepper).map_err(|e| match e {
            Error::Instability { .. } => Failure::Instability(format!(
                "{e}; dt = {} exceeds the stable range (suggested dt = {})",
                g(dt),
                g(suggested)
            )),
            e => e.into(),
        })?;
        let skip = usize::from(done > 0);
        report.samples.extend(rep.samples.into_iter().skip(skip));
        if before.max_abs() > 0.0 {
            shift += grid.best_shift(before.samples(), next.v.samples());
        }
        state = next;
        done += k;
    }

    let mut checks = Checks::new(cfg.tol_scale);
    let w0 = report.samples[0].w;
    writeln!(
        out,
        "W(0) = {}, W(t) = {}",
        format_g(w0, 15),
        format_g(report.samples.last().map_or(w0, |s| s.w), 15)
    )?;
    checks.at_most(out, "max relative W drift", report.w_drift(), 1e-6)?;
    if let (Some(drift), Some(scale)) = (report.closure_drift(), rs_scale) {
        checks.at_most(
            out,
            "max relative closure drift",
            drift / scale.max(f64::MIN_POSITIVE),
            1e-6,
        )?;
    }
    if let Some(d) = report.max_dirac_residual() {
        checks.at_most(out, "max dirac residual", d, 1e-5)?;
    }
    if v0.max_abs() > 0.0 {
        let velocity = shift / t_final;
        writeln!(
            out,
            "translation velocity = {} (speed {})",
            g(velocity),
            g(velocity.abs())
        )?;
    } else {
        writeln!(out, "translation velocity = 0 (zero datum)")?;
    }
    if let Some((mut w, path)) = csv {
        report.write_csv(&mut w).map_err(write_err(path))?;
        finish_file(w, path)?;
        writeln!(out, "conservation: {}", display(path))?;
    }
    checks.finish(out)
}

// ---------------------------------------------------------------------------
// bound-scan

/// Points of the `f(k)` scan on `(1/√2, 1]`.
const F_GRID: usize = 10_000;

pub fn bound_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let a_min = RunConfig::positive(cfg.alpha_min.unwrap_or(1e-3), "alpha-min")?;
    let a_max = RunConfig::positive(cfg.alpha_max.unwrap_or(1e2), "alpha-max")?;
    let count = cfg.alpha_count.unwrap_or(20);
    if a_max < a_min || count == 0 {
        return Err(Failure::Invalid(format!(
            "empty alpha range [{a_min}, {a_max}] x {count}"
        )));
    }
    let n = cfg.grid(DEFAULT_PROFILE_N)?;
    let csv = cfg
        .out_csv
        .as_deref()
        .map(|p| create(p).map(|w| (w, p)))
        .transpose()?;
    let mut checks = Checks::new(cfg.tol_scale);

    let rows = bound_sweep(a_min, a_max, count, n)?;
    writeln!(out, "alpha, k^2, W (elliptic), W (quadrature)")?;
    let mut worst = 0.0_f64;
    for r in &rows {
        writeln!(
            out,
            "  {}, {}, {}, {}",
            g(r.alpha),
            g(r.ksq),
            g(r.w_elliptic),
            g(r.w_quadrature)
        )?;
        worst = worst.max(r.relative_disagreement());
    }
    checks.at_most(out, "max relative disagreement of W routes", worst, 1e-6)?;

    let (f_min, argmin) = f_grid_minimum(F_GRID)?;
    writeln!(
        out,
        "min f over {F_GRID} points = {} at k^2 = {}",
        format_g(f_min, 12),
        format_g(argmin.ksq(), 12)
    )?;
    writeln!(out, "pi/4 = {}", format_g(PI / 4.0, 12))?;
    checks.holds(out, "min f > pi/4", f_min > PI / 4.0)?;
    let root = solve_two_e_equals_f();
    writeln!(out, "root of 2E = F: k^2 = {}", format_g(root.ksq(), 12))?;
    writeln!(out, "f at root = {}", format_g(f_of_k(root)?, 12))?;
    let f1 = f_of_k(EllipticModulus::new(1.0)?)?;
    writeln!(out, "f(1) = {}", format_g(f1, 12))?;
    checks.at_most(out, "f(1) - 1", f1 - 1.0, 1e-9)?;

    match rows.iter().find(|r| !r.exceeds) {
        None => writeln!(
            out,
            "verdict: W > 2pi^2 for all {} scanned alpha",
            rows.len()
        )?,
        Some(r) => writeln!(out, "verdict: bound fails at alpha = {}", g(r.alpha))?,
    }
    checks.holds(out, "W > 2pi^2 on the scan", rows.iter().all(|r| r.exceeds))?;

    if let Some((mut w, path)) = csv {
        write_sweep_csv(&rows, &mut w).map_err(write_err(path))?;
        finish_file(w, path)?;
        writeln!(out, "sweep: {}", display(path))?;
    }
    checks.finish(out)
}

// ---------------------------------------------------------------------------
// revolve

/// A real initial spinor that returns to `±` itself after `q` periods.
fn closing_spinor(m: &Monodromy) -> Option<([f64; 2], usize)> {
    let candidates: Vec<[f64; 2]> = match m.class {
        MonodromyClass::Hyperbolic { .. } => vec![],
        MonodromyClass::Parabolic { sign } => {
            let a = [m.m[0][1], sign - m.m[0][0]];
            let b = [sign - m.m[1][1], m.m[1][0]];
            vec![if a[0].hypot(a[1]) >= b[0].hypot(b[1]) {
                a
            } else {
                b
            }]
        }
        _ => vec![[1.0, 0.0]],
    };
    candidates
        .into_iter()
        .find_map(|eta| m.closing_periods(eta, 1e-7).map(|(q, _)| (eta, q)))
}

pub fn revolve(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let alpha = cfg
        .alpha
        .ok_or_else(|| Failure::Invalid("revolve needs --alpha".into()))?;
    let n = cfg.grid(512)?;
    let ny = cfg.ny_or(DEFAULT_NY)?;
    let coeffs = QuarticCoeffs::alpha_family(alpha);
    let prof = stationary_profile(coeffs, n).map_err(|e| match e {
        Error::NoOscillation => Failure::Invalid(format!(
            "alpha = {alpha}: the quartic p_x^2 = -4p^4 + p^2 + alpha has no positive bump, so no periodic profile exists"
        )),
        e => e.into(),
    })?;
    let mut checks = Checks::new(cfg.tol_scale);
    let branch = match prof.branch {
        Branch::SignDefinite => "sign-definite",
        Branch::SignChanging => "sign-changing",
    };
    writeln!(out, "alpha = {}", g(alpha))?;
    writeln!(
        out,
        "profile: {branch}, period = {}, p in [{}, {}]",
        g(prof.period()),
        g(prof.p_min),
        g(prof.p_max)
    )?;
    checks.at_most(out, "profile ODE residual", prof.ode_residual(), 1e-6)?;

    let v = prof.p.scale(4.0);
    let m = monodromy(&v, GEOMETRIC_LAMBDA)?;
    writeln!(out, "{}", monodromy_line(&m))?;

    let mut torus: Option<SpinorTrajectory> = None;
    let closed = match closing_spinor(&m) {
        Some((eta, q)) => {
            let traj = integrate_spinor(&v, GEOMETRIC_LAMBDA, eta[0], eta[1], q)?;
            writeln!(
                out,
                "periodic spinor after {q} period(s); closure integral = {}",
                g(traj.closure_integral())
            )?;
            match torus_closure_test(&traj, None)? {
                ClosureVerdict::Torus => {
                    writeln!(out, "closure: torus")?;
                    torus = Some(traj.clone());
                }
                ClosureVerdict::Cylinder { pitch } => {
                    writeln!(out, "closure: cylinder, pitch {}", g(pitch))?
                }
            }
            Some(traj)
        }
        None => {
            writeln!(
                out,
                "no real spinor closes within {MAX_CLOSURE_PERIODS} periods"
            )?;
            None
        }
    };

    if prof.branch == Branch::SignDefinite {
        let u = match (&closed, m.class) {
            (Some(traj), _) => traj.u_profile()?,
            (None, MonodromyClass::EllipticRotation { .. }) => {
                floquet_density(&v, GEOMETRIC_LAMBDA)?.u
            }
            (None, _) => {
                return Err(Failure::Invalid(
                    "no positive spinor density for delta0".into(),
                ))
            }
        };
        let d = delta0(&prof, &u)?;
        writeln!(
            out,
            "delta0 = {} (direct), {} (by parts), {} (closed form)",
            format_g(d.direct, 12),
            format_g(d.parts, 12),
            format_g(d.closed, 12)
        )?;
        checks.at_most(
            out,
            "delta0 route disagreement",
            d.max_relative_disagreement(),
            1e-8,
        )?;
        let nonzero = d.direct.abs() > cfg.tol(1e-8) * u.integral();
        if nonzero
            && d.direct.signum() == d.parts.signum()
            && d.direct.signum() == d.closed.signum()
        {
            writeln!(
                out,
                "verdict: no torus (delta0 {} 0)",
                if d.direct > 0.0 { ">" } else { "<" }
            )?;
        } else {
            writeln!(out, "verdict: delta0 vanishes; closure not excluded")?;
        }
    } else if torus.is_none() {
        writeln!(
            out,
            "verdict: closure not established (no periodic spinor at lambda = -1)"
        )?;
    } else {
        writeln!(out, "verdict: torus")?;
    }

    let (wp, wv) = willmore_energy_routes(&prof.p, 1);
    writeln!(
        out,
        "W = {} (8pi int p^2), {} ((pi/2) int v^2)",
        format_g(wp, 12),
        format_g(wv, 12)
    )?;
    checks.at_most(
        out,
        "relative disagreement of W quadratures",
        (wp - wv) / wp,
        1e-12,
    )?;
    if alpha >= 0.0 {
        let we = family_willmore_energy(&EnergyFamilyParams::new(alpha)?)?;
        writeln!(out, "W = {} (elliptic closed form)", format_g(we, 12))?;
        checks.at_most(
            out,
            "relative disagreement of W routes",
            (we - wp) / we,
            1e-6,
        )?;
        writeln!(out, "W - 2pi^2 = {}", g(we - TWO_PI_SQ))?;
        checks.holds(out, "W > 2pi^2", we > TWO_PI_SQ && wp > TWO_PI_SQ)?;
    }

    match (&cfg.out_mesh, &torus) {
        (Some(path), Some(traj)) => {
            let mesh = build_revolution_mesh(traj, ny)?;
            let mut w = create(path)?;
            mesh.write_obj(&mut w).map_err(write_err(path))?;
            finish_file(w, path)?;
            writeln!(
                out,
                "mesh: {} ({} vertices)",
                display(path),
                mesh.vertex_count()
            )?;
        }
        (Some(path), None) => writeln!(
            out,
            "mesh: not written to {} (surface does not close)",
            display(path)
        )?,
        _ => {}
    }
    checks.finish(out)
}

// ---------------------------------------------------------------------------
// mesh

fn seam_gap(patch: &SurfacePatch) -> f64 {
    let dist = |a: [f64; 3], b: [f64; 3]| {
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    };
    let (nx, ny) = (patch.nx, patch.ny);
    let rows = (0..nx).map(|i| dist(patch.point(i, 0), patch.point(i, ny - 1)));
    let cols = (0..ny).map(|j| dist(patch.point(0, j), patch.point(nx - 1, j)));
    rows.chain(cols).fold(0.0, f64::max)
}

fn patch_vertices(patch: &SurfacePatch, nx: usize, ny: usize) -> Vec<[f64; 3]> {
    (0..nx)
        .flat_map(|i| (0..ny).map(move |j| patch.point(i, j)))
        .collect()
}

pub fn mesh(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), Failure> {
    let fixture = cfg
        .fixture
        .clone()
        .unwrap_or_else(|| "clifford".to_string());
    let n = cfg.n.unwrap_or(128);
    let ny = cfg.ny.unwrap_or(64);
    if n < 4 || ny < 4 {
        return Err(Failure::Invalid(format!(
            "mesh needs --n and --ny of at least 4, got {n} x {ny}"
        )));
    }
    let mut checks = Checks::new(cfg.tol_scale);
    let (field, wrap): (SpinorField2D, bool) = match fixture.as_str() {
        "clifford" => (
            clifford_fixture_2d(Rect::new(0.0, 2.0 * PI, 0.0, 2.0 * PI)?, n + 1, ny + 1)?,
            true,
        ),
        "minimal" => (
            minimal_fixture(Rect::new(-1.0, 1.0, -1.0, 1.0)?, n, ny)?,
            false,
        ),
        other => {
            return Err(Failure::Invalid(format!(
                "--fixture must be `clifford` or `minimal`, got `{other}`"
            )))
        }
    };
    let h2 = field.hx().max(field.hy()).powi(2);
    writeln!(
        out,
        "fixture = {fixture}, grid {} x {}",
        field.nx(),
        field.ny()
    )?;
    let dirac = dirac_residual(&field);
    let closed = closedness_residual(&field);
    checks.at_most(out, "dirac residual / h^2", dirac / h2, 10.0)?;
    checks.at_most(out, "closedness residual / h^2", closed / h2, 10.0)?;
    let base = if wrap {
        (0, 0)
    } else {
        (field.nx() / 2, field.ny() / 2)
    };
    let patch = integrate_patch(&field, base, cfg.tol(10.0 * h2))?;
    let patch = induced_geometry(&field, patch)?;
    checks.at_most(
        out,
        "path independence defect / h^2",
        patch.path_independence_defect / h2,
        10.0,
    )?;
    let (wp, wh) = willmore_density_integrals(&field, &patch);
    writeln!(
        out,
        "W over the patch = {} (p^2 density), {} (H^2 dA)",
        format_g(wp, 12),
        format_g(wh, 12)
    )?;
    if wrap {
        let gap = seam_gap(&patch);
        checks.at_most(out, "seam gap / h^2", gap / h2, 10.0)?;
        checks.at_most(
            out,
            "relative W - 2pi^2",
            (wp - TWO_PI_SQ) / TWO_PI_SQ,
            1e-9,
        )?;
    } else {
        let hmax = patch
            .mean_curvature
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        checks.at_most(out, "max |H|", hmax, 1e-12)?;
    }
    if let Some(path) = &cfg.out_mesh {
        // the periodic grid repeats its first row and column; drop them
        let vertices = patch_vertices(&patch, n, ny);
        let mut w = create(path)?;
        write_grid_obj(&mut w, n, ny, &vertices, wrap).map_err(write_err(path))?;
        finish_file(w, path)?;
        writeln!(out, "mesh: {} ({} vertices)", display(path), vertices.len())?;
    }
    checks.finish(out)
}
