//! The mKdV hierarchy `v_t = Dⁿ v_x` with recursion operator
//! `D = ∂² + v² + v_x ∂⁻¹ v`, its spinor deformation at `n = 1`, and the
//! conserved quantities `W = (π/2) ∫ v²` and `∫ r s`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmt::format_g;
use crate::quadrature::neumaier_sum;
use crate::spectral::{Parity, PeriodicProfile, SpectralGrid, MEAN_TOL};

/// Growth factor of `max|v|` that aborts an evolution.
pub const BLOW_UP_FACTOR: f64 = 10.0;
/// Safety factor on `Δx³` for plain explicit RK4 (the stability limit is
/// about `0.09 Δx³`).
pub const EXPLICIT_DT_FACTOR: f64 = 0.05;

fn mean_gate(f: &[f64]) -> Result<()> {
    let scale = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mean = neumaier_sum(f.iter().copied()) / f.len() as f64;
    if mean.abs() > MEAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonExactDerivative { mean, scale });
    }
    Ok(())
}

/// Zero-mean periodic antiderivative; fails unless `f` has zero mean
/// relative to its size.
pub fn antiderivative_periodic(f: &PeriodicProfile) -> Result<PeriodicProfile> {
    f.antiderivative()
}

fn check_same_grid(a: &PeriodicProfile, b: &PeriodicProfile) -> Result<()> {
    if a.len() != b.len() || (a.period() - b.period()).abs() > 1e-12 * a.period() {
        return Err(Error::InvalidProfile("profiles must share one grid".into()));
    }
    Ok(())
}

struct Ops {
    grid: SpectralGrid,
}

impl Ops {
    fn new(n: usize, period: f64) -> Self {
        Self {
            grid: SpectralGrid::new(n, period),
        }
    }

    fn d(&self, f: &[f64], order: u32) -> Vec<f64> {
        self.grid.derivative(f, order)
    }

    fn inv(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.grid.antiderivative(f)
    }

    /// `g_xx + v² g + v_x ∂⁻¹(v g)`; `first` supplies `∂⁻¹(v g)` directly.
    fn apply_d(
        &self,
        v: &[f64],
        vx: &[f64],
        g: &[f64],
        first: Option<Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let gxx = self.d(g, 2);
        let inner = match first {
            Some(w) => w,
            None => self.inv(&v.iter().zip(g).map(|(a, b)| a * b).collect::<Vec<_>>())?,
        };
        Ok((0..g.len())
            .map(|j| gxx[j] + v[j] * v[j] * g[j] + vx[j] * inner[j])
            .collect())
    }

    /// `Dⁿ v_x`. The first antiderivative `∂⁻¹(v v_x)` is taken as `v²/2`,
    /// deeper ones with zero mean.
    fn rhs(&self, v: &[f64], n: usize) -> Result<Vec<f64>> {
        let vx = self.d(v, 1);
        let mut g = vx.clone();
        for k in 0..n {
            let first = (k == 0).then(|| v.iter().map(|a| 0.5 * a * a).collect());
            g = self.apply_d(v, &vx, &g, first)?;
        }
        Ok(g)
    }
}

/// `D g = g_xx + v² g + v_x ∂⁻¹(v g)` with the zero-mean antiderivative.
pub fn apply_d(v: &PeriodicProfile, g: &PeriodicProfile) -> Result<PeriodicProfile> {
    check_same_grid(v, g)?;
    let ops = Ops::new(v.len(), v.period());
    let vx = ops.d(v.samples(), 1);
    Ok(v.with_samples(ops.apply_d(v.samples(), &vx, g.samples(), None)?))
}

/// `D⁺ g = g_xx + v² g − v ∂⁻¹(v_x g)` with the zero-mean antiderivative.
pub fn apply_d_adjoint(v: &PeriodicProfile, g: &PeriodicProfile) -> Result<PeriodicProfile> {
    check_same_grid(v, g)?;
    let ops = Ops::new(v.len(), v.period());
    let (vs, gs) = (v.samples(), g.samples());
    let vx = ops.d(vs, 1);
    let gxx = ops.d(gs, 2);
    let inner = ops.inv(&vx.iter().zip(gs).map(|(a, b)| a * b).collect::<Vec<_>>())?;
    Ok(v.with_samples(
        (0..gs.len())
            .map(|j| gxx[j] + vs[j] * vs[j] * gs[j] - vs[j] * inner[j])
            .collect(),
    ))
}

/// Right-hand side `Dⁿ v_x` of the `n`-th flow; `n = 1` is
/// `v_t = (3/2) v² v_x + v_xxx`.
///
/// The first `∂⁻¹(v v_x)` is `v²/2` rather than its zero-mean shift, which
/// would add the lower flow `−mean(v²)/2 · v_x`.
pub fn mkdv_rhs(v: &PeriodicProfile, n: usize) -> Result<PeriodicProfile> {
    if n == 0 {
        return Err(Error::Domain("hierarchy index starts at 1".into()));
    }
    let ops = Ops::new(v.len(), v.period());
    Ok(v.with_samples(ops.rhs(v.samples(), n)?))
}

/// Coefficients of the `n = 1` deformation matrix
/// `K₃ = ½ [[A, B], [C, −A]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyCoeffs {
    /// `A₁, A₃`: `A₁ = v²/2`, `A₃ = 1`.
    pub a: Vec<PeriodicProfile>,
    /// `S₁ = v_x`
    pub s: Vec<PeriodicProfile>,
    /// `T₀ = v_xx + v³/2`, `T₂ = v`.
    pub t: Vec<PeriodicProfile>,
}

impl HierarchyCoeffs {
    /// `(A, B, C)` at node `j` for spectral parameter `lambda`.
    pub fn abc(&self, j: usize, lambda: f64) -> (f64, f64, f64) {
        let l2 = lambda * lambda;
        let a = self.a[0].samples()[j] * lambda + self.a[1].samples()[j] * l2 * lambda;
        let even = self.t[0].samples()[j] + self.t[1].samples()[j] * l2;
        let odd = self.s[0].samples()[j] * lambda;
        (a, odd + even, odd - even)
    }
}

fn k3_parts(v: &[f64], vx: &[f64], vxx: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let a1 = v.iter().map(|x| 0.5 * x * x).collect();
    let t0 = (0..v.len()).map(|j| vxx[j] + 0.5 * v[j].powi(3)).collect();
    (a1, vx.to_vec(), t0)
}

/// `K₃` coefficients for `v`.
///
/// Each is an antiderivative of a total derivative (`v v_x`, `D v_x`, `v_x`);
/// the gates confirm the operands have zero mean, and the antiderivatives are
/// then taken in closed form without added constants, which the
/// compatibility with the spinor system requires.
pub fn hierarchy_coeffs(v: &PeriodicProfile) -> Result<HierarchyCoeffs> {
    let ops = Ops::new(v.len(), v.period());
    let vs = v.samples();
    let vx = ops.d(vs, 1);
    let vxx = ops.d(vs, 2);
    mean_gate(&vs.iter().zip(&vx).map(|(a, b)| a * b).collect::<Vec<_>>())?;
    mean_gate(&ops.rhs(vs, 1)?)?;
    mean_gate(&vx)?;
    let (a1, s1, t0) = k3_parts(vs, &vx, &vxx);
    Ok(HierarchyCoeffs {
        a: vec![v.with_samples(a1), v.with_samples(vec![1.0; vs.len()])],
        s: vec![v.with_samples(s1)],
        t: vec![v.with_samples(t0), v.clone()],
    })
}

fn k3_pointwise(v: f64, vx: f64, vxx: f64, lambda: f64, r: f64, s: f64) -> (f64, f64) {
    let l2 = lambda * lambda;
    let a = 0.5 * v * v * lambda + l2 * lambda;
    let even = vxx + 0.5 * v * v * v + v * l2;
    let odd = vx * lambda;
    let (b, c) = (odd + even, odd - even);
    (0.5 * (a * r + b * s), 0.5 * (c * r - a * s))
}

/// Time derivative `(r_t, s_t) = K₃ (r, s)` of a spinor under the mKdV flow.
pub fn k3_apply(
    v: &PeriodicProfile,
    lambda: f64,
    r: &[f64],
    s: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if r.len() != v.len() || s.len() != v.len() {
        return Err(Error::InvalidProfile(
            "spinor and potential sizes differ".into(),
        ));
    }
    let c = hierarchy_coeffs(v)?;
    Ok((0..v.len())
        .map(|j| {
            let (a, b, cc) = c.abc(j, lambda);
            (0.5 * (a * r[j] + b * s[j]), 0.5 * (cc * r[j] - a * s[j]))
        })
        .unzip())
}

/// `J_k = ∫ (D^k v_x)(r² + s²) dx` for `k = 0..=kmax`, with the recursion
/// defects `|J_k − λ² J_{k−1}|`.
#[derive(Debug, Clone, PartialEq)]
pub struct JkReport {
    pub j: Vec<f64>,
    pub recursion_defects: Vec<f64>,
}

pub fn jk_functionals(
    v: &PeriodicProfile,
    lambda: f64,
    r: &[f64],
    s: &[f64],
    kmax: usize,
) -> Result<JkReport> {
    if r.len() != v.len() || s.len() != v.len() {
        return Err(Error::InvalidProfile(
            "spinor and potential sizes differ".into(),
        ));
    }
    let ops = Ops::new(v.len(), v.period());
    let vs = v.samples();
    let u: Vec<f64> = r.iter().zip(s).map(|(a, b)| a * a + b * b).collect();
    let vx = ops.d(vs, 1);
    let mut g = vx.clone();
    let mut j = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        if k > 0 {
            let first = (k == 1).then(|| vs.iter().map(|a| 0.5 * a * a).collect());
            g = ops.apply_d(vs, &vx, &g, first)?;
        }
        j.push(
            v.with_samples(g.iter().zip(&u).map(|(a, b)| a * b).collect())
                .integral(),
        );
    }
    let recursion_defects = (1..j.len())
        .map(|k| (j[k] - lambda * lambda * j[k - 1]).abs())
        .collect();
    Ok(JkReport {
        j,
        recursion_defects,
    })
}

/// Real spinor co-evolved with the `n = 1` flow.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub lambda: f64,
    /// Behaviour of `(r, s)` under a shift by the grid period.
    pub parity: Parity,
}

/// Potential at flow time `t` under the `n`-th flow.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub v: PeriodicProfile,
    pub t: f64,
    pub n: usize,
    pub spinor: Option<SpinorState>,
}

impl FlowState {
    pub fn new(v: PeriodicProfile, n: usize) -> Self {
        Self {
            v,
            t: 0.0,
            n,
            spinor: None,
        }
    }

    pub fn with_spinor(mut self, spinor: SpinorState) -> Self {
        self.spinor = Some(spinor);
        self
    }
}

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stepper {
    /// RK4 on `e^{−Lt} v̂` with `L` the symbol of `∂^{2n+1}`.
    IntegratingFactor,
    /// Classical RK4 on the full right-hand side.
    Explicit,
}

/// One row of a conservation time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationSample {
    pub t: f64,
    pub w: f64,
    pub closure_integral: Option<f64>,
    pub dirac_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConservationReport {
    pub samples: Vec<ConservationSample>,
}

impl ConservationReport {
    /// `max |W(t) − W(0)| / |W(0)|`
    pub fn w_drift(&self) -> f64 {
        let w0 = self.samples[0].w;
        self.samples
            .iter()
            .map(|s| (s.w - w0).abs())
            .fold(0.0, f64::max)
            / w0.abs().max(f64::MIN_POSITIVE)
    }

    /// `max |∫rs(t) − ∫rs(0)|` over the run.
    pub fn closure_drift(&self) -> Option<f64> {
        let c0 = self.samples[0].closure_integral?;
        Some(
            self.samples
                .iter()
                .filter_map(|s| s.closure_integral)
                .map(|c| (c - c0).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn max_dirac_residual(&self) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| s.dirac_residual)
            .try_fold(0.0_f64, |m, d| d.map(|d| m.max(d)))
    }

    /// CSV with columns `t,W,closure_integral,dirac_residual`; missing
    /// spinor columns are left empty.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,W,closure_integral,dirac_residual")?;
        let opt = |v: Option<f64>| v.map(|x| format_g(x, 17)).unwrap_or_default();
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{}",
                format_g(s.t, 17),
                format_g(s.w, 17),
                opt(s.closure_integral),
                opt(s.dirac_residual)
            )?;
        }
        Ok(())
    }
}

/// `W = (π/2) ∫ v² dx`
pub fn flow_energy(v: &PeriodicProfile) -> f64 {
    0.5 * PI * v.map(|x| x * x).integral()
}

/// Default step: `EXPLICIT_DT_FACTOR · Δx³` for plain RK4; for the
/// integrating factor at `n = 1`, a quarter of the advective limit
/// `1 / (k_max · (3/2) max v²)`, capped at `1e-4` so that a co-evolved
/// spinor stays accurate to about `1e-7` over unit time.
pub fn default_dt(v: &PeriodicProfile, n: usize, stepper: Stepper) -> f64 {
    let dx = v.step();
    let explicit = EXPLICIT_DT_FACTOR * dx.powi(2 * n as i32 + 1);
    match (stepper, n) {
        (Stepper::Explicit, _) => explicit,
        (Stepper::IntegratingFactor, 1) => {
            let kmax = PI / dx;
            let speed = 1.5 * v.max_abs().powi(2);
            (0.25 / (kmax * speed.max(1e-12))).min(1e-4)
        }
        (Stepper::IntegratingFactor, _) => 100.0 * explicit,
    }
}

struct Evolver {
    ops: Ops,
    n: usize,
    /// Symbol of `∂^{2n+1}` per mode.
    symbol: Vec<Complex64>,
    /// Modes kept in the nonlinear term (`|k| ≤ N/3`).
    keep: Vec<bool>,
}

impl Evolver {
    /// `∂^{2n+1} v` plus the dealiased nonlinear part.
    fn full_rhs(&self, v: &[f64]) -> Result<Vec<f64>> {
        let vh = self.ops.grid.forward(v);
        let nl = self.nonlinear_hat(&vh)?;
        Ok(self.ops.grid.inverse(
            (0..vh.len())
                .map(|j| self.symbol[j] * vh[j] + nl[j])
                .collect(),
        ))
    }

    /// Fourier transform of the nonlinear part `Dⁿ v_x − ∂^{2n+1} v`,
    /// truncated to the kept modes.
    fn nonlinear_hat(&self, v_hat: &[Complex64]) -> Result<Vec<Complex64>> {
        let v = self.ops.grid.inverse(v_hat.to_vec());
        let full = self.ops.grid.forward(&self.ops.rhs(&v, self.n)?);
        Ok((0..full.len())
            .map(|j| {
                if self.keep[j] {
                    full[j] - self.symbol[j] * v_hat[j]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect())
    }

    fn spinor_rhs(&self, v: &[f64], lambda: f64, r: &[f64], s: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let vx = self.ops.d(v, 1);
        let vxx = self.ops.d(v, 2);
        (0..v.len())
            .map(|j| k3_pointwise(v[j], vx[j], vxx[j], lambda, r[j], s[j]))
            .unzip()
    }

    fn sample(
        &self,
        v: &PeriodicProfile,
        t: f64,
        spinor: Option<&SpinorState>,
    ) -> ConservationSample {
        let (closure_integral, dirac_residual) = match spinor {
            Some(sp) => {
                let h = v.step();
                let closure = h * neumaier_sum(sp.r.iter().zip(&sp.s).map(|(a, b)| a * b));
                let rx = self.ops.grid.derivative_with_parity(&sp.r, 1, sp.parity);
                let sx = self.ops.grid.derivative_with_parity(&sp.s, 1, sp.parity);
                let vs = v.samples();
                let res = (0..vs.len())
                    .map(|j| {
                        let e1 = rx[j] - 0.5 * (sp.lambda * sp.r[j] + vs[j] * sp.s[j]);
                        let e2 = sx[j] + 0.5 * (vs[j] * sp.r[j] + sp.lambda * sp.s[j]);
                        e1.abs().max(e2.abs())
                    })
                    .fold(0.0, f64::max);
                (Some(closure), Some(res))
            }
            None => (None, None),
        };
        ConservationSample {
            t,
            w: flow_energy(v),
            closure_integral,
            dirac_residual,
        }
    }
}

fn axpy(a: &[f64], c: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

/// RK4 combination `y + dt/6 (k1 + 2k2 + 2k3 + k4)`.
fn rk4_combine(y: &[f64], dt: f64, k: [&[f64]; 4]) -> Vec<f64> {
    (0..y.len())
        .map(|j| y[j] + dt / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]))
        .collect()
}

/// Advances `state` by `steps` steps of size `dt`, recording the
/// conservation sample before the first and after every step.
///
/// The nonlinear term is dealiased by the 2/3 rule; without it round-off in
/// the top modes grows through the cubic nonlinearity. A co-evolved spinor
/// (only for `n = 1`) is advanced by RK4 with the potential taken at the
/// stage values of the `v` integrator.
pub fn evolve(
    state: FlowState,
    dt: f64,
    steps: usize,
    stepper: Stepper,
) -> Result<(FlowState, ConservationReport)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if state.n == 0 {
        return Err(Error::Domain("hierarchy index starts at 1".into()));
    }
    if state.spinor.is_some() && state.n != 1 {
        return Err(Error::Unsupported(
            "spinor co-evolution is implemented for n = 1 only".into(),
        ));
    }
    if let Some(sp) = &state.spinor {
        if sp.r.len() != state.v.len() || sp.s.len() != state.v.len() {
            return Err(Error::InvalidProfile(
                "spinor and potential sizes differ".into(),
            ));
        }
    }
    let ops = Ops::new(state.v.len(), state.v.period());
    let order = 2 * state.n as u32 + 1;
    let symbol = (0..state.v.len())
        .map(|j| ops.grid.symbol(j, order))
        .collect();
    let len = state.v.len() as i64;
    let keep = (0..state.v.len())
        .map(|j| 3 * ops.grid.mode(j).abs() <= len)
        .collect();
    let ev = Evolver {
        ops,
        n: state.n,
        symbol,
        keep,
    };

    let FlowState {
        v,
        mut t,
        n,
        mut spinor,
    } = state;
    let initial = v.max_abs();
    let mut vs = v.samples().to_vec();
    let mut report = ConservationReport {
        samples: vec![ev.sample(&v, t, spinor.as_ref())],
    };
    let e_half: Vec<Complex64> = ev.symbol.iter().map(|l| (l * (0.5 * dt)).exp()).collect();

    for step in 0..steps {
        // stage potentials in physical space, and the new potential
        let (stages, next): ([Vec<f64>; 4], Vec<f64>) = match stepper {
            Stepper::Explicit => {
                let k1 = ev.full_rhs(&vs)?;
                let y2 = axpy(&vs, 0.5 * dt, &k1);
                let k2 = ev.full_rhs(&y2)?;
                let y3 = axpy(&vs, 0.5 * dt, &k2);
                let k3 = ev.full_rhs(&y3)?;
                let y4 = axpy(&vs, dt, &k3);
                let k4 = ev.full_rhs(&y4)?;
                let next = rk4_combine(&vs, dt, [&k1, &k2, &k3, &k4]);
                ([vs.clone(), y2, y3, y4], next)
            }
            Stepper::IntegratingFactor => {
                let g = &ev.ops.grid;
                let e = &e_half;
                let vh = g.forward(&vs);
                let k1 = ev.nonlinear_hat(&vh)?;
                let y2: Vec<Complex64> = (0..vh.len())
                    .map(|j| e[j] * (vh[j] + 0.5 * dt * k1[j]))
                    .collect();
                let k2 = ev.nonlinear_hat(&y2)?;
                let y3: Vec<Complex64> = (0..vh.len())
                    .map(|j| e[j] * vh[j] + 0.5 * dt * k2[j])
                    .collect();
                let k3 = ev.nonlinear_hat(&y3)?;
                let y4: Vec<Complex64> = (0..vh.len())
                    .map(|j| e[j] * e[j] * vh[j] + dt * e[j] * k3[j])
                    .collect();
                let k4 = ev.nonlinear_hat(&y4)?;
                let new: Vec<Complex64> = (0..vh.len())
                    .map(|j| {
                        let e2 = e[j] * e[j];
                        e2 * vh[j] + dt / 6.0 * (e2 * k1[j] + 2.0 * e[j] * (k2[j] + k3[j]) + k4[j])
                    })
                    .collect();
                let stages = [vs.clone(), g.inverse(y2), g.inverse(y3), g.inverse(y4)];
                (stages, g.inverse(new))
            }
        };
        if let Some(sp) = spinor.as_mut() {
            let lam = sp.lambda;
            let (kr1, ks1) = ev.spinor_rhs(&stages[0], lam, &sp.r, &sp.s);
            let (r2, s2) = (axpy(&sp.r, 0.5 * dt, &kr1), axpy(&sp.s, 0.5 * dt, &ks1));
            let (kr2, ks2) = ev.spinor_rhs(&stages[1], lam, &r2, &s2);
            let (r3, s3) = (axpy(&sp.r, 0.5 * dt, &kr2), axpy(&sp.s, 0.5 * dt, &ks2));
            let (kr3, ks3) = ev.spinor_rhs(&stages[2], lam, &r3, &s3);
            let (r4, s4) = (axpy(&sp.r, dt, &kr3), axpy(&sp.s, dt, &ks3));
            let (kr4, ks4) = ev.spinor_rhs(&stages[3], lam, &r4, &s4);
            sp.r = rk4_combine(&sp.r, dt, [&kr1, &kr2, &kr3, &kr4]);
            sp.s = rk4_combine(&sp.s, dt, [&ks1, &ks2, &ks3, &ks4]);
        }
        vs = next;
        t = (step + 1) as f64 * dt + report.samples[0].t;
        let current = vs.iter().fold(0.0_f64, |m, x| {
            if x.is_finite() {
                m.max(x.abs())
            } else {
                f64::INFINITY
            }
        });
        if current > BLOW_UP_FACTOR * initial.max(f64::MIN_POSITIVE) || !current.is_finite() {
            return Err(Error::Instability {
                initial,
                current,
                t,
            });
        }
        let vp = v.with_samples(vs.clone());
        report.samples.push(ev.sample(&vp, t, spinor.as_ref()));
    }
    Ok((
        FlowState {
            v: v.with_samples(vs),
            t,
            n,
            spinor,
        },
        report,
    ))
}
