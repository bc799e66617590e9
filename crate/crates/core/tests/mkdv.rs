use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use willmore_core::mkdv::{
    apply_d, apply_d_adjoint, default_dt, evolve, jk_functionals, mkdv_rhs, FlowState, SpinorState,
    Stepper,
};
use willmore_core::spectral::SpectralGrid;
use willmore_core::willmore::clifford_fixture;
use willmore_core::{Error, Parity, PeriodicProfile};

const T: f64 = 2.0 * PI;

fn random_smooth(rng: &mut ChaCha8Rng, n: usize, modes: usize, amp: f64) -> PeriodicProfile {
    let c: Vec<(f64, f64)> = (0..=modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    PeriodicProfile::from_fn(n, T, |x| {
        amp * c
            .iter()
            .enumerate()
            .map(|(k, (a, b))| {
                (a * (k as f64 * x).cos() + b * (k as f64 * x).sin()) / (1 + k * k) as f64
            })
            .sum::<f64>()
    })
    .unwrap()
}

fn dot(a: &PeriodicProfile, b: &PeriodicProfile) -> f64 {
    a.zip_with(b, |x, y| x * y).integral()
}

/// Removes the components of `f` along the given (mutually orthogonal) profiles.
fn project_out(f: &PeriodicProfile, dirs: &[&PeriodicProfile]) -> PeriodicProfile {
    let mut g = f.clone();
    for d in dirs {
        let c = dot(&g, d) / dot(d, d);
        g = g.zip_with(d, |a, b| a - c * b);
    }
    g
}

fn direct_mkdv(v: &PeriodicProfile) -> PeriodicProfile {
    let vx = v.derivative(1);
    let vxxx = v.derivative(3);
    v.with_samples(
        (0..v.len())
            .map(|j| 1.5 * v.samples()[j].powi(2) * vx.samples()[j] + vxxx.samples()[j])
            .collect(),
    )
}

#[test]
fn rhs_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let v = random_smooth(&mut rng, 128, 6, 2.0);
        let rhs = mkdv_rhs(&v, 1).unwrap();
        let err = rhs.zip_with(&direct_mkdv(&v), |a, b| a - b).max_abs();
        assert!(err < 1e-9, "{err}");
        assert!(rhs.mean().abs() < 1e-10);
        // the zero-mean operator differs by the lower flow −mean(v²)/2 · v_x
        let vx = v.derivative(1);
        let zero_mean = apply_d(&v, &vx).unwrap();
        let shift = 0.5 * v.map(|x| x * x).mean();
        let err = zero_mean
            .zip_with(&vx, |a, b| a + shift * b)
            .zip_with(&rhs, |a, b| a - b)
            .max_abs();
        assert!(err < 1e-9, "{err}");
        assert!(mkdv_rhs(&v, 3).unwrap().mean().abs() < 1e-8 * mkdv_rhs(&v, 3).unwrap().max_abs());
    }
}

#[test]
fn adjoint_and_intertwining_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let v = random_smooth(&mut rng, 128, 5, 1.5);
        let vx = v.derivative(1);
        let f = project_out(&random_smooth(&mut rng, 128, 5, 1.0), &[&v, &vx]);
        let g = project_out(&random_smooth(&mut rng, 128, 5, 1.0), &[&v]);
        let lhs = dot(&f, &apply_d(&v, &g).unwrap());
        let rhs = dot(&apply_d_adjoint(&v, &f).unwrap(), &g);
        assert!((lhs - rhs).abs() < 1e-9, "{lhs} {rhs}");
        let left = apply_d_adjoint(&v, &f).unwrap().derivative(1);
        let right = apply_d(&v, &f.derivative(1)).unwrap();
        assert!(left.zip_with(&right, |a, b| a - b).max_abs() < 1e-9);
    }
}

#[test]
fn gate_rejects_non_derivatives() {
    let v = PeriodicProfile::from_fn(64, T, |x| 1.0 + 0.1 * x.cos()).unwrap();
    let g = PeriodicProfile::from_fn(64, T, |_| 1.0).unwrap();
    assert!(matches!(
        apply_d(&v, &g),
        Err(Error::NonExactDerivative { .. })
    ));
}

#[test]
fn clifford_potential_is_a_travelling_wave() {
    let fx = clifford_fixture(256).unwrap();
    let v = fx.v();
    let rhs = mkdv_rhs(&v, 1).unwrap();
    // stationary quartic with c2 = 2: v_t = 2 v_x
    let err = rhs.zip_with(&v.derivative(1), |a, b| a - 2.0 * b).max_abs();
    assert!(err < 1e-8 * rhs.max_abs(), "{err}");
}

fn clifford_state(n: usize) -> FlowState {
    let fx = clifford_fixture(n).unwrap();
    FlowState::new(fx.v(), 1).with_spinor(SpinorState {
        r: fx.r.samples().to_vec(),
        s: fx.s.samples().to_vec(),
        lambda: -1.0,
        parity: Parity::Antiperiodic,
    })
}

#[test]
fn clifford_flow_translates_and_conserves() {
    let state = clifford_state(512);
    let v0 = state.v.clone();
    let dt = default_dt(&v0, 1, Stepper::IntegratingFactor);
    let steps = (1.0 / dt).ceil() as usize;
    let dt = 1.0 / steps as f64;
    let (out, rep) = evolve(state, dt, steps, Stepper::IntegratingFactor).unwrap();
    assert!((out.t - 1.0).abs() < 1e-12);
    let expected = v0.shifted(-2.0);
    let err = out.v.zip_with(&expected, |a, b| a - b).max_abs();
    assert!(err < 1e-5, "{err}");
    assert!(rep.w_drift() < 1e-6, "{}", rep.w_drift());
    assert!(rep.closure_drift().unwrap() < 1e-6);
    assert!(
        rep.max_dirac_residual().unwrap() < 1e-6,
        "{:?}",
        rep.max_dirac_residual()
    );
    assert!((rep.samples[0].w - 2.0 * PI * PI).abs() < 1e-10);
}

#[test]
fn steppers_agree() {
    let a = clifford_state(64);
    let v0 = a.v.clone();
    let t_final = 0.2;
    let run = |stepper| {
        let dt = default_dt(&v0, 1, stepper);
        let steps = (t_final / dt).ceil() as usize;
        evolve(a.clone(), t_final / steps as f64, steps, stepper)
            .unwrap()
            .0
    };
    let x = run(Stepper::IntegratingFactor);
    let y = run(Stepper::Explicit);
    assert!(x.v.zip_with(&y.v, |a, b| a - b).max_abs() < 1e-6);
    let (xs, ys) = (x.spinor.unwrap(), y.spinor.unwrap());
    let d =
        xs.r.iter()
            .zip(&ys.r)
            .chain(xs.s.iter().zip(&ys.s))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
    assert!(d < 1e-6, "{d}");
}

#[test]
fn random_data_conserve_energy() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let v = random_smooth(&mut rng, 512, 4, 1.0);
        let dt = default_dt(&v, 1, Stepper::IntegratingFactor);
        let steps = (1.0 / dt).ceil() as usize;
        let (_, rep) = evolve(
            FlowState::new(v, 1),
            1.0 / steps as f64,
            steps,
            Stepper::IntegratingFactor,
        )
        .unwrap();
        assert!(rep.w_drift() < 1e-6, "{}", rep.w_drift());
    }
}

#[test]
fn translation_speed_from_correlation() {
    let fx = clifford_fixture(128).unwrap();
    let v0 = fx.v();
    let grid = SpectralGrid::new(128, T);
    let mut state = FlowState::new(v0.clone(), 1);
    let dt = 2e-3;
    let mut pts = vec![];
    for k in 1..=5 {
        let (s, _) = evolve(state, dt, 50, Stepper::IntegratingFactor).unwrap();
        state = s;
        let shift = grid.best_shift(v0.samples(), state.v.samples());
        pts.push((0.1 * k as f64, shift));
    }
    let slope =
        pts.iter().map(|(t, s)| t * s).sum::<f64>() / pts.iter().map(|(t, _)| t * t).sum::<f64>();
    assert!((slope + 2.0).abs() < 0.02, "{slope}");
}

#[test]
fn explicit_step_above_limit_is_unstable() {
    let fx = clifford_fixture(64).unwrap();
    let dx = fx.v().step();
    let r = evolve(
        FlowState::new(fx.v(), 1),
        0.5 * dx.powi(3),
        2000,
        Stepper::Explicit,
    );
    assert!(matches!(r, Err(Error::Instability { .. })));
}

#[test]
fn jk_vanish_on_clifford_pair() {
    let fx = clifford_fixture(256).unwrap();
    let rep = jk_functionals(&fx.v(), -1.0, fx.r.samples(), fx.s.samples(), 3).unwrap();
    let scale = fx.u.integral();
    for (k, j) in rep.j.iter().enumerate() {
        assert!(j.abs() < 1e-8 * scale.max(1.0), "J_{k} = {j}");
    }
    assert!(rep.recursion_defects.iter().all(|d| *d < 1e-8 * scale));
    // a non-solution pair
    let r: Vec<f64> = (0..256)
        .map(|j| 1.0 + (j as f64 * T / 256.0).cos())
        .collect();
    let bad = jk_functionals(&fx.v(), -1.0, &r, &vec![0.0; 256], 0).unwrap();
    assert!(bad.j[0].abs() > 1e-3);
}
