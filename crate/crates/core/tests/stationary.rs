use std::f64::consts::PI;

use willmore_core::elliptic::{energy_integral_quadrature, EnergyFamilyParams};
use willmore_core::revolution::{
    floquet_density, integrate_spinor, monodromy, torus_closure_test, ClosureVerdict,
    MonodromyClass, GEOMETRIC_LAMBDA,
};
use willmore_core::spectral::SpectralGrid;
use willmore_core::willmore::{
    bound_sweep, bound_verdict, clifford_p, delta0, euler_lagrange_residual, schrodinger_potential,
    stationary_profile, write_sweep_csv, Branch, QuarticCoeffs,
};
use willmore_core::{Error, PeriodicProfile};

#[test]
fn clifford_quartic_reproduces_clifford_potential() {
    let prof = stationary_profile(QuarticCoeffs::clifford(), 256).unwrap();
    assert!((prof.period() - 2.0 * PI).abs() < 1e-9);
    assert_eq!(prof.branch, Branch::SignChanging);
    let reference = PeriodicProfile::from_fn(256, prof.period(), clifford_p).unwrap();
    let grid = SpectralGrid::new(256, prof.period());
    let shift = grid.best_shift(reference.samples(), prof.p.samples());
    // the profile starts at the maximum, reached by the closed form at π/2
    assert!((shift.abs() - 0.5 * PI).abs() < 1e-8, "{shift}");
    let aligned = prof.p.shifted(-shift);
    let err = aligned.zip_with(&reference, |a, b| (a - b).abs()).max_abs();
    assert!(err < 1e-8, "{err}");
}

#[test]
fn period_matches_quadrature() {
    for alpha in [-0.05, -1.0 / 32.0, 0.001, 0.3, 7.0] {
        let c = QuarticCoeffs::alpha_family(alpha);
        let prof = stationary_profile(c, 512).unwrap();
        let t = c.period_quadrature().unwrap();
        assert!(
            (prof.period() - t).abs() < 1e-10 * t,
            "{alpha}: {} vs {t}",
            prof.period()
        );
        assert!(prof.first_integral_drift < 1e-11);
        assert!(prof.ode_residual() < 1e-8);
        assert!(prof.first_integral_residual() < 1e-10);
        assert_eq!(prof.branch == Branch::SignDefinite, alpha < 0.0);
        assert_eq!(prof.a_const, Some(0.0));
    }
}

#[test]
fn degenerate_and_empty_quartics_are_rejected() {
    assert!(matches!(
        stationary_profile(QuarticCoeffs::alpha_family(0.0), 64),
        Err(Error::TurningPointDegenerate { .. })
    ));
    assert_eq!(
        stationary_profile(QuarticCoeffs::alpha_family(-0.1), 64),
        Err(Error::NoOscillation)
    );
}

#[test]
fn energy_bound_holds_on_the_family() {
    let rows = bound_sweep(1e-3, 1e2, 12, 1024).unwrap();
    for r in &rows {
        assert!(r.relative_disagreement() < 1e-6, "{r:?}");
        assert!(r.exceeds);
        assert!(r.w_elliptic > 2.0 * PI * PI);
        let quad = 16.0
            * PI
            * energy_integral_quadrature(&EnergyFamilyParams::new(r.alpha).unwrap()).unwrap();
        assert!((quad - r.w_elliptic).abs() < 1e-8 * quad);
    }
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "alpha,beta,ksq,W_elliptic,W_quadrature,exceeds"
    );
    assert_eq!(text.lines().count(), 13);
    let first: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .take(5)
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(first[3], rows[0].w_elliptic);
    assert!(bound_verdict(-1.0, 64).is_err());
}

#[test]
fn delta0_routes_agree_and_do_not_vanish() {
    let prof = stationary_profile(QuarticCoeffs::alpha_family(-1.0 / 32.0), 512).unwrap();
    let v = prof.p.scale(4.0);
    let m = monodromy(&v, GEOMETRIC_LAMBDA).unwrap();
    assert!(matches!(m.class, MonodromyClass::EllipticRotation { .. }));
    assert!((m.trace() + 1.0556).abs() < 1e-3, "{}", m.trace());
    // no real spinor closes within the search window
    assert_eq!(m.closing_periods([1.0, 0.0], 1e-6), None);
    let fd = floquet_density(&v, GEOMETRIC_LAMBDA).unwrap();
    assert!(fd.u.samples().iter().all(|&x| x > 0.0));
    let d = delta0(&prof, &fd.u).unwrap();
    assert!(d.max_relative_disagreement() < 1e-6, "{d:?}");
    assert!(d.direct.abs() > 1e-3);
    // (u − u_xx)/p = 8 w at λ = −1, so δ₀ = 8 ∫ w
    assert!((d.direct - 8.0 * fd.closure_integral()).abs() < 1e-8 * d.direct.abs());
    // the family solves the reduced constraint with a = 0
    let el = euler_lagrange_residual(&prof.p, &fd.u).unwrap();
    assert!(
        el.a_const.abs() < 1e-4 && el.a_var < 1e-4,
        "{} {}",
        el.a_const,
        el.a_var
    );

    let changing = stationary_profile(QuarticCoeffs::alpha_family(0.5), 256).unwrap();
    let u = PeriodicProfile::from_fn(256, changing.period(), |_| 1.0).unwrap();
    assert_eq!(delta0(&changing, &u), Err(Error::Branch));
}

#[test]
fn schrodinger_potential_energy_identity() {
    let prof = stationary_profile(QuarticCoeffs::alpha_family(-0.02), 512).unwrap();
    let v = schrodinger_potential(&prof.p).unwrap();
    let lhs = 2.0 * v.integral();
    let rhs = 4.0 * prof.p.map(|x| x * x).integral();
    assert!((lhs - rhs).abs() < 1e-10 * rhs);
}

/// Bisects `α ∈ (−0.05, −0.01)` for monodromy trace −1, where every spinor closes
/// after three periods.
fn alpha_for_trace_minus_one() -> f64 {
    let trace = |a: f64| {
        let p = stationary_profile(QuarticCoeffs::alpha_family(a), 256).unwrap();
        monodromy(&p.p.scale(4.0), GEOMETRIC_LAMBDA)
            .unwrap()
            .trace()
    };
    let (mut lo, mut hi) = (-0.05, -0.01);
    let f_lo = trace(lo) + 1.0;
    assert!(f_lo.signum() != (trace(hi) + 1.0).signum());
    for _ in 0..50 {
        let m = 0.5 * (lo + hi);
        if (trace(m) + 1.0).signum() == f_lo.signum() {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn three_period_closure_gives_a_cylinder() {
    let alpha = alpha_for_trace_minus_one();
    let prof = stationary_profile(QuarticCoeffs::alpha_family(alpha), 256).unwrap();
    let v = prof.p.scale(4.0);
    let m = monodromy(&v, GEOMETRIC_LAMBDA).unwrap();
    assert_eq!(m.closing_periods([1.0, 0.0], 1e-7), Some((3, 1.0)));
    let traj = integrate_spinor(&v, GEOMETRIC_LAMBDA, 1.0, 0.0, 3).unwrap();
    assert!(traj.is_closed());
    match torus_closure_test(&traj, None).unwrap() {
        ClosureVerdict::Cylinder { pitch } => assert!(pitch.abs() > 1e-3),
        other => panic!("{other:?}"),
    }
    // pitch equals the Floquet obstruction over three periods
    let fd = floquet_density(&v, GEOMETRIC_LAMBDA).unwrap();
    let scale = fd.u.integral() / traj.u_profile().unwrap().integral() * 3.0;
    assert!(
        (traj.closure_integral() * scale - 3.0 * fd.closure_integral()).abs()
            < 1e-6 * fd.closure_integral().abs()
    );
}
