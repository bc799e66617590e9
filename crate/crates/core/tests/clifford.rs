use std::f64::consts::{PI, SQRT_2};

use willmore_core::revolution::{
    build_revolution_mesh, derivative_identity_residuals, integrate_spinor,
    metric_identity_residual, monodromy, profile_curve, revolution_defects, torus_closure_test,
    willmore_energy, ClosureVerdict, MonodromyClass, GEOMETRIC_LAMBDA,
};
use willmore_core::willmore::{
    clifford_fixture, clifford_mean_curvature, clifford_r, clifford_s, euler_lagrange_residual,
    mirror_congruence_defect, schrodinger_residual,
};
use willmore_core::Parity;

#[test]
fn trajectory_reproduces_closed_forms() {
    let fx = clifford_fixture(256).unwrap();
    let traj = integrate_spinor(
        &fx.v(),
        GEOMETRIC_LAMBDA,
        clifford_r(0.0),
        clifford_s(0.0),
        1,
    )
    .unwrap();
    let h = traj.step();
    let err = (0..traj.r().len())
        .map(|j| {
            let x = j as f64 * h;
            (traj.r()[j] - clifford_r(x))
                .abs()
                .max((traj.s()[j] - clifford_s(x)).abs())
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    assert!(traj.is_closed());
    assert_eq!(traj.parity(), Parity::Antiperiodic);
}

#[test]
fn monodromy_is_parabolic_minus() {
    let fx = clifford_fixture(256).unwrap();
    let m = monodromy(&fx.v(), GEOMETRIC_LAMBDA).unwrap();
    assert!((m.trace() + 2.0).abs() < 1e-9, "{}", m.trace());
    assert!((m.det() - 1.0).abs() < 1e-10);
    assert_eq!(m.class, MonodromyClass::Parabolic { sign: -1.0 });
    let eta = [clifford_r(0.0), clifford_s(0.0)];
    assert_eq!(m.closing_periods(eta, 1e-8), Some((1, -1.0)));
}

#[test]
fn torus_closes_with_exact_energy() {
    let fx = clifford_fixture(256).unwrap();
    let traj = integrate_spinor(
        &fx.v(),
        GEOMETRIC_LAMBDA,
        clifford_r(0.0),
        clifford_s(0.0),
        1,
    )
    .unwrap();
    assert!(traj.closure_integral().abs() < 1e-10);
    assert_eq!(
        torus_closure_test(&traj, None).unwrap(),
        ClosureVerdict::Torus
    );
    let w = willmore_energy(&fx.p, 1);
    assert!((w - 2.0 * PI * PI).abs() < 1e-10 * w);
    let scale = traj.u().iter().fold(0.0_f64, |m, v| m.max(*v));
    let mr = metric_identity_residual(&traj).unwrap();
    // the signed root loses half the digits where r s vanishes
    assert!(mr < 1e-5 * scale, "{mr} {scale}");
    for r in derivative_identity_residuals(&traj) {
        assert!(r < 1e-8 * scale, "{r}");
    }
}

#[test]
fn revolution_mesh_is_a_round_tube() {
    let fx = clifford_fixture(256).unwrap();
    let traj = integrate_spinor(
        &fx.v(),
        GEOMETRIC_LAMBDA,
        clifford_r(0.0),
        clifford_s(0.0),
        1,
    )
    .unwrap();
    let mesh = build_revolution_mesh(&traj, 64).unwrap();
    let (dz, drho) = revolution_defects(&mesh);
    assert!(dz < 1e-9 && drho < 1e-9, "{dz} {drho}");
    assert_eq!(mesh.vertex(0, 0)[2], 0.0);
    let curve = profile_curve(&mesh);
    let (lo, hi) = curve
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(a, b), &(r, _)| {
            (a.min(r), b.max(r))
        });
    let centre = 0.5 * (lo + hi);
    let radius = 0.5 * (hi - lo);
    assert!(
        (centre / radius - SQRT_2).abs() < 1e-6,
        "{}",
        centre / radius
    );
    assert!((radius - 2.0).abs() < 1e-6, "{radius}");
    // all profile points on one circle
    let z0 = curve.iter().map(|c| c.1).sum::<f64>() / curve.len() as f64;
    for &(r, z) in &curve {
        assert!(((r - centre).hypot(z - z0) - radius).abs() < 1e-6);
    }
    // mean curvature matches the closed form after the phase shift x = vv − π/2 ... up to orientation
    let mut worst = 0.0_f64;
    for i in 0..mesh.nx {
        let x = i as f64 * mesh.hx;
        let expect = clifford_mean_curvature(x);
        worst = worst.max((mesh.mean_curvature[mesh.index(i, 0)].abs() - expect.abs()).abs());
    }
    assert!(worst < 1e-8, "{worst}");
    let w = mesh.willmore_energy();
    assert!((w - 2.0 * PI * PI).abs() < 1e-8 * w);
}

#[test]
fn reversed_potential_gives_mirror_image() {
    let fx = clifford_fixture(128).unwrap();
    let traj = integrate_spinor(
        &fx.v(),
        GEOMETRIC_LAMBDA,
        clifford_r(0.0),
        clifford_s(0.0),
        1,
    )
    .unwrap();
    let flipped = integrate_spinor(
        &fx.v().scale(-1.0),
        GEOMETRIC_LAMBDA,
        clifford_r(0.0),
        -clifford_s(0.0),
        1,
    )
    .unwrap();
    let a = build_revolution_mesh(&traj, 32).unwrap();
    let b = build_revolution_mesh(&flipped, 32).unwrap();
    assert!(mirror_congruence_defect(&a, &b) < 1e-10);
}

#[test]
fn euler_lagrange_holds_to_second_order() {
    let mut prev: Option<[f64; 3]> = None;
    for n in [128, 256, 512] {
        let fx = clifford_fixture(n).unwrap();
        let rep = euler_lagrange_residual(&fx.p, &fx.u).unwrap();
        assert!((rep.a_const - 0.5).abs() < 1e-3);
        let now = [rep.res_el, rep.a_var, rep.res_422];
        if let Some(prev) = prev {
            for k in 0..3 {
                let ratio = prev[k] / now[k];
                assert!((ratio - 4.0).abs() < 0.5, "component {k}: ratio {ratio}");
            }
        }
        prev = Some(now);
    }
}

#[test]
fn schrodinger_holds_to_second_order() {
    let mut prev = None;
    for n in [128, 256, 512] {
        let fx = clifford_fixture(n).unwrap();
        let rep = schrodinger_residual(&fx.p, &fx.u, 0.05).unwrap();
        assert!(rep.excluded_fraction() < 0.2);
        if let Some(prev) = prev {
            let ratio: f64 = prev / rep.residual;
            assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
        }
        prev = Some(rep.residual);
    }
}
