use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use willmore_core::elliptic::{complete_elliptic, EllipticModulus};
use willmore_core::fmt::format_g;
use willmore_core::mesh::write_grid_obj;
use willmore_core::willmore::QuarticCoeffs;
use willmore_core::PeriodicProfile;

fn trig(n: usize, a: [f64; 3], b: [f64; 3]) -> PeriodicProfile {
    PeriodicProfile::from_fn(n, 2.0 * PI, |x| {
        (0..3)
            .map(|k| {
                let kx = (k + 1) as f64 * x;
                a[k] * kx.cos() + b[k] * kx.sin()
            })
            .sum()
    })
    .unwrap()
}

proptest! {
    #[test]
    fn legendre_relation(k in 0.01_f64..0.99) {
        let m = EllipticModulus::new(k).unwrap();
        let mc = EllipticModulus::new(m.complement()).unwrap();
        let (kk, e) = complete_elliptic(m).unwrap();
        let (kc, ec) = complete_elliptic(mc).unwrap();
        assert_relative_eq!(e * kc + ec * kk - kk * kc, FRAC_PI_2, max_relative = 1e-13);
    }

    #[test]
    fn seventeen_digits_round_trip(x in proptest::num::f64::NORMAL) {
        prop_assert_eq!(format_g(x, 17).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn shifts_compose(
        a in proptest::array::uniform3(-1.0_f64..1.0),
        b in proptest::array::uniform3(-1.0_f64..1.0),
        s in -5.0_f64..5.0,
        t in -5.0_f64..5.0,
    ) {
        let f = trig(64, a, b);
        let two = f.shifted(s).shifted(t);
        let one = f.shifted(s + t);
        prop_assert!(two.zip_with(&one, |x, y| x - y).max_abs() < 1e-12);
    }

    #[test]
    fn antiderivative_inverts_derivative(
        a in proptest::array::uniform3(-1.0_f64..1.0),
        b in proptest::array::uniform3(-1.0_f64..1.0),
    ) {
        let f = trig(64, a, b);
        let back = f.derivative(1).antiderivative().unwrap();
        prop_assert!(back.zip_with(&f, |x, y| x - y).max_abs() < 1e-12);
    }

    #[test]
    fn quartic_turning_points_are_roots(alpha in -0.0624_f64..50.0) {
        prop_assume!(alpha.abs() > 1e-3);
        let c = QuarticCoeffs::alpha_family(alpha);
        let (lo, hi) = c.turning_points().unwrap();
        prop_assert!(lo < hi);
        prop_assert!(c.q(lo).abs() < 1e-10 && c.q(hi).abs() < 1e-10);
        prop_assert!(c.q(0.5 * (lo + hi)) > 0.0);
    }

    #[test]
    fn obj_face_counts(nx in 2_usize..12, ny in 2_usize..12, wrap: bool) {
        let vertices = vec![[0.0; 3]; nx * ny];
        let mut buf = Vec::new();
        write_grid_obj(&mut buf, nx, ny, &vertices, wrap).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let faces = text.lines().filter(|l| l.starts_with("f ")).count();
        let expect = if wrap { nx * ny } else { (nx - 1) * (ny - 1) };
        prop_assert_eq!(faces, expect);
        prop_assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), nx * ny);
    }
}
