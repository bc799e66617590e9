//! Complete elliptic integrals and the energy of the stationary α-family.
//!
//! `F(k)` and `E(k)` are the complete integrals of the first and second kind
//! in the modulus convention (`k`, not `m = k²`).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// Elliptic modulus `k ∈ [0, 1]` with `k²` cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus {
    k: f64,
    ksq: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&k) {
            return Err(Error::Domain(format!("modulus k = {k} outside [0, 1]")));
        }
        Ok(Self { k, ksq: k * k })
    }

    pub fn from_ksq(ksq: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ksq) {
            return Err(Error::Domain(format!("k² = {ksq} outside [0, 1]")));
        }
        Ok(Self { k: ksq.sqrt(), ksq })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn ksq(&self) -> f64 {
        self.ksq
    }

    /// Complementary modulus `√(1 − k²)`, computed without cancellation.
    pub fn complement(&self) -> f64 {
        ((1.0 - self.k) * (1.0 + self.k)).sqrt()
    }
}

/// Arithmetic–geometric mean iteration. Returns `(F, E)`; `F` is infinite
/// when `k = 1`.
fn agm(m: &EllipticModulus) -> (f64, f64) {
    if m.k == 1.0 {
        return (f64::INFINITY, 1.0);
    }
    let mut a = 1.0_f64;
    let mut b = m.complement();
    let mut c = m.k;
    let mut weight = 0.5;
    let mut sum = weight * c * c;
    for _ in 0..64 {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        weight *= 2.0;
        sum += weight * c * c;
    }
    let big_k = FRAC_PI_2 / a;
    (big_k, big_k * (1.0 - sum))
}

/// Complete integrals `(F(k), E(k))`.
pub fn complete_elliptic(m: EllipticModulus) -> Result<(f64, f64)> {
    if m.k >= 1.0 {
        return Err(Error::Divergence);
    }
    Ok(agm(&m))
}

/// `E(k)` alone; defined on the closed interval including `k = 1`.
pub fn complete_e(m: EllipticModulus) -> f64 {
    agm(&m).1
}

/// `F(k)` alone.
pub fn complete_f(m: EllipticModulus) -> Result<f64> {
    complete_elliptic(m).map(|(f, _)| f)
}

/// `f(k) = (E(k) − (1 − k²) F(k)) / √(2k² − 1)` on `(1/√2, 1]`.
///
/// At `k = 1` the `(1 − k²) F(k)` term vanishes in the limit, giving exactly 1.
pub fn f_of_k(m: EllipticModulus) -> Result<f64> {
    if m.k <= FRAC_1_SQRT_2 || m.ksq <= 0.5 {
        return Err(Error::Domain(format!(
            "f(k) needs k > 1/√2, got k = {}",
            m.k
        )));
    }
    if m.k == 1.0 {
        return Ok(1.0);
    }
    let (f, e) = agm(&m);
    Ok((e - (1.0 - m.ksq) * f) / (2.0 * m.ksq - 1.0).sqrt())
}

/// Parameters of the stationary family `p_x² = −4p⁴ + p² + α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFamilyParams {
    alpha: f64,
    beta: f64,
    c: f64,
    modulus: EllipticModulus,
}

impl EnergyFamilyParams {
    /// Builds `β = √(1 + 16α)`, `C = (1 + β)/8`, `k² = (1 + β)/(2β)` for `α ≥ 0`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Domain(format!(
                "energy family needs α ≥ 0, got {alpha}"
            )));
        }
        let beta = (1.0 + 16.0 * alpha).sqrt();
        let c = (1.0 + beta) / 8.0;
        let ksq = ((1.0 + beta) / (2.0 * beta)).min(1.0);
        Ok(Self {
            alpha,
            beta,
            c,
            modulus: EllipticModulus::from_ksq(ksq)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `C = max p²` over the oscillation.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.modulus
    }

    fn require_positive(&self) -> Result<()> {
        if self.alpha > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "energy integral needs α > 0, got {}",
                self.alpha
            )))
        }
    }
}

/// `I = ∫_0^C √(C − v) dv / √(v (β − 4v))` in closed form,
/// `I = (√β E(k) − (β − 1) F(k) / (2√β)) / 2`, which equals `f(k)/2`.
///
/// The Willmore energy of the corresponding torus is `16π I`.
pub fn energy_integral(params: &EnergyFamilyParams) -> Result<f64> {
    params.require_positive()?;
    let (f, e) = complete_elliptic(params.modulus)?;
    let sb = params.beta.sqrt();
    Ok(0.5 * (sb * e - (params.beta - 1.0) / (2.0 * sb) * f))
}

/// `I` by direct quadrature. The substitution `v = C sin²θ` removes both
/// endpoint singularities: `I = ∫_0^{π/2} 2C cos²θ / √(β − 4C sin²θ) dθ`.
pub fn energy_integral_quadrature(params: &EnergyFamilyParams) -> Result<f64> {
    params.require_positive()?;
    let (beta, c) = (params.beta, params.c);
    let integrand = |theta: f64| {
        let (s, co) = theta.sin_cos();
        2.0 * c * co * co
            / (beta - 4.0 * c * s * s)
                .max(0.0)
                .sqrt()
                .max(f64::MIN_POSITIVE)
    };
    Ok(adaptive_simpson(integrand, 0.0, FRAC_PI_2, 1e-15 * c))
}

/// `W = 16π I` for the α-family torus.
pub fn family_willmore_energy(params: &EnergyFamilyParams) -> Result<f64> {
    Ok(16.0 * PI * energy_integral(params)?)
}

/// `2E(k) − F(k)` as a function of `k²`.
pub fn two_e_minus_f(ksq: f64) -> Result<f64> {
    let (f, e) = complete_elliptic(EllipticModulus::from_ksq(ksq)?)?;
    Ok(2.0 * e - f)
}

/// Bracket in `k²` for the critical point of `f`.
pub const ROOT_BRACKET: (f64, f64) = (0.75, 0.95);

/// Unique root of `2E(k) = F(k)` on the bracket, by bisection in `k²`.
///
/// `F` increases and `E` decreases in `k`, so `2E − F` is strictly
/// decreasing and the sign change is unique.
pub fn solve_two_e_equals_f() -> EllipticModulus {
    let (mut lo, mut hi) = ROOT_BRACKET;
    let g = |m: f64| two_e_minus_f(m).expect("bracket inside (0, 1)");
    debug_assert!(g(lo) > 0.0 && g(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    EllipticModulus::from_ksq(0.5 * (lo + hi)).expect("root inside (0, 1)")
}

/// Minimum of `f` over `points` equally spaced `k` in `(1/√2, 1]`, and where
/// it is attained.
pub fn f_grid_minimum(points: usize) -> Result<(f64, EllipticModulus)> {
    let mut best: Option<(f64, EllipticModulus)> = None;
    for i in 1..=points {
        let k = (FRAC_1_SQRT_2 + (1.0 - FRAC_1_SQRT_2) * i as f64 / points as f64).min(1.0);
        let m = EllipticModulus::new(k)?;
        let f = f_of_k(m)?;
        if best.is_none_or(|(b, _)| f < b) {
            best = Some((f, m));
        }
    }
    best.ok_or_else(|| Error::Domain("empty k grid".into()))
}

/// Finite-difference residuals of the two Legendre-type identities
/// `E − (1 − k²)F = k(1 − k²) F'` and `(k(1 − k²) F')' = kF`.
///
/// Both derivatives are second-order central differences with step `h`, so
/// the residuals are `O(h²)`. The nested stencil reaches `k ± 2h`.
pub fn legendre_derivative_residuals(m: EllipticModulus, h: f64) -> Result<(f64, f64)> {
    let k = m.k;
    if !(h > 0.0) || k - 2.0 * h <= 0.0 || k + 2.0 * h >= 1.0 {
        return Err(Error::Domain(format!(
            "stencil k ± 2h = {k} ± {} leaves (0, 1)",
            2.0 * h
        )));
    }
    let big_f = |x: f64| -> Result<f64> { complete_f(EllipticModulus::new(x)?) };
    let df = |x: f64| -> Result<f64> { Ok((big_f(x + h)? - big_f(x - h)?) / (2.0 * h)) };
    let g = |x: f64| -> Result<f64> { Ok(x * (1.0 - x * x) * df(x)?) };
    let (f, e) = complete_elliptic(m)?;
    let res1 = (e - (1.0 - k * k) * f - g(k)?).abs();
    let dg = (g(k + h)? - g(k - h)?) / (2.0 * h);
    let res2 = (dg - k * f).abs();
    Ok((res1, res2))
}
