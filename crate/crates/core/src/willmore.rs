//! Willmore-specific computations on surfaces of revolution: the Clifford
//! torus, stationary (mKdV-invariant) potentials, the Euler–Lagrange and
//! Schrödinger residuals, the δ₀ obstruction, and the energy bound.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::io::{self, Write};

use crate::elliptic::{family_willmore_energy, EnergyFamilyParams};
use crate::error::{Error, Result};
use crate::fmt::format_g;
use crate::mesh::SurfaceMesh;
use crate::ode::rk4_step;
use crate::quadrature::adaptive_simpson;
use crate::revolution::willmore_energy;
use crate::spectral::{fd_periodic, PeriodicProfile};

// ---------------------------------------------------------------------------
// Clifford torus

/// `p(x) = sin x / (2√2 (√2 − sin x))`
pub fn clifford_p(x: f64) -> f64 {
    x.sin() / (2.0 * SQRT_2 * (SQRT_2 - x.sin()))
}

/// `u(x) = 1 / (√2 − sin x)`
pub fn clifford_u(x: f64) -> f64 {
    1.0 / (SQRT_2 - x.sin())
}

/// Closed-form spinor component with `r² = (u − u_x)/2`. Antiperiodic with
/// period 2π: it has one simple zero per period, at `x = π/4`.
pub fn clifford_r(x: f64) -> f64 {
    let half = 0.5 * (x + 0.25 * PI);
    2f64.powf(-0.25) * (half.sin() - half.cos()) / (SQRT_2 - x.sin())
}

/// Closed-form spinor component with `s² = (u + u_x)/2`, signed so that
/// `r s = (√2 sin x − 1) / (2 (√2 − sin x)²)`.
pub fn clifford_s(x: f64) -> f64 {
    let half = 0.5 * (x - 0.25 * PI);
    2f64.powf(-0.25) * (half.cos() - half.sin()) / (SQRT_2 - x.sin())
}

/// Stereographic Clifford torus `(2cos u, 2sin u, 2cos v) / (√2 − sin v)`.
pub fn clifford_immersion(uu: f64, vv: f64) -> [f64; 3] {
    let d = SQRT_2 - vv.sin();
    [2.0 * uu.cos() / d, 2.0 * uu.sin() / d, 2.0 * vv.cos() / d]
}

/// Mean curvature `sin v / (2√2)` of the Clifford torus.
pub fn clifford_mean_curvature(vv: f64) -> f64 {
    vv.sin() / (2.0 * SQRT_2)
}

/// Gaussian curvature `(√2 sin v − 1)/4` of the Clifford torus.
pub fn clifford_gaussian_curvature(vv: f64) -> f64 {
    (SQRT_2 * vv.sin() - 1.0) / 4.0
}

/// Samples of the Clifford data on `[0, 2π)`.
///
/// `r` and `s` are stored on the same grid but are antiperiodic; `p`, `u`
/// and every quadratic expression in `(r, s)` are 2π-periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordFixture {
    pub p: PeriodicProfile,
    pub u: PeriodicProfile,
    pub r: PeriodicProfile,
    pub s: PeriodicProfile,
}

impl CliffordFixture {
    pub fn v(&self) -> PeriodicProfile {
        self.p.scale(4.0)
    }
}

/// Max residual of the spinor system for the closed-form `(r, s)`, by
/// central differences with step `h` at `n` points.
pub fn clifford_spinor_residual(n: usize, h: f64) -> f64 {
    (0..n)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / n as f64;
            let rx = (clifford_r(x + h) - clifford_r(x - h)) / (2.0 * h);
            let sx = (clifford_s(x + h) - clifford_s(x - h)) / (2.0 * h);
            let (r, s, p) = (clifford_r(x), clifford_s(x), clifford_p(x));
            (rx + 0.5 * r - 2.0 * p * s)
                .abs()
                .max((sx - 0.5 * s + 2.0 * p * r).abs())
        })
        .fold(0.0, f64::max)
}

pub fn clifford_fixture(n: usize) -> Result<CliffordFixture> {
    let period = 2.0 * PI;
    let fixture = CliffordFixture {
        p: PeriodicProfile::from_fn(n, period, clifford_p)?,
        u: PeriodicProfile::from_fn(n, period, clifford_u)?,
        r: PeriodicProfile::from_fn(n, period, clifford_r)?,
        s: PeriodicProfile::from_fn(n, period, clifford_s)?,
    };
    let residual = clifford_spinor_residual(n, 1e-5);
    if residual > 1e-7 {
        return Err(Error::NotASolution {
            residual,
            tol: 1e-7,
        });
    }
    Ok(fixture)
}

/// First and second fundamental forms of a parametrised surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundamentalForms {
    /// `(H, K)` with the normal `X_u × X_v / |X_u × X_v|`.
    pub fn curvatures(&self) -> (f64, f64) {
        let det1 = self.e * self.g - self.f * self.f;
        let h = (self.e * self.n + self.g * self.l - 2.0 * self.f * self.m) / (2.0 * det1);
        let k = (self.l * self.n - self.m * self.m) / det1;
        (h, k)
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Fundamental forms of `surface` at `(a, b)` by central differences of step `h`.
pub fn fundamental_forms_fd<F: Fn(f64, f64) -> [f64; 3]>(
    surface: F,
    a: f64,
    b: f64,
    h: f64,
) -> FundamentalForms {
    let x0 = surface(a, b);
    let xa = surface(a + h, b);
    let xma = surface(a - h, b);
    let xb = surface(a, b + h);
    let xmb = surface(a, b - h);
    let scale = |v: [f64; 3], c: f64| [v[0] * c, v[1] * c, v[2] * c];
    let xu = scale(sub(xa, xma), 0.5 / h);
    let xv = scale(sub(xb, xmb), 0.5 / h);
    let second = |p: [f64; 3], m: [f64; 3]| {
        [
            (p[0] - 2.0 * x0[0] + m[0]) / (h * h),
            (p[1] - 2.0 * x0[1] + m[1]) / (h * h),
            (p[2] - 2.0 * x0[2] + m[2]) / (h * h),
        ]
    };
    let xuu = second(xa, xma);
    let xvv = second(xb, xmb);
    let xuv = scale(
        sub(
            sub(surface(a + h, b + h), surface(a + h, b - h)),
            sub(surface(a - h, b + h), surface(a - h, b - h)),
        ),
        0.25 / (h * h),
    );
    let nrm = cross(xu, xv);
    let len = dot(nrm, nrm).sqrt();
    let nrm = scale(nrm, 1.0 / len);
    FundamentalForms {
        e: dot(xu, xu),
        f: dot(xu, xv),
        g: dot(xv, xv),
        l: dot(xuu, nrm),
        m: dot(xuv, nrm),
        n: dot(xvv, nrm),
    }
}

// ---------------------------------------------------------------------------
// Stationary potentials

/// Coefficients of `p_x² = Q(p) = −4p⁴ + c2 p² + c1 p + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl QuarticCoeffs {
    pub fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c0, c1, c2 }
    }

    /// The family `p_x² = −4p⁴ + p² + α`.
    pub fn alpha_family(alpha: f64) -> Self {
        Self {
            c0: alpha,
            c1: 0.0,
            c2: 1.0,
        }
    }

    /// The quartic satisfied by the Clifford potential.
    pub fn clifford() -> Self {
        Self {
            c0: 1.0 / 16.0,
            c1: FRAC_1_SQRT_2,
            c2: 2.0,
        }
    }

    pub fn q(&self, p: f64) -> f64 {
        let p2 = p * p;
        -4.0 * p2 * p2 + self.c2 * p2 + self.c1 * p + self.c0
    }

    pub fn dq(&self, p: f64) -> f64 {
        -16.0 * p * p * p + 2.0 * self.c2 * p + self.c1
    }

    /// Right-hand side of `p_xx = c2 p + c1/2 − 8p³`.
    pub fn pxx(&self, p: f64) -> f64 {
        self.c2 * p + 0.5 * self.c1 - 8.0 * p * p * p
    }

    fn scale(&self) -> f64 {
        1.0 + self.c0.abs() + self.c1.abs() + self.c2.abs()
    }

    /// Simple turning points `(p_lo, p_hi)` bounding the topmost positive bump.
    pub fn turning_points(&self) -> Result<(f64, f64)> {
        let bound = 1.0 + self.c0.abs().max(self.c1.abs()).max(self.c2.abs()) / 4.0;
        let samples = 40_000;
        let h = 2.0 * bound / samples as f64;
        let xs: Vec<f64> = (0..=samples).map(|i| -bound + i as f64 * h).collect();
        let qs: Vec<f64> = xs.iter().map(|&x| self.q(x)).collect();
        let refine = |mut a: f64, mut b: f64| {
            if self.q(a) == 0.0 {
                return a;
            }
            let sa = self.q(a).signum();
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if self.q(m).signum() == sa {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= f64::EPSILON * m.abs().max(1e-300) {
                    break;
                }
            }
            0.5 * (a + b)
        };
        // scan downward for the last sign change (− above, + below)
        let top = (0..samples)
            .rev()
            .find(|&i| qs[i] > 0.0 && qs[i + 1] <= 0.0)
            .ok_or(Error::NoOscillation)?;
        let p_hi = refine(xs[top], xs[top + 1]);
        let bottom = (0..top)
            .rev()
            .find(|&i| qs[i] <= 0.0 && qs[i + 1] > 0.0)
            .ok_or(Error::NoOscillation)?;
        let p_lo = refine(xs[bottom], xs[bottom + 1]);
        let tol = 1e-9 * self.scale();
        for root in [p_lo, p_hi] {
            let slope = self.dq(root);
            if slope.abs() < tol {
                return Err(Error::TurningPointDegenerate { root, slope });
            }
        }
        // an interior double root touches zero without a sign change
        for i in bottom + 1..=top {
            if qs[i] <= 1e-12 * self.scale() {
                return Err(Error::TurningPointDegenerate {
                    root: xs[i],
                    slope: self.dq(xs[i]),
                });
            }
        }
        if let Some(i) = (bottom + 1..top).find(|&i| qs[i] < qs[i - 1] && qs[i] < qs[i + 1]) {
            // local minimum inside the bump: bisect its depth with the exact quartic
            let (mut a, mut b) = (xs[i - 1], xs[i + 1]);
            for _ in 0..100 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if self.q(m1) < self.q(m2) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            let m = 0.5 * (a + b);
            if self.q(m) <= 1e-12 * self.scale() {
                return Err(Error::TurningPointDegenerate {
                    root: m,
                    slope: self.dq(m),
                });
            }
        }
        Ok((p_lo, p_hi))
    }

    /// Period `2 ∫_{p_lo}^{p_hi} dp / √Q(p)` by quadrature after
    /// deflating the two turning points and substituting
    /// `p = m + d sin θ`.
    pub fn period_quadrature(&self) -> Result<f64> {
        let (lo, hi) = self.turning_points()?;
        let sigma = lo + hi;
        let pi_ = lo * hi;
        // Q = (p − lo)(hi − p)(4p² + 4σp − q0)
        let q0 = self.c2 - 4.0 * sigma * sigma + 4.0 * pi_;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let rest = |theta: f64| {
            let p = mid + half * theta.sin();
            1.0 / (4.0 * p * p + 4.0 * sigma * p - q0).sqrt()
        };
        Ok(2.0 * adaptive_simpson(rest, -0.5 * PI, 0.5 * PI, 1e-14))
    }
}

/// Whether the potential keeps one sign over its period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    SignDefinite,
    SignChanging,
}

/// A periodic solution of `p_xx + 8p³ − c2 p − c1/2 = 0` sampled from its
/// upper turning point.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryProfile {
    pub p: PeriodicProfile,
    pub coeffs: QuarticCoeffs,
    pub branch: Branch,
    /// Constant `a` of `8p³ + p_xx − p = a u`, when fixed by the coefficients
    /// alone (the `a = 0` case `c2 = 1, c1 = 0`).
    pub a_const: Option<f64>,
    pub p_min: f64,
    pub p_max: f64,
    /// Max `|p_x² − Q(p)|` along the integration.
    pub first_integral_drift: f64,
}

impl StationaryProfile {
    pub fn period(&self) -> f64 {
        self.p.period()
    }

    /// Max-norm residual of `p_xx + 8p³ − c2 p − c1/2` with spectral `p_xx`.
    pub fn ode_residual(&self) -> f64 {
        let pxx = self.p.derivative(2);
        self.p
            .samples()
            .iter()
            .zip(pxx.samples())
            .map(|(&p, &d)| (d - self.coeffs.pxx(p)).abs())
            .fold(0.0, f64::max)
    }

    /// Max-norm residual of `p_x² − Q(p)` with spectral `p_x`.
    pub fn first_integral_residual(&self) -> f64 {
        let px = self.p.derivative(1);
        self.p
            .samples()
            .iter()
            .zip(px.samples())
            .map(|(&p, &d)| (d * d - self.coeffs.q(p)).abs())
            .fold(0.0, f64::max)
    }
}

/// Substeps per output sample when integrating stationary profiles.
const STATIONARY_SUBSTEPS: usize = 16;

/// Integrates the second-order stationary equation from the upper turning
/// point, detects the period as the next return to it (sign change of `p_x`
/// from + to −, refined by bisection on the last step), and resamples the
/// period onto `n` uniform points.
pub fn stationary_profile(coeffs: QuarticCoeffs, n: usize) -> Result<StationaryProfile> {
    if n < PeriodicProfile::MIN_SAMPLES || !n.is_multiple_of(2) {
        return Err(Error::InvalidProfile(format!(
            "need an even sample count >= 16, got {n}"
        )));
    }
    let (p_lo, p_hi) = coeffs.turning_points()?;
    let rhs = |_: f64, y: &[f64; 2]| [y[1], coeffs.pxx(y[0])];
    let estimate = coeffs.period_quadrature()?;

    // event search
    let h = estimate / (n * STATIONARY_SUBSTEPS) as f64;
    let mut y = [p_hi, 0.0];
    let mut x = 0.0;
    let mut seen_min = false;
    let limit = 4 * n * STATIONARY_SUBSTEPS;
    let mut period = None;
    for _ in 0..limit {
        let next = rk4_step(rhs, x, y, h);
        if !seen_min && y[1] < 0.0 && next[1] >= 0.0 {
            seen_min = true;
        } else if seen_min && y[1] > 0.0 && next[1] <= 0.0 {
            let (mut a, mut b) = (0.0, h);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if rk4_step(rhs, x, y, m)[1] > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-15 {
                    break;
                }
            }
            period = Some(x + 0.5 * (a + b));
            break;
        }
        y = next;
        x += h;
    }
    let period = period.ok_or(Error::NoOscillation)?;

    // resampling pass with a step that lands on the grid
    let h = period / (n * STATIONARY_SUBSTEPS) as f64;
    let mut y = [p_hi, 0.0];
    let mut samples = Vec::with_capacity(n);
    let mut drift = 0.0_f64;
    for j in 0..n {
        samples.push(y[0]);
        for k in 0..STATIONARY_SUBSTEPS {
            let xk = (j * STATIONARY_SUBSTEPS + k) as f64 * h;
            y = rk4_step(rhs, xk, y, h);
            drift = drift.max((y[1] * y[1] - coeffs.q(y[0])).abs());
        }
    }
    let p = PeriodicProfile::new(samples, period)?;
    let branch = if p_lo * p_hi > 0.0 {
        Branch::SignDefinite
    } else {
        Branch::SignChanging
    };
    let a_const = (coeffs.c2 == 1.0 && coeffs.c1 == 0.0).then_some(0.0);
    Ok(StationaryProfile {
        p,
        coeffs,
        branch,
        a_const,
        p_min: p_lo,
        p_max: p_hi,
        first_integral_drift: drift,
    })
}

// ---------------------------------------------------------------------------
// Euler–Lagrange and Schrödinger residuals

/// Second-order central third derivative on periodic data.
fn fd_third(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let at = |o: isize| f[((j as isize + o).rem_euclid(n as isize)) as usize];
            (at(2) - 2.0 * at(1) + 2.0 * at(-1) - at(-2)) / (2.0 * h * h * h)
        })
        .collect()
}

/// Residuals of the reduced Willmore equations for a pair `(p, u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLagrangeReport {
    /// Max of `|p_xx u + p u_xx − 2 p_x u_x + 8 u p³|`.
    pub res_el: f64,
    /// Mean of `a(x) = (8p³ + p_xx − p)/u`.
    pub a_const: f64,
    /// Max deviation of `a(x)` from its mean.
    pub a_var: f64,
    /// Max of `|(8p³ + p_xx − p) u_x + (p_x − 24p² p_x − p_xxx) u|`.
    pub res_422: f64,
    /// Pointwise Euler–Lagrange residual.
    pub pointwise: Vec<f64>,
}

fn check_grids(p: &PeriodicProfile, u: &PeriodicProfile) -> Result<()> {
    if p.len() != u.len() || (p.period() - u.period()).abs() > 1e-12 * p.period() {
        return Err(Error::InvalidProfile("p and u must share one grid".into()));
    }
    Ok(())
}

/// Evaluates the reduced Euler–Lagrange equation with second-order central
/// differences, so residuals of exact Willmore data decay as `O(h²)`.
pub fn euler_lagrange_residual(
    p: &PeriodicProfile,
    u: &PeriodicProfile,
) -> Result<EulerLagrangeReport> {
    check_grids(p, u)?;
    let h = p.step();
    let (ps, us) = (p.samples(), u.samples());
    if let Some((index, &value)) = us.iter().enumerate().find(|(_, &v)| v.abs() < 1e-12) {
        return Err(Error::DivisionGuard {
            what: "u",
            value,
            index,
        });
    }
    let px = fd_periodic(ps, h, 1);
    let pxx = fd_periodic(ps, h, 2);
    let pxxx = fd_third(ps, h);
    let ux = fd_periodic(us, h, 1);
    let uxx = fd_periodic(us, h, 2);
    let n = ps.len();
    let pointwise: Vec<f64> = (0..n)
        .map(|j| {
            pxx[j] * us[j] + ps[j] * uxx[j] - 2.0 * px[j] * ux[j] + 8.0 * us[j] * ps[j].powi(3)
        })
        .collect();
    let a: Vec<f64> = (0..n)
        .map(|j| (8.0 * ps[j].powi(3) + pxx[j] - ps[j]) / us[j])
        .collect();
    let a_const = crate::quadrature::neumaier_sum(a.iter().copied()) / n as f64;
    let a_var = a.iter().map(|v| (v - a_const).abs()).fold(0.0, f64::max);
    let res_422 = (0..n)
        .map(|j| {
            ((8.0 * ps[j].powi(3) + pxx[j] - ps[j]) * ux[j]
                + (px[j] - 24.0 * ps[j] * ps[j] * px[j] - pxxx[j]) * us[j])
                .abs()
        })
        .fold(0.0, f64::max);
    let res_el = pointwise.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(EulerLagrangeReport {
        res_el,
        a_const,
        a_var,
        res_422,
        pointwise,
    })
}

/// Reduced Schrödinger residual for `ξ = u/p = 1/H`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerReport {
    /// Max over included nodes.
    pub residual: f64,
    pub excluded: usize,
    pub total: usize,
    /// Pointwise residual; `None` where `|p| ≤ p_floor`.
    pub pointwise: Vec<Option<f64>>,
}

impl SchrodingerReport {
    pub fn excluded_fraction(&self) -> f64 {
        self.excluded as f64 / self.total as f64
    }
}

/// `¼ ξ_xx + (½ (log p)_xx + 2p²) ξ` with `ξ = u/p`, on nodes with
/// `|p| > p_floor`. Derivatives of `ξ` and `log p` are expanded by the
/// chain rule from second-order differences of the smooth `u` and `p`.
pub fn schrodinger_residual(
    p: &PeriodicProfile,
    u: &PeriodicProfile,
    p_floor: f64,
) -> Result<SchrodingerReport> {
    check_grids(p, u)?;
    let h = p.step();
    let (ps, us) = (p.samples(), u.samples());
    let px = fd_periodic(ps, h, 1);
    let pxx = fd_periodic(ps, h, 2);
    let ux = fd_periodic(us, h, 1);
    let uxx = fd_periodic(us, h, 2);
    let n = ps.len();
    let mut excluded = 0;
    let pointwise: Vec<Option<f64>> = (0..n)
        .map(|j| {
            let pj = ps[j];
            if pj.abs() <= p_floor {
                excluded += 1;
                return None;
            }
            let xi = us[j] / pj;
            let xi_xx = uxx[j] / pj - 2.0 * ux[j] * px[j] / (pj * pj) - us[j] * pxx[j] / (pj * pj)
                + 2.0 * us[j] * px[j] * px[j] / pj.powi(3);
            let log_p_xx = pxx[j] / pj - px[j] * px[j] / (pj * pj);
            Some(0.25 * xi_xx + (0.5 * log_p_xx + 2.0 * pj * pj) * xi)
        })
        .collect();
    if 5 * excluded > n {
        return Err(Error::TooManyExcluded { excluded, total: n });
    }
    let residual = pointwise
        .iter()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    Ok(SchrodingerReport {
        residual,
        excluded,
        total: n,
        pointwise,
    })
}

/// Schrödinger potential `V = ½ (log p)_xx + 2p²` of a sign-definite `p`
/// (spectral derivatives).
pub fn schrodinger_potential(p: &PeriodicProfile) -> Result<PeriodicProfile> {
    if let Some((index, &value)) = p.samples().iter().enumerate().find(|(_, &v)| v == 0.0) {
        return Err(Error::DivisionGuard {
            what: "p",
            value,
            index,
        });
    }
    if p.samples()
        .iter()
        .any(|&v| v.signum() != p.samples()[0].signum())
    {
        return Err(Error::Branch);
    }
    let log_p = p.map(|v| v.abs().ln());
    Ok(log_p
        .derivative(2)
        .zip_with(p, |l, v| 0.5 * l + 2.0 * v * v))
}

// ---------------------------------------------------------------------------
// δ₀ obstruction

/// Three evaluations of `δ₀ = ∫ (u − u_xx)/p dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta0 {
    /// `∫ (u − u_xx)/p`
    pub direct: f64,
    /// `∫ u (1/p + p_xx/p² − 2p_x²/p³)`
    pub parts: f64,
    /// `∫ u ((1 − c2)/p − (3/2) c1/p² − 2 c0/p³)`, which is `−2α ∫ u/p³` on the α-family.
    pub closed: f64,
}

impl Delta0 {
    pub fn max_relative_disagreement(&self) -> f64 {
        let vals = [self.direct, self.parts, self.closed];
        let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max((vals[i] - vals[j]).abs() / scale);
            }
        }
        worst
    }
}

/// Repeats `p` `q` times to cover `q` periods.
pub fn tile(p: &PeriodicProfile, q: usize) -> Result<PeriodicProfile> {
    let samples: Vec<f64> = (0..q).flat_map(|_| p.samples().iter().copied()).collect();
    PeriodicProfile::new(samples, p.period() * q as f64)
}

/// δ₀ by the direct, integrated-by-parts and closed forms. `u` may span an
/// integer number of potential periods; derivatives are spectral.
pub fn delta0(profile: &StationaryProfile, u: &PeriodicProfile) -> Result<Delta0> {
    if profile.branch != Branch::SignDefinite {
        return Err(Error::Branch);
    }
    let q = u.len() / profile.p.len();
    if q == 0 || q * profile.p.len() != u.len() {
        return Err(Error::InvalidProfile(
            "u must cover whole periods of p".into(),
        ));
    }
    let p = if q == 1 {
        profile.p.clone()
    } else {
        tile(&profile.p, q)?
    };
    check_grids(&p, u)?;
    let c = profile.coeffs;
    let uxx = u.derivative(2);
    let px = p.derivative(1);
    let pxx = p.derivative(2);
    let (ps, us) = (p.samples(), u.samples());
    let direct = p
        .with_samples(
            (0..ps.len())
                .map(|j| (us[j] - uxx.samples()[j]) / ps[j])
                .collect(),
        )
        .integral();
    let parts = p
        .with_samples(
            (0..ps.len())
                .map(|j| {
                    let pj = ps[j];
                    us[j]
                        * (1.0 / pj + pxx.samples()[j] / (pj * pj)
                            - 2.0 * px.samples()[j].powi(2) / pj.powi(3))
                })
                .collect(),
        )
        .integral();
    let closed = p
        .with_samples(
            (0..ps.len())
                .map(|j| {
                    let pj = ps[j];
                    us[j] * ((1.0 - c.c2) / pj - 1.5 * c.c1 / (pj * pj) - 2.0 * c.c0 / pj.powi(3))
                })
                .collect(),
        )
        .integral();
    Ok(Delta0 {
        direct,
        parts,
        closed,
    })
}

// ---------------------------------------------------------------------------
// Energy bound

/// Energy of the α-family torus by two routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundVerdict {
    pub alpha: f64,
    pub beta: f64,
    pub ksq: f64,
    /// `16π I(β)` from complete elliptic integrals.
    pub w_elliptic: f64,
    /// `8π ∫ p² dx` over one period of the integrated stationary profile.
    pub w_quadrature: f64,
    /// `W > 2π²`
    pub exceeds: bool,
}

impl BoundVerdict {
    pub fn relative_disagreement(&self) -> f64 {
        (self.w_elliptic - self.w_quadrature).abs() / self.w_elliptic.abs()
    }
}

/// Default resolution for stationary α-family profiles.
pub const DEFAULT_PROFILE_N: usize = 1024;

pub fn bound_verdict(alpha: f64, n: usize) -> Result<BoundVerdict> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "bound verdict needs α > 0, got {alpha}"
        )));
    }
    let params = EnergyFamilyParams::new(alpha)?;
    let w_elliptic = family_willmore_energy(&params)?;
    let profile = stationary_profile(QuarticCoeffs::alpha_family(alpha), n)?;
    let w_quadrature = willmore_energy(&profile.p, 1);
    Ok(BoundVerdict {
        alpha,
        beta: params.beta(),
        ksq: params.modulus().ksq(),
        w_elliptic,
        w_quadrature,
        exceeds: w_elliptic > 2.0 * PI * PI && w_quadrature > 2.0 * PI * PI,
    })
}

/// `count` log-spaced values on `[min, max]`.
pub fn log_space(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![min],
        _ => {
            let (a, b) = (min.ln(), max.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Bound verdicts over a log-spaced α grid, in α order.
pub fn bound_sweep(
    alpha_min: f64,
    alpha_max: f64,
    count: usize,
    n: usize,
) -> Result<Vec<BoundVerdict>> {
    log_space(alpha_min, alpha_max, count)
        .into_iter()
        .map(|a| bound_verdict(a, n))
        .collect()
}

/// Writes `alpha,beta,ksq,W_elliptic,W_quadrature,exceeds` rows.
pub fn write_sweep_csv<W: Write>(rows: &[BoundVerdict], mut out: W) -> io::Result<()> {
    writeln!(out, "alpha,beta,ksq,W_elliptic,W_quadrature,exceeds")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_g(r.alpha, 17),
            format_g(r.beta, 17),
            format_g(r.ksq, 17),
            format_g(r.w_elliptic, 17),
            format_g(r.w_quadrature, 17),
            r.exceeds
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Case analysis

/// Result of solving the two coefficient constraints of the `a ≠ 0` case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSplitReport {
    /// Solutions `(c0, c1, c2)`, one per sign of `c1`.
    pub solutions: Vec<QuarticCoeffs>,
    /// Max residual of both constraint pairs over the solutions.
    pub residual: f64,
    /// Coefficient-wise distance of the `c1 > 0` solution to the Clifford quartic.
    pub clifford_distance: f64,
    /// The value of `c2` printed alongside the solution in the source derivation.
    pub printed_c2: f64,
    /// The `a = 0` branch: `c2 = 1, c1 = 0`, `c0 = α` free.
    pub a_zero_branch: QuarticCoeffs,
    pub notes: Vec<String>,
}

/// Solves `c2 = 2, c0 = (4c1² − 1)/16` together with `c1 = c2 d`,
/// `c0 = c1 d / 4`, `d = c1 / (2(c2 − 1))`.
///
/// With `c2 = 2` the relation `c1 = c2 d` holds identically, leaving the
/// scalar equation `g(c1) = (4c1² − 1)/16 − c1²/8 = 0`, solved by bisection
/// on each half-line.
pub fn case_split_check() -> CaseSplitReport {
    let c2 = 2.0;
    let g = |c1: f64| (4.0 * c1 * c1 - 1.0) / 16.0 - c1 * c1 / 8.0;
    let bisect = |mut a: f64, mut b: f64| {
        let ga = g(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m).signum() == ga.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let roots = [bisect(0.0, 2.0), bisect(-2.0, 0.0)];
    let mut residual = 0.0_f64;
    let solutions: Vec<QuarticCoeffs> = roots
        .iter()
        .map(|&c1| {
            let c0 = (4.0 * c1 * c1 - 1.0) / 16.0;
            let d = c1 / (2.0 * (c2 - 1.0));
            residual = residual
                .max((c1 - c2 * d).abs())
                .max((c0 - c1 * d / 4.0).abs());
            QuarticCoeffs { c0, c1, c2 }
        })
        .collect();
    let cl = QuarticCoeffs::clifford();
    let s = solutions[0];
    let clifford_distance = (s.c0 - cl.c0)
        .abs()
        .max((s.c1 - cl.c1).abs())
        .max((s.c2 - cl.c2).abs());
    let printed_c2 = 0.0;
    let notes = vec![
        format!(
            "solver: c2 = {c2}, c1^2 = {:.17}, c0 = {:.17}",
            s.c1 * s.c1,
            s.c0
        ),
        format!(
            "printed derivation lists c2 = {printed_c2}; the constraint system forces c2 = {c2}, \
             which is the value in the Clifford quartic"
        ),
        "c1 < 0 gives the quartic of -p, which induces a mirror-congruent surface".to_string(),
    ];
    CaseSplitReport {
        solutions,
        residual,
        clifford_distance,
        printed_c2,
        a_zero_branch: QuarticCoeffs::alpha_family(0.0),
        notes,
    }
}

/// Largest vertex distance between `a` mirrored in the `X³ = 0` plane and `b`.
pub fn mirror_congruence_defect(a: &SurfaceMesh, b: &SurfaceMesh) -> f64 {
    a.vertices
        .iter()
        .zip(&b.vertices)
        .map(|(va, vb)| {
            let d = [va[0] - vb[0], va[1] - vb[1], -va[2] - vb[2]];
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_closed_forms() {
        let x = 0.5 * PI;
        assert!((clifford_p(x) - 1.0 / (2.0 * SQRT_2 * (SQRT_2 - 1.0))).abs() < 1e-15);
        assert!((clifford_p(x) - 0.853553).abs() < 1e-6);
        assert!((clifford_u(x) - 2.414214).abs() < 1e-6);
        let q = QuarticCoeffs::clifford();
        for j in 0..256 {
            let x = 2.0 * PI * j as f64 / 256.0;
            let d = SQRT_2 - x.sin();
            let px = SQRT_2 * x.cos() / (2.0 * SQRT_2 * d * d); // d/dx [sin/(2√2 D)]
            assert!((px * px - q.q(clifford_p(x))).abs() < 1e-12);
            let rs = clifford_r(x) * clifford_s(x);
            assert!((rs - (SQRT_2 * x.sin() - 1.0) / (2.0 * d * d)).abs() < 1e-13);
            let u = clifford_r(x).powi(2) + clifford_s(x).powi(2);
            assert!((u - clifford_u(x)).abs() < 1e-13);
        }
        assert!(clifford_fixture(64).is_ok());
        // antiperiodic spinor
        assert!((clifford_r(0.3 + 2.0 * PI) + clifford_r(0.3)).abs() < 1e-13);
    }

    #[test]
    fn clifford_immersion_geometry() {
        let p = clifford_immersion(0.0, 0.0);
        assert!(
            (p[0] - SQRT_2).abs() < 1e-15 && p[1].abs() < 1e-15 && (p[2] - SQRT_2).abs() < 1e-15
        );
        for vv in [0.3, 1.2, 2.5, 4.0, 5.5] {
            let ff = fundamental_forms_fd(clifford_immersion, 0.7, vv, 1e-4);
            let d = SQRT_2 - f64::sin(vv);
            assert!((ff.e - 4.0 / (d * d)).abs() < 1e-6);
            assert!(ff.f.abs() < 1e-6);
            assert!((ff.g - 4.0 / (d * d)).abs() < 1e-6);
            let (h, k) = ff.curvatures();
            assert!(
                (h.abs() - clifford_mean_curvature(vv).abs()).abs() < 1e-5,
                "{h}"
            );
            assert!((k - clifford_gaussian_curvature(vv)).abs() < 1e-5, "{k}");
        }
    }

    #[test]
    fn quartic_turning_points() {
        let (lo, hi) = QuarticCoeffs::alpha_family(-1.0 / 32.0)
            .turning_points()
            .unwrap();
        let beta = (1.0_f64 - 0.5).sqrt();
        assert!((lo * lo - (1.0 - beta) / 8.0).abs() < 1e-13);
        assert!((hi * hi - (1.0 + beta) / 8.0).abs() < 1e-13);
        assert_eq!(
            QuarticCoeffs::new(-1.0, 0.0, 0.0).turning_points(),
            Err(Error::NoOscillation)
        );
        assert!(matches!(
            QuarticCoeffs::alpha_family(0.0).turning_points(),
            Err(Error::TurningPointDegenerate { .. })
        ));
    }

    #[test]
    fn case_split_solution() {
        let rep = case_split_check();
        assert!(rep.clifford_distance <= 1e-12);
        assert!(rep.residual <= 1e-12);
        assert!((rep.solutions[1].c1 + FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(rep.a_zero_branch, QuarticCoeffs::new(0.0, 0.0, 1.0));
        assert_eq!(rep.printed_c2, 0.0);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-4, 1e2, 50);
        assert_eq!(v.len(), 50);
        assert!((v[0] - 1e-4).abs() < 1e-18 && (v[49] - 1e2).abs() < 1e-10);
    }

    #[test]
    fn minimal_data_solve_euler_lagrange() {
        let p = PeriodicProfile::zeros(64, 2.0 * PI).unwrap();
        let u = PeriodicProfile::from_fn(64, 2.0 * PI, |x| 2.0 + x.cos()).unwrap();
        assert_eq!(euler_lagrange_residual(&p, &u).unwrap().res_el, 0.0);
    }
}
