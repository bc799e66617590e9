//! Surfaces of revolution: the reduced spinor system
//! `r_x = (λ r + v s)/2`, `s_x = −(v r + λ s)/2`, its monodromy, torus
//! closure, and the induced meshes.
//!
//! Geometry uses `λ = −1` and `v = 4p`, with `ψ1 = r e^{iy/2}`,
//! `ψ2 = s e^{iy/2}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::SurfaceMesh;
use crate::quadrature::trapezoid;
use crate::spectral::{Parity, PeriodicProfile, SpectralGrid};

/// RK4 substeps per profile grid step.
pub const OVERSAMPLING: usize = 8;
/// Spinor norm at which integration aborts.
pub const BLOW_UP_NORM: f64 = 1e8;
/// Largest number of potential periods searched for closure.
pub const MAX_CLOSURE_PERIODS: usize = 16;
/// Relative tolerance for classifying the monodromy matrix.
pub const CLASSIFY_TOL: f64 = 1e-8;
/// Relative endpoint mismatch below which a trajectory counts as closed.
pub const PERIODIC_TOL: f64 = 1e-7;
/// Default mesh resolution around the axis.
pub const DEFAULT_NY: usize = 64;

/// Spectral parameter used for geometry.
pub const GEOMETRIC_LAMBDA: f64 = -1.0;

#[inline]
fn spinor_rhs(lambda: f64, v: f64, y: [f64; 2]) -> [f64; 2] {
    [
        0.5 * (lambda * y[0] + v * y[1]),
        -0.5 * (v * y[0] + lambda * y[1]),
    ]
}

#[inline]
fn rk4(lambda: f64, v0: f64, vh: f64, v1: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = spinor_rhs(lambda, v0, y);
    let k2 = spinor_rhs(lambda, vh, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
    let k3 = spinor_rhs(lambda, vh, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
    let k4 = spinor_rhs(lambda, v1, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Potential resampled on the half-substep grid (`2 * OVERSAMPLING` points
/// per profile step) by band-limited interpolation.
struct FinePotential {
    values: Vec<f64>,
}

impl FinePotential {
    fn new(v: &PeriodicProfile) -> Self {
        Self {
            values: v.refine(2 * OVERSAMPLING),
        }
    }

    #[inline]
    fn at(&self, idx: usize) -> f64 {
        self.values[idx % self.values.len()]
    }
}

/// Integrates from `y0` over `periods` potential periods, returning the
/// samples at every profile node including the final endpoint.
fn integrate_samples(
    v: &PeriodicProfile,
    fine: &FinePotential,
    lambda: f64,
    y0: [f64; 2],
    periods: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = v.len();
    let hf = v.step() / OVERSAMPLING as f64;
    let total = n * periods;
    let mut r = Vec::with_capacity(total + 1);
    let mut s = Vec::with_capacity(total + 1);
    let mut y = y0;
    r.push(y[0]);
    s.push(y[1]);
    for node in 0..total {
        for sub in 0..OVERSAMPLING {
            let m = node * OVERSAMPLING + sub;
            y = rk4(
                lambda,
                fine.at(2 * m),
                fine.at(2 * m + 1),
                fine.at(2 * m + 2),
                y,
                hf,
            );
        }
        let norm = y[0].hypot(y[1]);
        if !(norm <= BLOW_UP_NORM) {
            return Err(Error::BlowUp {
                norm,
                x: (node + 1) as f64 * v.step(),
            });
        }
        r.push(y[0]);
        s.push(y[1]);
    }
    Ok((r, s))
}

/// A sampled real solution `(r, s)` over `periods` potential periods.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorTrajectory {
    potential: PeriodicProfile,
    lambda: f64,
    periods: usize,
    r: Vec<f64>,
    s: Vec<f64>,
    closure_integral: f64,
    endpoint_sign: f64,
    endpoint_mismatch: f64,
}

impl SpinorTrajectory {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn potential(&self) -> &PeriodicProfile {
        &self.potential
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    /// Samples at `x_j = j h`, `j = 0..=periods·N`.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn step(&self) -> f64 {
        self.potential.step()
    }

    /// Length of the trajectory in `x`.
    pub fn length(&self) -> f64 {
        self.periods as f64 * self.potential.period()
    }

    /// Number of grid intervals (`periods·N`).
    pub fn intervals(&self) -> usize {
        self.r.len() - 1
    }

    /// `∫ r s dx` over the whole trajectory (composite trapezoid).
    pub fn closure_integral(&self) -> f64 {
        self.closure_integral
    }

    /// Relative mismatch `|η(end) ∓ η(0)| / |η(0)|`, best sign.
    pub fn endpoint_mismatch(&self) -> f64 {
        self.endpoint_mismatch
    }

    pub fn is_closed(&self) -> bool {
        self.endpoint_mismatch <= PERIODIC_TOL
    }

    /// Parity of `(r, s)` over the trajectory length.
    pub fn parity(&self) -> Parity {
        if self.endpoint_sign > 0.0 {
            Parity::Periodic
        } else {
            Parity::Antiperiodic
        }
    }

    pub fn u(&self) -> Vec<f64> {
        self.r
            .iter()
            .zip(&self.s)
            .map(|(r, s)| r * r + s * s)
            .collect()
    }

    pub fn rs(&self) -> Vec<f64> {
        self.r.iter().zip(&self.s).map(|(r, s)| r * s).collect()
    }

    /// Potential value at trajectory node `j`.
    pub fn v_at(&self, j: usize) -> f64 {
        self.potential.samples()[j % self.potential.len()]
    }

    fn periodic_part(&self, f: &[f64]) -> Result<PeriodicProfile> {
        PeriodicProfile::new(f[..self.intervals()].to_vec(), self.length())
    }

    /// `u = r² + s²` as a periodic profile over the trajectory length.
    pub fn u_profile(&self) -> Result<PeriodicProfile> {
        self.require_closed()?;
        self.periodic_part(&self.u())
    }

    /// `r s` as a periodic profile over the trajectory length.
    pub fn rs_profile(&self) -> Result<PeriodicProfile> {
        self.require_closed()?;
        self.periodic_part(&self.rs())
    }

    fn require_closed(&self) -> Result<()> {
        if self.is_closed() {
            Ok(())
        } else {
            Err(Error::NotPeriodic {
                mismatch: self.endpoint_mismatch,
            })
        }
    }

    /// First and second derivatives of a node function (length
    /// `intervals + 1`), with the node indices where they are valid.
    ///
    /// Closed trajectories of periodic functions use spectral derivatives on
    /// every node; otherwise fourth-order central differences on interior
    /// nodes.
    fn derivatives(&self, f: &[f64]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        let l = self.intervals();
        let h = self.step();
        if self.is_closed() {
            let grid = SpectralGrid::new(l, self.length());
            let d1 = grid.derivative(&f[..l], 1);
            let d2 = grid.derivative(&f[..l], 2);
            ((0..l).collect(), d1, d2)
        } else {
            let mut d1 = vec![0.0; l + 1];
            let mut d2 = vec![0.0; l + 1];
            let idx: Vec<usize> = (2..=l.saturating_sub(2)).collect();
            for &i in &idx {
                d1[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
                d2[i] = (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2])
                    / (12.0 * h * h);
            }
            (idx, d1, d2)
        }
    }
}

/// Integrates the spinor system from `(r0, s0)` at `x = 0` over `periods`
/// periods of `v`: RK4 with `OVERSAMPLING` substeps per grid step, `v`
/// interpolated spectrally between nodes.
pub fn integrate_spinor(
    v: &PeriodicProfile,
    lambda: f64,
    r0: f64,
    s0: f64,
    periods: usize,
) -> Result<SpinorTrajectory> {
    if r0 == 0.0 && s0 == 0.0 {
        return Err(Error::Domain("initial spinor must be nonzero".into()));
    }
    if periods == 0 {
        return Err(Error::Domain("need at least one period".into()));
    }
    let fine = FinePotential::new(v);
    let (r, s) = integrate_samples(v, &fine, lambda, [r0, s0], periods)?;
    let rs: Vec<f64> = r.iter().zip(&s).map(|(a, b)| a * b).collect();
    let closure_integral = trapezoid(&rs, v.step());
    let l = r.len() - 1;
    let norm0 = r0.hypot(s0);
    let plus = (r[l] - r0).hypot(s[l] - s0) / norm0;
    let minus = (r[l] + r0).hypot(s[l] + s0) / norm0;
    let (endpoint_sign, endpoint_mismatch) = if plus <= minus {
        (1.0, plus)
    } else {
        (-1.0, minus)
    };
    Ok(SpinorTrajectory {
        potential: v.clone(),
        lambda,
        periods,
        r,
        s,
        closure_integral,
        endpoint_sign,
        endpoint_mismatch,
    })
}

/// Trace-based classification of a 2×2 monodromy matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonodromyClass {
    Identity,
    MinusIdentity,
    /// `|tr| < 2`: multipliers `e^{±i angle}`.
    EllipticRotation {
        angle: f64,
    },
    /// `|tr| > 2`: real multipliers off the unit circle.
    Hyperbolic {
        trace: f64,
    },
    /// `tr = ±2` with a nontrivial Jordan block; `sign` is the double multiplier.
    Parabolic {
        sign: f64,
    },
}

/// Transfer matrix of the spinor system over one potential period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub m: [[f64; 2]; 2],
    pub class: MonodromyClass,
}

fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

impl Monodromy {
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        let trace = m[0][0] + m[1][1];
        let scale = m.iter().flatten().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        let tol = CLASSIFY_TOL * scale;
        let class = if (trace.abs() - 2.0).abs() <= tol {
            let sign = trace.signum();
            let off = (m[0][0] - sign)
                .abs()
                .max((m[1][1] - sign).abs())
                .max(m[0][1].abs())
                .max(m[1][0].abs());
            match (off <= tol, sign > 0.0) {
                (true, true) => MonodromyClass::Identity,
                (true, false) => MonodromyClass::MinusIdentity,
                (false, _) => MonodromyClass::Parabolic { sign },
            }
        } else if trace.abs() < 2.0 {
            MonodromyClass::EllipticRotation {
                angle: (0.5 * trace).acos(),
            }
        } else {
            MonodromyClass::Hyperbolic { trace }
        };
        Self { m, class }
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn power(&self, q: usize) -> [[f64; 2]; 2] {
        let mut out = [[1.0, 0.0], [0.0, 1.0]];
        for _ in 0..q {
            out = matmul(&out, &self.m);
        }
        out
    }

    pub fn apply(&self, eta: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * eta[0] + self.m[0][1] * eta[1],
            self.m[1][0] * eta[0] + self.m[1][1] * eta[1],
        ]
    }

    /// Smallest `q ≤ MAX_CLOSURE_PERIODS` with `M^q η0 = ±η0` (relative
    /// tolerance `tol`), and the sign. The sign flip leaves every quadratic
    /// integrand of the surface unchanged, so both signs close the surface.
    pub fn closing_periods(&self, eta0: [f64; 2], tol: f64) -> Option<(usize, f64)> {
        let norm = eta0[0].hypot(eta0[1]);
        let mut eta = eta0;
        for q in 1..=MAX_CLOSURE_PERIODS {
            eta = self.apply(eta);
            for sign in [1.0, -1.0] {
                let d = (eta[0] - sign * eta0[0]).hypot(eta[1] - sign * eta0[1]);
                if d <= tol * norm {
                    return Some((q, sign));
                }
            }
        }
        None
    }
}

/// Monodromy over one period: the basis solutions `(1,0)` and `(0,1)`
/// integrated with the same scheme as [`integrate_spinor`].
pub fn monodromy(v: &PeriodicProfile, lambda: f64) -> Result<Monodromy> {
    let fine = FinePotential::new(v);
    let n = v.len();
    let (r1, s1) = integrate_samples(v, &fine, lambda, [1.0, 0.0], 1)?;
    let (r2, s2) = integrate_samples(v, &fine, lambda, [0.0, 1.0], 1)?;
    Ok(Monodromy::from_matrix([[r1[n], r2[n]], [s1[n], s2[n]]]))
}

/// Outcome of the closure test on a periodic trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosureVerdict {
    Torus,
    /// Axial pitch `X³(end) − X³(0) = −4 ∫ r s dx` per trajectory length.
    Cylinder {
        pitch: f64,
    },
}

/// Default closure tolerance `1e-7 · length · max|rs|`.
pub fn default_closure_tol(traj: &SpinorTrajectory) -> f64 {
    let max_rs = traj.rs().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-7 * traj.length() * max_rs
}

/// Torus iff `|∫ r s dx| ≤ tol` over a closed trajectory.
pub fn torus_closure_test(traj: &SpinorTrajectory, tol: Option<f64>) -> Result<ClosureVerdict> {
    traj.require_closed()?;
    let tol = tol.unwrap_or_else(|| default_closure_tol(traj));
    if traj.closure_integral.abs() <= tol {
        Ok(ClosureVerdict::Torus)
    } else {
        Ok(ClosureVerdict::Cylinder {
            pitch: -4.0 * traj.closure_integral,
        })
    }
}

/// Max-norm of `v·√(λ²u² − u_x²) − (λ²u − u_xx)` along the trajectory.
///
/// The root is taken with the sign of `−λ r s`: from the pointwise
/// identities, `λ²u − u_xx = −2λ v r s` while `√(λ²u² − u_x²) = 2|λ r s|`, so
/// the unsigned root only holds where `−λ r s > 0`.
pub fn metric_identity_residual(traj: &SpinorTrajectory) -> Result<f64> {
    let lambda = traj.lambda;
    let u = traj.u();
    let rs = traj.rs();
    let (idx, ux, uxx) = traj.derivatives(&u);
    let scale = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst = 0.0_f64;
    for &j in &idx {
        let disc = lambda * lambda * u[j] * u[j] - ux[j] * ux[j];
        if disc < -1e-6 * scale * scale {
            return Err(Error::SqrtDomain {
                value: disc,
                index: j,
            });
        }
        let root = disc.max(0.0).sqrt() * (-lambda * rs[j]).signum();
        let res = traj.v_at(j) * root - (lambda * lambda * u[j] - uxx[j]);
        worst = worst.max(res.abs());
    }
    Ok(worst)
}

/// Residuals of the three pointwise identities
/// `(rs)_x = −(v/2)(r² − s²)`, `(r² + s²)_x = λ(r² − s²)`,
/// `(r² − s²)_x = λ(r² + s²) + 2v rs`.
pub fn derivative_identity_residuals(traj: &SpinorTrajectory) -> [f64; 3] {
    let lambda = traj.lambda;
    let rs = traj.rs();
    let u = traj.u();
    let w: Vec<f64> = traj
        .r
        .iter()
        .zip(&traj.s)
        .map(|(r, s)| r * r - s * s)
        .collect();
    let (idx, rs_x, _) = traj.derivatives(&rs);
    let (_, u_x, _) = traj.derivatives(&u);
    let (_, w_x, _) = traj.derivatives(&w);
    let mut out = [0.0_f64; 3];
    for &j in &idx {
        let v = traj.v_at(j);
        out[0] = out[0].max((rs_x[j] + 0.5 * v * w[j]).abs());
        out[1] = out[1].max((u_x[j] - lambda * w[j]).abs());
        out[2] = out[2].max((w_x[j] - lambda * u[j] - 2.0 * v * rs[j]).abs());
    }
    out
}

/// `W = 8π ∫ p² dx` over `q_periods` periods, and the same energy through
/// `v = 4p` as `(π/2) ∫ v² dx`.
pub fn willmore_energy_routes(p: &PeriodicProfile, q_periods: usize) -> (f64, f64) {
    let q = q_periods as f64;
    let p_form = 8.0 * PI * q * p.map(|x| x * x).integral();
    let v_form = 0.5 * PI * q * p.map(|x| 16.0 * x * x).integral();
    (p_form, v_form)
}

/// Willmore energy `8π ∫ p² dx` of the torus over `q_periods` periods.
pub fn willmore_energy(p: &PeriodicProfile, q_periods: usize) -> f64 {
    let (p_form, v_form) = willmore_energy_routes(p, q_periods);
    debug_assert!((p_form - v_form).abs() <= 1e-12 * p_form.abs().max(1e-300));
    p_form
}

/// Positive periodic density from a complex Floquet solution on the unit
/// circle (elliptic monodromy): `u = |r|² + |s|²`, `w = Re(r s̄)`.
///
/// These obey the same pointwise identities as `r² + s²` and `rs` of a real
/// solution and are periodic even when no real solution closes.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetDensity {
    pub u: PeriodicProfile,
    pub w: PeriodicProfile,
    pub angle: f64,
}

impl FloquetDensity {
    pub fn closure_integral(&self) -> f64 {
        self.w.integral()
    }
}

pub fn floquet_density(v: &PeriodicProfile, lambda: f64) -> Result<FloquetDensity> {
    let mono = monodromy(v, lambda)?;
    let angle = match mono.class {
        MonodromyClass::EllipticRotation { angle } => angle,
        other => {
            return Err(Error::Unsupported(format!(
                "Floquet density needs elliptic monodromy, got {other:?}"
            )))
        }
    };
    let mu = Complex64::from_polar(1.0, angle);
    let m = mono.m;
    let (a, b) = if m[0][1].abs() >= m[1][0].abs() {
        (Complex64::new(m[0][1], 0.0), mu - m[0][0])
    } else {
        (mu - m[1][1], Complex64::new(m[1][0], 0.0))
    };
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let fine = FinePotential::new(v);
    let n = v.len();
    let (ra, sa) = integrate_samples(v, &fine, lambda, [a.re, b.re], 1)?;
    let (rb, sb) = integrate_samples(v, &fine, lambda, [a.im, b.im], 1)?;
    let u: Vec<f64> = (0..n)
        .map(|j| ra[j] * ra[j] + sa[j] * sa[j] + rb[j] * rb[j] + sb[j] * sb[j])
        .collect();
    let w: Vec<f64> = (0..n).map(|j| ra[j] * sa[j] + rb[j] * sb[j]).collect();
    Ok(FloquetDensity {
        u: v.with_samples(u),
        w: v.with_samples(w),
        angle,
    })
}

/// Surface of revolution induced by a closed trajectory at `λ = −1`.
///
/// The one-forms of the Weierstrass integrals are integrated along `x` at
/// `y = 0`, then along `y`, each leg by termwise integration of the Fourier
/// series of the periodic integrand. The integration constant
/// of `X¹ + iX²` puts the rotation axis through the origin; `X³(0, 0) = 0`.
pub fn build_revolution_mesh(traj: &SpinorTrajectory, ny: usize) -> Result<SurfaceMesh> {
    if ny < 8 {
        return Err(Error::Domain(format!("mesh needs ny >= 8, got {ny}")));
    }
    if traj.lambda != GEOMETRIC_LAMBDA {
        return Err(Error::Domain("revolution meshes require λ = −1".into()));
    }
    traj.require_closed()?;
    let nx = traj.intervals();
    let hx = traj.step();
    let hy = 2.0 * PI / ny as f64;

    // x-leg at y = 0: ψ1 = r, ψ2 = s.
    let dz_dx: Vec<Complex64> = (0..nx)
        .map(|i| Complex64::new(0.0, 2.0) * (traj.r[i] * traj.r[i] - traj.s[i] * traj.s[i]))
        .collect();
    let dx3_dx: Vec<Complex64> = (0..nx)
        .map(|i| Complex64::new(-4.0 * traj.r[i] * traj.s[i], 0.0))
        .collect();
    let xgrid = SpectralGrid::new(nx, traj.length());
    let zx = spectral_cumulative(&xgrid, &dz_dx, hx);
    let x3 = spectral_cumulative(&xgrid, &dx3_dx, hx);
    let u = traj.u();
    let z0 = Complex64::new(0.0, 2.0 * u[0] / traj.lambda);

    let mut vertices = Vec::with_capacity(nx * ny);
    let mut u_out = Vec::with_capacity(nx * ny);
    let mut h_out = Vec::with_capacity(nx * ny);
    let mut k_out = Vec::with_capacity(nx * ny);
    let u_prof = traj.u_profile()?;
    let log_u_xx = u_prof.map(f64::ln).derivative(2);
    let ygrid = SpectralGrid::new(ny, 2.0 * PI);
    for i in 0..nx {
        let (r, s) = (traj.r[i], traj.s[i]);
        let base = z0 + zx[i];
        // y-leg: dZ = −2(ψ̄1² + ψ̄2²) dy, dX³ = 4 Im(ψ2 ψ̄1) dy
        let dz_dy: Vec<Complex64> = (0..ny)
            .map(|j| {
                let phase = Complex64::from_polar(1.0, 0.5 * j as f64 * hy);
                let (p1, p2) = (r * phase, s * phase);
                -2.0 * (p1.conj() * p1.conj() + p2.conj() * p2.conj())
            })
            .collect();
        let dx3_dy: Vec<f64> = (0..ny)
            .map(|j| {
                let phase = Complex64::from_polar(1.0, 0.5 * j as f64 * hy);
                4.0 * (s * phase * (r * phase).conj()).im
            })
            .collect();
        let zy = spectral_cumulative(&ygrid, &dz_dy, hy);
        let x3y = spectral_cumulative(
            &ygrid,
            &dx3_dy
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect::<Vec<_>>(),
            hy,
        );
        let ui = u[i];
        let hi = traj.v_at(i) / (4.0 * ui);
        let ki = -log_u_xx.samples()[i] / (4.0 * ui * ui);
        for j in 0..ny {
            let z = base + zy[j];
            vertices.push([z.re, z.im, x3[i].re + x3y[j].re]);
            u_out.push(ui);
            h_out.push(hi);
            k_out.push(ki);
        }
    }
    Ok(SurfaceMesh {
        nx,
        ny,
        hx,
        hy,
        vertices,
        u: u_out,
        mean_curvature: h_out,
        gaussian_curvature: k_out,
    })
}

/// `∫_0^{y_j} f` for periodic samples on `y_j = j h`, exact for trigonometric
/// polynomials resolved by the grid.
fn spectral_cumulative(grid: &SpectralGrid, f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut spec = grid.forward_complex(f);
    let mean = spec[0] / n as f64;
    spec[0] = Complex64::new(0.0, 0.0);
    for (j, c) in spec.iter_mut().enumerate().skip(1) {
        *c = if grid.is_nyquist(j) {
            Complex64::new(0.0, 0.0)
        } else {
            *c / Complex64::new(0.0, grid.wavenumber(j))
        };
    }
    let g = grid.inverse_complex(spec);
    let g0 = g[0];
    g.into_iter()
        .enumerate()
        .map(|(j, v)| v - g0 + mean * (j as f64 * h))
        .collect()
}

/// Rotational-symmetry defects of a revolution mesh: the spread over `y` of
/// `X³` and of `ρ = |X¹ + iX²|`, maximised over `x`.
pub fn revolution_defects(mesh: &SurfaceMesh) -> (f64, f64) {
    let mut x3_defect = 0.0_f64;
    let mut rho_defect = 0.0_f64;
    for i in 0..mesh.nx {
        let (mut x3_lo, mut x3_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut rho_lo, mut rho_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for j in 0..mesh.ny {
            let p = mesh.vertex(i, j);
            let rho = p[0].hypot(p[1]);
            x3_lo = x3_lo.min(p[2]);
            x3_hi = x3_hi.max(p[2]);
            rho_lo = rho_lo.min(rho);
            rho_hi = rho_hi.max(rho);
        }
        x3_defect = x3_defect.max(x3_hi - x3_lo);
        rho_defect = rho_defect.max(rho_hi - rho_lo);
    }
    (x3_defect, rho_defect)
}

/// Profile curve `(ρ, X³)` of a revolution mesh at `y = 0`.
pub fn profile_curve(mesh: &SurfaceMesh) -> Vec<(f64, f64)> {
    (0..mesh.nx)
        .map(|i| {
            let p = mesh.vertex(i, 0);
            (p[0].hypot(p[1]), p[2])
        })
        .collect()
}
