//! Generalized Weierstrass inducing on a rectangular patch: checks of the
//! Dirac system and closedness of the inducing forms, integration to a
//! surface patch, induced geometry, and the Kenmotsu data.
//!
//! Grids are non-periodic with inclusive endpoints; node `(i, j)` sits at
//! `x0 + i hx, y0 + j hy` and is stored at `i * ny + j`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::neumaier_sum;
use crate::willmore::{clifford_p, clifford_r, clifford_s};

/// Smallest conformal factor accepted as a regular immersion.
pub const U_MIN: f64 = 1e-10;
/// Smallest grid side for the central stencils.
pub const MIN_SIDE: usize = 5;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain(format!(
                "empty rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
}

impl Grid {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.nx - 1).flat_map(move |i| (1..self.ny - 1).map(move |j| (i, j)))
    }

    /// Second-order derivative along one axis; one-sided stencils at the ends.
    fn diff<T>(&self, f: &[T], axis: usize, order: u32) -> Vec<T>
    where
        T: Copy
            + std::ops::Add<Output = T>
            + std::ops::Sub<Output = T>
            + std::ops::Mul<f64, Output = T>,
    {
        let (len, h) = if axis == 0 {
            (self.nx, self.hx)
        } else {
            (self.ny, self.hy)
        };
        let at = |i: usize, j: usize, k: usize| {
            if axis == 0 {
                f[self.idx(k, j)]
            } else {
                f[self.idx(i, k)]
            }
        };
        let mut out = f.to_vec();
        for i in 0..self.nx {
            for j in 0..self.ny {
                let k = if axis == 0 { i } else { j };
                let g = |m: usize| at(i, j, m);
                let d = match order {
                    1 if k == 0 => (g(1) * 4.0 - g(0) * 3.0 - g(2)) * (0.5 / h),
                    1 if k == len - 1 => (g(k) * 3.0 - g(k - 1) * 4.0 + g(k - 2)) * (0.5 / h),
                    1 => (g(k + 1) - g(k - 1)) * (0.5 / h),
                    _ if k == 0 => (g(0) * 2.0 - g(1) * 5.0 + g(2) * 4.0 - g(3)) * (1.0 / (h * h)),
                    _ if k == len - 1 => {
                        (g(k) * 2.0 - g(k - 1) * 5.0 + g(k - 2) * 4.0 - g(k - 3)) * (1.0 / (h * h))
                    }
                    _ => (g(k + 1) - g(k) * 2.0 + g(k - 1)) * (1.0 / (h * h)),
                };
                out[self.idx(i, j)] = d;
            }
        }
        out
    }

    /// `∂z = (∂x − i∂y)/2`
    fn dz(&self, f: &[Complex64]) -> Vec<Complex64> {
        let fx = self.diff(f, 0, 1);
        let fy = self.diff(f, 1, 1);
        fx.iter().zip(&fy).map(|(a, b)| 0.5 * (a - I * b)).collect()
    }

    /// `∂z̄ = (∂x + i∂y)/2`
    fn dzbar(&self, f: &[Complex64]) -> Vec<Complex64> {
        let fx = self.diff(f, 0, 1);
        let fy = self.diff(f, 1, 1);
        fx.iter().zip(&fy).map(|(a, b)| 0.5 * (a + I * b)).collect()
    }
}

/// Samples of `(ψ1, ψ2, p)` on a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField2D {
    rect: Rect,
    grid: Grid,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub p: Vec<f64>,
}

impl SpinorField2D {
    pub fn new(
        rect: Rect,
        nx: usize,
        ny: usize,
        psi1: Vec<Complex64>,
        psi2: Vec<Complex64>,
        p: Vec<f64>,
    ) -> Result<Self> {
        if nx.min(ny) < MIN_SIDE {
            return Err(Error::GridTooSmall {
                min: MIN_SIDE,
                got: nx.min(ny),
            });
        }
        let n = nx * ny;
        if psi1.len() != n || psi2.len() != n || p.len() != n {
            return Err(Error::InvalidProfile(format!(
                "expected {n} samples per component"
            )));
        }
        if !p.iter().all(|v| v.is_finite())
            || !psi1
                .iter()
                .chain(&psi2)
                .all(|c| c.re.is_finite() && c.im.is_finite())
        {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        let grid = Grid {
            nx,
            ny,
            hx: (rect.x1 - rect.x0) / (nx - 1) as f64,
            hy: (rect.y1 - rect.y0) / (ny - 1) as f64,
        };
        Ok(Self {
            rect,
            grid,
            psi1,
            psi2,
            p,
        })
    }

    /// Samples `f(x, y) = (ψ1, ψ2, p)` at every node.
    pub fn from_fn<F>(rect: Rect, nx: usize, ny: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> (Complex64, Complex64, f64),
    {
        let hx = (rect.x1 - rect.x0) / nx.saturating_sub(1).max(1) as f64;
        let hy = (rect.y1 - rect.y0) / ny.saturating_sub(1).max(1) as f64;
        let mut psi1 = Vec::with_capacity(nx * ny);
        let mut psi2 = Vec::with_capacity(nx * ny);
        let mut p = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                let (a, b, c) = f(rect.x0 + i as f64 * hx, rect.y0 + j as f64 * hy);
                psi1.push(a);
                psi2.push(b);
                p.push(c);
            }
        }
        Self::new(rect, nx, ny, psi1, psi2, p)
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn nx(&self) -> usize {
        self.grid.nx
    }

    pub fn ny(&self) -> usize {
        self.grid.ny
    }

    pub fn hx(&self) -> f64 {
        self.grid.hx
    }

    pub fn hy(&self) -> f64 {
        self.grid.hy
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        self.grid.idx(i, j)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.rect.x0 + i as f64 * self.grid.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.rect.y0 + j as f64 * self.grid.hy
    }

    /// `|ψ1|² + |ψ2|²`
    pub fn u(&self) -> Vec<f64> {
        self.psi1
            .iter()
            .zip(&self.psi2)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }
}

/// `ψ1 = 1, ψ2 = z, p = 0`: inducing data of Enneper's surface.
pub fn minimal_fixture(rect: Rect, nx: usize, ny: usize) -> Result<SpinorField2D> {
    SpinorField2D::from_fn(rect, nx, ny, |x, y| {
        (Complex64::new(1.0, 0.0), Complex64::new(x, y), 0.0)
    })
}

/// Clifford torus data `ψ1 = r(x) e^{iy/2}`, `ψ2 = s(x) e^{iy/2}`, `p = p(x)`.
pub fn clifford_fixture_2d(rect: Rect, nx: usize, ny: usize) -> Result<SpinorField2D> {
    SpinorField2D::from_fn(rect, nx, ny, |x, y| {
        let phase = Complex64::from_polar(1.0, 0.5 * y);
        (clifford_r(x) * phase, clifford_s(x) * phase, clifford_p(x))
    })
}

fn max_interior(grid: &Grid, values: impl Fn(usize) -> f64) -> f64 {
    grid.interior()
        .map(|(i, j)| values(grid.idx(i, j)))
        .fold(0.0, f64::max)
}

/// Max over interior nodes of `|ψ1_z − p ψ2|` and `|ψ2_z̄ + p ψ1|`.
pub fn dirac_residual(field: &SpinorField2D) -> f64 {
    let g = &field.grid;
    let d1 = g.dz(&field.psi1);
    let d2 = g.dzbar(&field.psi2);
    max_interior(g, |k| {
        (d1[k] - field.p[k] * field.psi2[k])
            .norm()
            .max((d2[k] + field.p[k] * field.psi1[k]).norm())
    })
}

/// Interior max-norms of the three closedness combinations
/// `∂z̄(ψ̄1²) + ∂z(ψ̄2²)`, `∂z̄(ψ2²) + ∂z(ψ1²)`, `∂z̄(ψ2 ψ̄1) − ∂z(ψ1 ψ̄2)`.
pub fn closedness_residuals(field: &SpinorField2D) -> [f64; 3] {
    let g = &field.grid;
    let (a, b) = (&field.psi1, &field.psi2);
    let map = |f: &dyn Fn(usize) -> Complex64| (0..a.len()).map(f).collect::<Vec<_>>();
    let a_bar_sq = map(&|k| a[k].conj() * a[k].conj());
    let b_bar_sq = map(&|k| b[k].conj() * b[k].conj());
    let a_sq = map(&|k| a[k] * a[k]);
    let b_sq = map(&|k| b[k] * b[k]);
    let b_a_bar = map(&|k| b[k] * a[k].conj());
    let a_b_bar = map(&|k| a[k] * b[k].conj());
    let (t1, t2) = (g.dzbar(&a_bar_sq), g.dz(&b_bar_sq));
    let (t3, t4) = (g.dzbar(&b_sq), g.dz(&a_sq));
    let (t5, t6) = (g.dzbar(&b_a_bar), g.dz(&a_b_bar));
    [
        max_interior(g, |k| (t1[k] + t2[k]).norm()),
        max_interior(g, |k| (t3[k] + t4[k]).norm()),
        max_interior(g, |k| (t5[k] - t6[k]).norm()),
    ]
}

pub fn closedness_residual(field: &SpinorField2D) -> f64 {
    closedness_residuals(field).into_iter().fold(0.0, f64::max)
}

/// Coordinates and induced geometry of a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub x3: Vec<f64>,
    /// Conformal factor; empty until [`induced_geometry`] runs.
    pub u: Vec<f64>,
    pub mean_curvature: Vec<f64>,
    pub gaussian_curvature: Vec<f64>,
    /// Max coordinate difference between the row-first and column-first paths.
    pub path_independence_defect: f64,
    /// Max relative deviation of the differenced first fundamental form from
    /// `4u²(dx² + dy²)` over interior nodes.
    pub metric_defect: Option<f64>,
}

impl SurfacePatch {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        let k = self.index(i, j);
        [self.x1[k], self.x2[k], self.x3[k]]
    }

    /// Patch moved by `offset`.
    pub fn translated(mut self, offset: [f64; 3]) -> Self {
        for k in 0..self.x1.len() {
            self.x1[k] += offset[0];
            self.x2[k] += offset[1];
            self.x3[k] += offset[2];
        }
        self
    }
}

/// Trapezoid integral from node `base` to every node of a line.
fn line_integral(values: &[Complex64], h: f64, base: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    for k in base + 1..values.len() {
        out[k] = out[k - 1] + 0.5 * h * (values[k - 1] + values[k]);
    }
    for k in (0..base).rev() {
        out[k] = out[k + 1] - 0.5 * h * (values[k] + values[k + 1]);
    }
    out
}

/// Integrates `(X¹ + iX², X³)` along axis-aligned two-leg paths.
///
/// For a form `A dz + B dz̄` the integrand is `A + B` along `x` and
/// `i(A − B)` along `y`.
fn integrate_path(
    field: &SpinorField2D,
    base: (usize, usize),
    row_first: bool,
) -> (Vec<Complex64>, Vec<f64>) {
    let g = &field.grid;
    let (a, b) = (&field.psi1, &field.psi2);
    let n = a.len();
    // X¹ + iX²: A = 2i ψ̄1², B = −2i ψ̄2²;  X³: A = −2 ψ2 ψ̄1, B = −2 ψ1 ψ̄2
    let za: Vec<Complex64> = (0..n)
        .map(|k| 2.0 * I * a[k].conj() * a[k].conj())
        .collect();
    let zb: Vec<Complex64> = (0..n)
        .map(|k| -2.0 * I * b[k].conj() * b[k].conj())
        .collect();
    let wa: Vec<Complex64> = (0..n).map(|k| -2.0 * b[k] * a[k].conj()).collect();
    let wb: Vec<Complex64> = (0..n).map(|k| -2.0 * a[k] * b[k].conj()).collect();
    let along_x = |k: usize| (za[k] + zb[k], wa[k] + wb[k]);
    let along_y = |k: usize| (I * (za[k] - zb[k]), I * (wa[k] - wb[k]));

    let row = |j: usize| -> (Vec<Complex64>, Vec<Complex64>) {
        let (z, w): (Vec<_>, Vec<_>) = (0..g.nx).map(|i| along_x(g.idx(i, j))).unzip();
        (
            line_integral(&z, g.hx, base.0),
            line_integral(&w, g.hx, base.0),
        )
    };
    let col = |i: usize| -> (Vec<Complex64>, Vec<Complex64>) {
        let (z, w): (Vec<_>, Vec<_>) = (0..g.ny).map(|j| along_y(g.idx(i, j))).unzip();
        (
            line_integral(&z, g.hy, base.1),
            line_integral(&w, g.hy, base.1),
        )
    };

    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![0.0; n];
    if row_first {
        let (z0, w0) = row(base.1);
        for i in 0..g.nx {
            let (zc, wc) = col(i);
            for j in 0..g.ny {
                z[g.idx(i, j)] = z0[i] + zc[j];
                w[g.idx(i, j)] = (w0[i] + wc[j]).re;
            }
        }
    } else {
        let (z0, w0) = col(base.0);
        for j in 0..g.ny {
            let (zr, wr) = row(j);
            for i in 0..g.nx {
                z[g.idx(i, j)] = z0[j] + zr[i];
                w[g.idx(i, j)] = (w0[j] + wr[i]).re;
            }
        }
    }
    (z, w)
}

/// Integrates the inducing forms from `base` (where `X = 0`) along the
/// row-first path, reporting the discrepancy with the column-first path.
/// Fields whose Dirac residual exceeds `dirac_tol` are rejected.
pub fn integrate_patch(
    field: &SpinorField2D,
    base: (usize, usize),
    dirac_tol: f64,
) -> Result<SurfacePatch> {
    let g = &field.grid;
    if base.0 >= g.nx || base.1 >= g.ny {
        return Err(Error::Domain(format!(
            "basepoint {base:?} outside the grid"
        )));
    }
    let residual = dirac_residual(field);
    if !(residual <= dirac_tol) {
        return Err(Error::NotASolution {
            residual,
            tol: dirac_tol,
        });
    }
    let (z, w) = integrate_path(field, base, true);
    let (z2, w2) = integrate_path(field, base, false);
    let defect = (0..z.len())
        .map(|k| (z[k] - z2[k]).norm().max((w[k] - w2[k]).abs()))
        .fold(0.0, f64::max);
    Ok(SurfacePatch {
        nx: g.nx,
        ny: g.ny,
        hx: g.hx,
        hy: g.hy,
        x1: z.iter().map(|c| c.re).collect(),
        x2: z.iter().map(|c| c.im).collect(),
        x3: w,
        u: vec![],
        mean_curvature: vec![],
        gaussian_curvature: vec![],
        path_independence_defect: defect,
        metric_defect: None,
    })
}

/// Fills `u`, `H = p/u` and `K = −Δ log u / (4u²)`, and compares the
/// differenced first fundamental form of the patch with `4u²(dx² + dy²)`.
pub fn induced_geometry(field: &SpinorField2D, patch: SurfacePatch) -> Result<SurfacePatch> {
    let g = &field.grid;
    if patch.nx != g.nx || patch.ny != g.ny {
        return Err(Error::Domain("patch and field grids differ".into()));
    }
    let u = field.u();
    for i in 0..g.nx {
        for j in 0..g.ny {
            let uk = u[g.idx(i, j)];
            if !(uk >= U_MIN) {
                return Err(Error::DegenerateImmersion { u: uk, i, j });
            }
        }
    }
    let log_u: Vec<f64> = u.iter().map(|v| v.ln()).collect();
    let lap: Vec<f64> = g
        .diff(&log_u, 0, 2)
        .iter()
        .zip(g.diff(&log_u, 1, 2))
        .map(|(a, b)| a + b)
        .collect();
    let mean_curvature: Vec<f64> = field.p.iter().zip(&u).map(|(p, u)| p / u).collect();
    let gaussian_curvature: Vec<f64> = lap
        .iter()
        .zip(&u)
        .map(|(l, u)| -l / (4.0 * u * u))
        .collect();

    let coords = [&patch.x1, &patch.x2, &patch.x3];
    let dx: Vec<Vec<f64>> = coords.iter().map(|c| g.diff(c, 0, 1)).collect();
    let dy: Vec<Vec<f64>> = coords.iter().map(|c| g.diff(c, 1, 1)).collect();
    let metric_defect = max_interior(g, |k| {
        let e: f64 = (0..3).map(|c| dx[c][k] * dx[c][k]).sum();
        let f: f64 = (0..3).map(|c| dx[c][k] * dy[c][k]).sum();
        let gg: f64 = (0..3).map(|c| dy[c][k] * dy[c][k]).sum();
        let target = 4.0 * u[k] * u[k];
        (e - target).abs().max((gg - target).abs()).max(f.abs()) / target
    });
    Ok(SurfacePatch {
        u,
        mean_curvature,
        gaussian_curvature,
        metric_defect: Some(metric_defect),
        ..patch
    })
}

/// `(4 ∬ p² dx dy, ∬ H² 4u² dx dy)` by the 2D trapezoid rule.
pub fn willmore_density_integrals(field: &SpinorField2D, patch: &SurfacePatch) -> (f64, f64) {
    let g = &field.grid;
    let weight = |i: usize, j: usize| {
        let wx = if i == 0 || i == g.nx - 1 { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == g.ny - 1 { 0.5 } else { 1.0 };
        wx * wy * g.hx * g.hy
    };
    let nodes = || (0..g.nx).flat_map(|i| (0..g.ny).map(move |j| (i, j)));
    let from_p =
        4.0 * neumaier_sum(nodes().map(|(i, j)| weight(i, j) * field.p[g.idx(i, j)].powi(2)));
    let from_h = neumaier_sum(nodes().map(|(i, j)| {
        let k = g.idx(i, j);
        weight(i, j) * patch.mean_curvature[k].powi(2) * 4.0 * patch.u[k].powi(2)
    }));
    (from_p, from_h)
}

/// Kenmotsu data `f = i ψ̄1/ψ2`, `φ = i ψ2²` with consistency checks.
#[derive(Debug, Clone, PartialEq)]
pub struct KenmotsuData {
    pub f: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    /// Interior max of `|(log φ)_z̄ + 2 f̄ f_z̄ / (1 + |f|²)|`.
    pub compatibility_residual: f64,
    /// `p = −φ f_z̄ / (|φ| (1 + |f|²))`
    pub p_recovered: Vec<f64>,
    /// Interior max of `|p_recovered − p|`, plus the largest imaginary part
    /// of the unrounded expression.
    pub p_error: f64,
}

/// Converts to Kenmotsu data; fails where `|ψ2| ≤ chart_tol`.
///
/// `(log φ)_z̄` is differenced as `φ_z̄ / φ` so that no branch of the
/// logarithm is chosen.
pub fn to_kenmotsu(field: &SpinorField2D, chart_tol: f64) -> Result<KenmotsuData> {
    let g = &field.grid;
    for i in 0..g.nx {
        for j in 0..g.ny {
            let modulus = field.psi2[g.idx(i, j)].norm();
            if !(modulus > chart_tol) {
                return Err(Error::Chart { modulus, i, j });
            }
        }
    }
    let f: Vec<Complex64> = field
        .psi1
        .iter()
        .zip(&field.psi2)
        .map(|(a, b)| I * a.conj() / b)
        .collect();
    let phi: Vec<Complex64> = field.psi2.iter().map(|b| I * b * b).collect();
    let f_zbar = g.dzbar(&f);
    let phi_zbar = g.dzbar(&phi);
    let compatibility_residual = max_interior(g, |k| {
        (phi_zbar[k] / phi[k] + 2.0 * f[k].conj() * f_zbar[k] / (1.0 + f[k].norm_sqr())).norm()
    });
    let full: Vec<Complex64> = (0..f.len())
        .map(|k| -phi[k] * f_zbar[k] / (phi[k].norm() * (1.0 + f[k].norm_sqr())))
        .collect();
    let p_recovered: Vec<f64> = full.iter().map(|c| c.re).collect();
    let p_error = max_interior(g, |k| (full[k] - field.p[k]).norm());
    Ok(KenmotsuData {
        f,
        phi,
        compatibility_residual,
        p_recovered,
        p_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_kenmotsu_data() {
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let field = SpinorField2D::from_fn(rect, 6, 6, |_, _| {
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), 0.0)
        })
        .unwrap();
        let k = to_kenmotsu(&field, 1e-8).unwrap();
        assert!(k.f.iter().all(|f| *f == Complex64::new(0.0, 0.0)));
        assert!(k.phi.iter().all(|p| *p == I));
        assert_eq!(k.compatibility_residual, 0.0);
        assert_eq!(k.p_error, 0.0);
    }

    #[test]
    fn one_sided_stencils_are_second_order_exact() {
        let g = Grid {
            nx: 7,
            ny: 5,
            hx: 0.1,
            hy: 0.2,
        };
        let f: Vec<f64> = (0..35).map(|k| ((k / 5) as f64 * 0.1).powi(2)).collect();
        let d = g.diff(&f, 0, 1);
        let dd = g.diff(&f, 0, 2);
        for i in 0..7 {
            assert!((d[g.idx(i, 2)] - 2.0 * i as f64 * 0.1).abs() < 1e-12);
            assert!((dd[g.idx(i, 2)] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn small_grids_rejected() {
        let rect = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            minimal_fixture(rect, 4, 9),
            Err(Error::GridTooSmall { min: 5, got: 4 })
        );
    }
}
