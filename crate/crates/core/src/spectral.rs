//! Uniformly sampled periodic functions and the Fourier machinery on them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quadrature::{neumaier_sum, periodic_trapezoid};

/// Relative mean tolerance for the periodic antiderivative gate.
pub const MEAN_TOL: f64 = 1e-8;

/// Boundary behaviour of a sampled function over one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `f(x + T) = f(x)`
    Periodic,
    /// `f(x + T) = -f(x)`
    Antiperiodic,
}

/// Uniform samples of a real `period`-periodic function on `[0, period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    samples: Vec<f64>,
    period: f64,
}

impl PeriodicProfile {
    pub const MIN_SAMPLES: usize = 16;

    pub fn new(samples: Vec<f64>, period: f64) -> Result<Self> {
        let n = samples.len();
        if n < Self::MIN_SAMPLES || !n.is_multiple_of(2) {
            return Err(Error::InvalidProfile(format!(
                "need an even sample count >= {}, got {n}",
                Self::MIN_SAMPLES
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "period must be positive, got {period}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite sample".into()));
        }
        Ok(Self { samples, period })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, period: f64, f: F) -> Result<Self> {
        let h = period / n as f64;
        Self::new((0..n).map(|j| f(j as f64 * h)).collect(), period)
    }

    pub fn zeros(n: usize, period: f64) -> Result<Self> {
        Self::new(vec![0.0; n], period)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn step(&self) -> f64 {
        self.period / self.len() as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.samples.iter().copied()) / self.len() as f64
    }

    /// Periodic trapezoid integral over one period.
    pub fn integral(&self) -> f64 {
        periodic_trapezoid(&self.samples, self.period)
    }

    /// Same grid, new values.
    pub fn with_samples(&self, samples: Vec<f64>) -> Self {
        assert_eq!(
            samples.len(),
            self.len(),
            "sample count must match the grid"
        );
        Self {
            samples,
            period: self.period,
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        self.with_samples(self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Self {
        assert_eq!(self.len(), other.len(), "profiles live on different grids");
        self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Spectral derivative of the given order.
    pub fn derivative(&self, order: u32) -> Self {
        let grid = SpectralGrid::new(self.len(), self.period);
        self.with_samples(grid.derivative(&self.samples, order))
    }

    /// Second-order central finite-difference derivative (order 1 or 2).
    pub fn fd_derivative(&self, order: u32) -> Self {
        self.with_samples(fd_periodic(&self.samples, self.step(), order))
    }

    /// Zero-mean periodic antiderivative.
    ///
    /// Fails with [`Error::NonExactDerivative`] when the mean of `self` is not
    /// negligible relative to its size: no periodic antiderivative exists.
    pub fn antiderivative(&self) -> Result<Self> {
        let grid = SpectralGrid::new(self.len(), self.period);
        Ok(self.with_samples(grid.antiderivative(&self.samples)?))
    }

    /// Band-limited interpolation onto a grid `factor` times finer.
    pub fn refine(&self, factor: usize) -> Vec<f64> {
        let grid = SpectralGrid::new(self.len(), self.period);
        grid.refine(&self.samples, factor)
    }

    /// Profile translated by `dx`: returns samples of `x ↦ f(x - dx)`.
    pub fn shifted(&self, dx: f64) -> Self {
        let grid = SpectralGrid::new(self.len(), self.period);
        self.with_samples(grid.shift(&self.samples, dx))
    }

    /// Circular rotation by whole samples: `out[j] = self[j + offset]`.
    pub fn rotated(&self, offset: usize) -> Self {
        let n = self.len();
        self.with_samples((0..n).map(|j| self.samples[(j + offset) % n]).collect())
    }
}

/// Second-order central differences on periodic data.
pub fn fd_periodic(f: &[f64], h: f64, order: u32) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|j| {
            let fm = f[(j + n - 1) % n];
            let fp = f[(j + 1) % n];
            match order {
                0 => f[j],
                1 => (fp - fm) / (2.0 * h),
                2 => (fp - 2.0 * f[j] + fm) / (h * h),
                _ => panic!("fd_periodic supports orders 0..=2"),
            }
        })
        .collect()
}

/// FFT plans and wavenumbers for one grid size.
#[derive(Clone)]
pub struct SpectralGrid {
    n: usize,
    period: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            period,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Signed mode index of FFT slot `j`; the Nyquist slot reports `n/2`.
    pub fn mode(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn is_nyquist(&self, j: usize) -> bool {
        self.n.is_multiple_of(2) && j == self.n / 2
    }

    /// Angular wavenumber of FFT slot `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI / self.period * self.mode(j) as f64
    }

    /// `(ik)^order` for slot `j`, with odd-order Nyquist multipliers zeroed.
    pub fn symbol(&self, j: usize, order: u32) -> Complex64 {
        if order == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if order % 2 == 1 && self.is_nyquist(j) {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(0.0, self.wavenumber(j)).powu(order)
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn forward_complex(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    /// Normalised inverse transform, real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn inverse_complex(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.n as f64;
        spectrum.into_iter().map(|c| c * scale).collect()
    }

    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        if order == 0 {
            return f.to_vec();
        }
        let mut hat = self.forward(f);
        for (j, c) in hat.iter_mut().enumerate() {
            *c *= self.symbol(j, order);
        }
        self.inverse(hat)
    }

    /// Derivative of a function with the given parity over the period.
    ///
    /// Antiperiodic data are expanded in half-integer modes
    /// `exp(i (2m + 1) π x / T)`, which have no Nyquist ambiguity.
    pub fn derivative_with_parity(&self, f: &[f64], order: u32, parity: Parity) -> Vec<f64> {
        match parity {
            Parity::Periodic => self.derivative(f, order),
            Parity::Antiperiodic => {
                let h = self.period / self.n as f64;
                let half = PI / self.period;
                let twisted: Vec<Complex64> = f
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * Complex64::from_polar(1.0, -half * j as f64 * h))
                    .collect();
                let mut hat = self.forward_complex(&twisted);
                for (j, c) in hat.iter_mut().enumerate() {
                    let m = if j < self.n / 2 {
                        j as i64
                    } else {
                        j as i64 - self.n as i64
                    };
                    let k = 2.0 * PI / self.period * m as f64 + half;
                    *c *= Complex64::new(0.0, k).powu(order);
                }
                self.inverse_complex(hat)
                    .into_iter()
                    .enumerate()
                    .map(|(j, c)| (c * Complex64::from_polar(1.0, half * j as f64 * h)).re)
                    .collect()
            }
        }
    }

    pub fn antiderivative(&self, f: &[f64]) -> Result<Vec<f64>> {
        let scale = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mean = neumaier_sum(f.iter().copied()) / self.n as f64;
        if mean.abs() > MEAN_TOL * scale {
            return Err(Error::NonExactDerivative { mean, scale });
        }
        let mut hat = self.forward(f);
        for (j, c) in hat.iter_mut().enumerate() {
            if j == 0 || self.is_nyquist(j) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c /= Complex64::new(0.0, self.wavenumber(j));
            }
        }
        Ok(self.inverse(hat))
    }

    /// Zero-padded band-limited interpolation onto `factor * n` points.
    pub fn refine(&self, f: &[f64], factor: usize) -> Vec<f64> {
        assert!(factor >= 1);
        let n = self.n;
        let big = n * factor;
        let hat = self.forward(f);
        let mut padded = vec![Complex64::new(0.0, 0.0); big];
        for j in 0..n {
            if self.is_nyquist(j) {
                // split the Nyquist coefficient evenly between ±n/2
                padded[n / 2] += 0.5 * hat[j];
                padded[big - n / 2] += 0.5 * hat[j];
            } else if j < n / 2 {
                padded[j] = hat[j];
            } else {
                padded[big - (n - j)] = hat[j];
            }
        }
        if factor == 1 {
            return self.inverse(hat);
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(big).process(&mut padded);
        let scale = 1.0 / n as f64;
        padded.into_iter().map(|c| c.re * scale).collect()
    }

    /// Samples of `x ↦ f(x - dx)`.
    pub fn shift(&self, f: &[f64], dx: f64) -> Vec<f64> {
        let mut hat = self.forward(f);
        for (j, c) in hat.iter_mut().enumerate() {
            if self.is_nyquist(j) {
                *c *= (self.wavenumber(j) * dx).cos();
            } else {
                *c *= Complex64::from_polar(1.0, -self.wavenumber(j) * dx);
            }
        }
        self.inverse(hat)
    }

    /// Translation `d` that best aligns `reference` onto `moved`, i.e. the
    /// maximiser of `∫ reference(x - d) moved(x) dx`, returned in
    /// `(-T/2, T/2]`. Integer-sample cross-correlation peak refined by Newton
    /// iteration on the trigonometric interpolant.
    pub fn best_shift(&self, reference: &[f64], moved: &[f64]) -> f64 {
        let r = self.forward(reference);
        let m = self.forward(moved);
        let a: Vec<Complex64> = r.iter().zip(&m).map(|(ri, mi)| ri.conj() * mi).collect();
        // correlation sampled at d = j h
        let mut corr = a.clone();
        self.inverse.process(&mut corr);
        let h = self.period / self.n as f64;
        let (jmax, _) = corr
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bj, bv), (j, c)| {
                if c.re > bv {
                    (j, c.re)
                } else {
                    (bj, bv)
                }
            });
        let mut d = jmax as f64 * h;
        for _ in 0..50 {
            let (mut g, mut hess) = (0.0, 0.0);
            for (j, aj) in a.iter().enumerate() {
                if self.is_nyquist(j) {
                    continue;
                }
                let k = self.wavenumber(j);
                let e = aj * Complex64::from_polar(1.0, k * d);
                g += (Complex64::new(0.0, k) * e).re;
                hess += -(k * k) * e.re;
            }
            if hess >= 0.0 {
                break;
            }
            let step = g / hess;
            d -= step;
            if step.abs() < 1e-15 * self.period {
                break;
            }
        }
        let t = self.period;
        let mut d = d.rem_euclid(t);
        if d > 0.5 * t {
            d -= t;
        }
        d
    }
}
