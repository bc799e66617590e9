//! Summation and quadrature helpers.
//!
//! All sums go through [`neumaier_sum`] so that results depend only on the
//! order of the input, never on how a caller might partition the work.

/// Compensated (Kahan–Babuška–Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoid rule on uniform samples of a periodic function over one period.
///
/// `samples` covers `[0, period)` without the duplicated endpoint, so the
/// rule reduces to `h * sum`.
pub fn periodic_trapezoid(samples: &[f64], period: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    period / samples.len() as f64 * neumaier_sum(samples.iter().copied())
}

/// Composite trapezoid rule on uniform samples including both endpoints.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner = neumaier_sum(samples[1..n - 1].iter().copied());
            h * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Running trapezoid integral: `out[i] = ∫_{x_0}^{x_i}` of the sampled
/// function on a uniform grid with step `h`.
pub fn cumulative_trapezoid(samples: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut sum = 0.0;
    let mut comp = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        let x = 0.5 * h * (w[0] + w[1]);
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute tolerance
/// `tol` (Richardson-corrected panels, depth-limited).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let values = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(neumaier_sum(values), 2e-16);
    }

    #[test]
    fn periodic_trapezoid_is_exact_for_trig() {
        let n = 32;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let x = 2.0 * PI * j as f64 / n as f64;
                1.0 + x.cos().powi(2)
            })
            .collect();
        assert!((periodic_trapezoid(&samples, 2.0 * PI) - 3.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn cumulative_matches_total() {
        let h = 0.01;
        let samples: Vec<f64> = (0..=100).map(|j| (j as f64 * h).exp()).collect();
        let cum = cumulative_trapezoid(&samples, h);
        assert!((cum[100] - trapezoid(&samples, h)).abs() < 1e-14);
        assert!((cum[100] - (1f64.exp() - 1.0)).abs() < 1e-4);
    }

    #[test]
    fn adaptive_simpson_handles_sqrt_endpoint() {
        let val = adaptive_simpson(|x| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((val - 2.0 / 3.0).abs() < 1e-9);
    }
}
