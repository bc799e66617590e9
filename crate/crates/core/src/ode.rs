/// One classical fourth-order Runge–Kutta step for an autonomous-in-form
/// system `y' = f(x, y)` with a fixed-size state.
pub fn rk4_step<const D: usize, F>(f: F, x: f64, y: [f64; D], h: f64) -> [f64; D]
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let add = |a: &[f64; D], b: &[f64; D], c: f64| -> [f64; D] {
        let mut out = *a;
        for i in 0..D {
            out[i] += c * b[i];
        }
        out
    };
    let k1 = f(x, &y);
    let k2 = f(x + 0.5 * h, &add(&y, &k1, 0.5 * h));
    let k3 = f(x + 0.5 * h, &add(&y, &k2, 0.5 * h));
    let k4 = f(x + h, &add(&y, &k3, h));
    let mut out = y;
    for i in 0..D {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_exponential() {
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0];
            for i in 0..n {
                y = rk4_step(|_, y: &[f64; 1]| [y[0]], i as f64 * h, y, h);
            }
            (y[0] - 1f64.exp()).abs()
        };
        let ratio = run(20) / run(40);
        assert!((ratio - 16.0).abs() < 1.0, "{ratio}");
    }
}
