//! Quintic Hermite interpolation on one interval.

/// Value and slope at `x` of the quintic matching `(y, y', y'')` at both ends
/// of `[x0, x0 + h]`. Ends are given as `[y, y', y'']`.
pub fn quintic_hermite(x0: f64, h: f64, left: [f64; 3], right: [f64; 3], x: f64) -> (f64, f64) {
    let [y0, d0, s0] = left;
    let [y1, d1, s1] = right;
    let (d0, d1) = (d0 * h, d1 * h);
    let (s0, s1) = (s0 * h * h, s1 * h * h);
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let value = y0 * (1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5)
        + d0 * (t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5)
        + s0 * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5)
        + s1 * (0.5 * t3 - t4 + 0.5 * t5)
        + d1 * (-4.0 * t3 + 7.0 * t4 - 3.0 * t5)
        + y1 * (10.0 * t3 - 15.0 * t4 + 6.0 * t5);
    let slope = y0 * (-30.0 * t2 + 60.0 * t3 - 30.0 * t4)
        + d0 * (1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4)
        + s0 * (t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4)
        + s1 * (1.5 * t2 - 4.0 * t3 + 2.5 * t4)
        + d1 * (-12.0 * t2 + 28.0 * t3 - 15.0 * t4)
        + y1 * (30.0 * t2 - 60.0 * t3 + 30.0 * t4);
    (value, slope / h)
}

/// Locate the interval of a uniform grid `x_i = a + i h`, `i = 0..=n`.
pub fn locate(a: f64, h: f64, n: usize, x: f64) -> usize {
    (((x - a) / h).floor().max(0.0) as usize).min(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quintics() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.25 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x - 1.25 * x.powi(4);
        let ddp = |x: f64| 3.0 * x - 5.0 * x.powi(3);
        let (a, h) = (0.3, 0.7);
        let b = a + h;
        for &x in &[0.3, 0.5, 0.81, 1.0] {
            let (v, s) = quintic_hermite(a, h, [p(a), dp(a), ddp(a)], [p(b), dp(b), ddp(b)], x);
            assert!((v - p(x)).abs() < 1e-14);
            assert!((s - dp(x)).abs() < 1e-13);
        }
    }
}
