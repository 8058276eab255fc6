//! Hastings-McLeod solution of `q'' = x q + 2 q^3` on `[-L, L]`, its
//! Hamiltonian, and the integral formula for `log F_TW`.
//!
//! The BVP is discretized with the Numerov scheme (fourth order, three-point)
//! and solved by damped Newton with a tridiagonal Jacobian. Boundary values
//! come from `Ai(L)` on the right and from the asymptotic series
//! `q ~ sqrt(t/2) (1 - 1/(8t^3) - 73/(128t^6) - ...)`, `t = -x`, on the left.

use crate::error::{Error, Result};
use crate::interp::{locate, quintic_hermite};
use crate::quad::gauss_legendre;
use crate::specfun::airy_pair;

/// Gridded Hastings-McLeod profile.
#[derive(Debug, Clone)]
pub struct HMProfile {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub qprime: Vec<f64>,
    pub half_width: f64,
    /// Largest Numerov residual divided by `h^2`, i.e. in units of `q''`.
    pub max_residual: f64,
    pub newton_iterations: usize,
}

fn rhs(x: f64, q: f64) -> f64 {
    x * q + 2.0 * q * q * q
}

/// Coefficients `c_n` of `q = sqrt(t/2) sum c_n t^{-3n}` at `x = -t -> -inf`.
fn left_series_coefficients(terms: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for n in 1..terms {
        // Coefficient of t^{-3n} in w^3, leaving out the 3 c_n contribution.
        let mut cube = 0.0;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let l = n - i - j;
                if i == n || j == n || l == n {
                    continue;
                }
                cube += c[i] * c[j] * c[l];
            }
        }
        let m = (n - 1) as f64;
        let rhs = c[n - 1] * (3.0 * m - 0.5) * (3.0 * m + 0.5);
        c.push((rhs - cube) / 2.0);
    }
    c
}

/// `(q, q')` from the left asymptotic series at `x < 0`, optimally truncated.
pub fn left_asymptotic(x: f64) -> (f64, f64) {
    let t = -x;
    let c = left_series_coefficients(12);
    let u = t.powi(-3);
    let (mut w, mut dw) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for (n, cn) in c.iter().enumerate() {
        let term = cn * u.powi(n as i32);
        if n > 1 && term.abs() > last {
            break;
        }
        last = term.abs();
        w += term;
        dw += -3.0 * n as f64 * term / t;
    }
    let a = (t / 2.0).sqrt();
    // d/dx = -d/dt.
    (a * w, -(a * dw + w / (4.0 * a)))
}

/// Solve the Hastings-McLeod BVP on `[-l, l]` with `n` intervals.
pub fn solve_hastings_mcleod(l: f64, n: usize) -> Result<HMProfile> {
    if !(6.0..=14.0).contains(&l) {
        return Err(Error::Domain(format!("window half-width {l} outside [6, 14]")));
    }
    if n < 400 {
        return Err(Error::Domain(format!("grid size {n} below 400")));
    }
    let h = 2.0 * l / n as f64;
    let h12 = h * h / 12.0;
    let grid: Vec<f64> = (0..=n).map(|i| -l + i as f64 * h).collect();
    let (ql, qpl) = left_asymptotic(-l);
    let (ar, apr) = airy_pair(l)?;
    let mut q: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let a = airy_pair(x).map(|p| p.0).unwrap_or(0.0);
            ((-x / 2.0).max(0.0) + a * a).sqrt()
        })
        .collect();
    q[0] = ql;
    q[n] = ar;

    let residual = |q: &[f64]| -> Vec<f64> {
        (1..n)
            .map(|i| {
                q[i + 1] - 2.0 * q[i] + q[i - 1]
                    - h12
                        * (rhs(grid[i + 1], q[i + 1])
                            + 10.0 * rhs(grid[i], q[i])
                            + rhs(grid[i - 1], q[i - 1]))
            })
            .collect()
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut r = residual(&q);
    let mut iterations = 0;
    loop {
        if iterations >= 60 {
            return Err(Error::Divergence {
                iterations,
                residual: norm(&r),
                advice: "restart from a converged profile on a smaller window",
            });
        }
        iterations += 1;
        let m = n - 1;
        let fq = |i: usize| grid[i] + 6.0 * q[i] * q[i];
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = -2.0 - 10.0 * h12 * fq(i);
            if k > 0 {
                sub[k] = 1.0 - h12 * fq(i - 1);
            }
            if k + 1 < m {
                sup[k] = 1.0 - h12 * fq(i + 1);
            }
        }
        let rhs_vec: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = solve_tridiagonal(&sub, &diag, &sup, &rhs_vec)?;
        let old = norm(&r);
        let mut step = 1.0;
        let mut accepted = false;
        let mut trial = q.clone();
        for _ in 0..30 {
            for k in 0..m {
                trial[k + 1] = q[k + 1] + step * delta[k];
            }
            let rt = residual(&trial);
            if norm(&rt) <= old || old < 1e-13 {
                r = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::Divergence {
                iterations,
                residual: old,
                advice: "restart from a converged profile on a smaller window",
            });
        }
        q = trial;
        let update = norm(&delta) * step;
        if update < 1e-12 {
            break;
        }
    }

    let mut qprime = vec![0.0; n + 1];
    qprime[0] = qpl;
    qprime[n] = apr;
    for i in 1..n {
        let df = rhs(grid[i + 1], q[i + 1]) - rhs(grid[i - 1], q[i - 1]);
        qprime[i] = (q[i + 1] - q[i - 1]) / (2.0 * h) - h * df / 12.0;
    }
    let max_residual = norm(&r) / (h * h);
    Ok(HMProfile {
        grid,
        q,
        qprime,
        half_width: l,
        max_residual,
        newton_iterations: iterations,
    })
}

/// Thomas algorithm; `sub[0]` and `sup[m-1]` are ignored.
pub(crate) fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut b = diag[0];
    if b == 0.0 {
        return Err(Error::SingularSystem { pivot: 0 });
    }
    c[0] = sup[0] / b;
    d[0] = rhs[0] / b;
    for i in 1..m {
        b = diag[i] - sub[i] * c[i - 1];
        if b == 0.0 {
            return Err(Error::SingularSystem { pivot: i });
        }
        c[i] = if i + 1 < m { sup[i] / b } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / b;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

impl HMProfile {
    /// `(q, q')` at `x` by quintic Hermite interpolation, using `q'' = xq + 2q^3`
    /// at the nodes.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let l = self.half_width;
        if !(x >= -l && x <= l) {
            return Err(Error::Window(format!("x = {x} outside [-{l}, {l}]")));
        }
        let n = self.grid.len() - 1;
        let h = 2.0 * l / n as f64;
        let i = locate(-l, h, n, x);
        let end = |j: usize| [self.q[j], self.qprime[j], rhs(self.grid[j], self.q[j])];
        Ok(quintic_hermite(self.grid[i], h, end(i), end(i + 1), x))
    }
}

/// `H(x) = q'^2 - x q^2 - q^4`. It satisfies `H' = -q^2` and vanishes at
/// `+inf`, and equals `d/ds log F_TW(s)`.
#[allow(non_snake_case)]
pub fn hamiltonian_pII(profile: &HMProfile, x: f64) -> Result<f64> {
    let (q, qp) = profile.eval(x)?;
    Ok(qp * qp - x * q * q - q.powi(4))
}

/// `log F_TW(s) = -int_s^inf (x - s) q(x)^2 dx`. The part beyond `L` uses
/// `q ~ Ai` and the closed forms `int_L^inf Ai^2 = Ai'(L)^2 - L Ai(L)^2`,
/// `int_L^inf x Ai^2 = -(L^2 Ai^2 - L Ai'^2 + Ai Ai')/3`.
pub fn tw_via_integral(profile: &HMProfile, s: f64) -> Result<f64> {
    let l = profile.half_width;
    if !(s >= -l && s <= l - 4.0) {
        return Err(Error::Window(format!(
            "s = {s} needs 4 units of right margin inside [-{l}, {l}]"
        )));
    }
    let rule = gauss_legendre(12);
    let panels = ((l - s) / 0.25).ceil() as usize;
    let width = (l - s) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = s + p as f64 * width;
        let (xs, ws) = rule.on_interval_f64(a, a + width);
        for (x, w) in xs.into_iter().zip(ws) {
            let (q, _) = profile.eval(x.min(l))?;
            sum += w * (x - s) * q * q;
        }
    }
    let (a, ap) = airy_pair(l)?;
    let int_ai2 = ap * ap - l * a * a;
    let int_x_ai2 = -(l * l * a * a - l * ap * ap + a * ap) / 3.0;
    Ok(-(sum + int_x_ai2 - s * int_ai2))
}
