//! The real pole-free (tritronquee) solution of the k = 1 member of the
//! Painleve I hierarchy,
//!
//! ```text
//! q'''' = 4x - 40q^3 + 10q'^2 + 20 q q'' - 16 t1 q,
//! ```
//!
//! its Hamiltonian `h` (`h' = q`), and the regularized integrals of
//! `h - h_Asy`.
//!
//! At both ends `q` has the formal expansion `q = sum_n a_n w^{1-n}` with
//! `w = x^{1/3}` the real cube root. The same coefficients serve both ends
//! because the recursion only involves `w` algebraically. Boundary values,
//! the normalization of `h`, and the integrals beyond the window all come
//! from this expansion.

use crate::error::{Error, Result};
use crate::interp::{locate, quintic_hermite};
use crate::quad::gauss_legendre;
use crate::specfun::{alpha_f64, chi0, signed_pow, signed_root};
use std::collections::BTreeMap;

/// Number of expansion coefficients `a_0 .. a_{N-1}` used at the window ends.
pub const SERIES_TERMS: usize = 36;

type Laurent = BTreeMap<i32, f64>;

fn laurent_mul(a: &Laurent, b: &Laurent, floor: i32) -> Laurent {
    let mut out = Laurent::new();
    for (&ea, &ca) in a {
        for (&eb, &cb) in b {
            if ea + eb >= floor {
                *out.entry(ea + eb).or_insert(0.0) += ca * cb;
            }
        }
    }
    out
}

/// `d/dx w^m = (m/3) w^{m-3}`.
fn laurent_dx(a: &Laurent) -> Laurent {
    a.iter()
        .filter(|(&e, _)| e != 0)
        .map(|(&e, &c)| (e - 3, c * e as f64 / 3.0))
        .collect()
}

fn equation_lhs(a: &[f64], t1: f64, floor: i32) -> Laurent {
    let q: Laurent = a
        .iter()
        .enumerate()
        .map(|(n, &c)| (1 - n as i32, c))
        .collect();
    let q1 = laurent_dx(&q);
    let q2 = laurent_dx(&q1);
    let q4 = laurent_dx(&laurent_dx(&q2));
    let qq2 = laurent_mul(&q, &q2, floor);
    let q1sq = laurent_mul(&q1, &q1, floor);
    let q3 = laurent_mul(&laurent_mul(&q, &q, floor), &q, floor);
    let mut out = Laurent::new();
    let mut acc = |m: &Laurent, c: f64| {
        for (&e, &v) in m {
            *out.entry(e).or_insert(0.0) += c * v;
        }
    };
    acc(&q4, 1.0);
    acc(&qq2, -20.0);
    acc(&q1sq, -10.0);
    acc(&q3, 40.0);
    acc(&q, 16.0 * t1);
    *out.entry(3).or_insert(0.0) -= 4.0;
    out
}

/// Coefficients `a_n` of `q = sum a_n x^{(1-n)/3}`, fixed order by order from
/// the coefficient of `w^{3-n}` in the equation.
///
/// `a_0 = 10^{-1/3}`, `a_2 = -2 t1 / (15 a_0)`, `a_7 = -1/36`; the odd indices
/// below 7 vanish.
pub fn series_coefficients(t1: f64, terms: usize) -> Vec<f64> {
    let a0 = 0.1f64.cbrt();
    let mut a = vec![a0];
    let floor = 3 - terms as i32;
    for n in 1..terms {
        a.push(0.0);
        let lhs = equation_lhs(&a, t1, floor);
        let r = lhs.get(&(3 - n as i32)).copied().unwrap_or(0.0);
        a[n] = -r / (120.0 * a0 * a0);
    }
    a
}

/// Truncated expansion: `[q, q', q'', q''']` at `x` from the coefficients `a`.
pub fn q_series(a: &[f64], x: f64) -> [f64; 4] {
    let w = signed_root(x, 3);
    let mut out = [0.0; 4];
    for (n, &c) in a.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        // Exponent of w after d derivatives: 1 - n - 3d.
        let mut e = 1 - n as i32;
        let mut coef = c;
        for slot in out.iter_mut() {
            *slot += coef * w.powi(e);
            coef *= e as f64 / 3.0;
            e -= 3;
        }
    }
    out
}

/// `h = sum_{n != 4} 3 a_n w^{4-n} / (4-n) + 4 t1^2 / 15`. The constant makes
/// `h - h_Asy -> 0` at `+inf`. `a_4` vanishes identically, so no logarithm.
pub fn h_series(a: &[f64], t1: f64, x: f64) -> f64 {
    let w = signed_root(x, 3);
    let mut h = 4.0 * t1 * t1 / 15.0;
    for (n, &c) in a.iter().enumerate() {
        if n != 4 && c != 0.0 {
            let m = 4 - n as i32;
            h += 3.0 * c * w.powi(m) / m as f64;
        }
    }
    h
}

/// `h_Asy` at `x`. With `t1 = 0` any `k >= 1` is accepted:
///
/// ```text
/// (2k+1)/(2(2k+2)) alpha_k^{-1/(2k+1)} x^{(2k+2)/(2k+1)} + k x / (12(2k+1)(x^2+1)).
/// ```
///
/// With `t1 != 0` only `k = 1` is defined, and the four-term form in `t1` is
/// used. Its `t1^3` term carries `x^{-2/3}`.
pub fn h_asy(k: u32, x: f64, t1: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("h_Asy needs k >= 1".into()));
    }
    let kk = k as f64;
    let p = 2 * k + 1;
    let pf = p as f64;
    let tail = kk * x / (12.0 * pf * (x * x + 1.0));
    if t1 == 0.0 {
        let c = pf / (2.0 * (2.0 * kk + 2.0)) * alpha_f64(k).powf(-1.0 / pf);
        return Ok(c * signed_pow(x, (2 * k + 2) as i32, p) + tail);
    }
    if k != 1 {
        return Err(Error::Domain(format!(
            "t1-dependent h_Asy is only available for k = 1, got k = {k}"
        )));
    }
    let r = 0.8f64.cbrt();
    Ok(3.0 / 8.0 * r * signed_pow(x, 4, 3) - t1 / 2.0 * r * r * signed_pow(x, 2, 3)
        + 4.0 * t1 * t1 / 15.0
        - 8.0 / 135.0 * r * t1.powi(3) * signed_pow(x, -2, 3)
        + tail)
}

/// Antiderivative of `h_asy` vanishing at `x = 0`.
pub fn h_asy_integral(k: u32, x: f64, t1: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("h_Asy needs k >= 1".into()));
    }
    let kk = k as f64;
    let p = 2 * k + 1;
    let pf = p as f64;
    let log_part = kk * (x * x + 1.0).ln() / (24.0 * pf);
    if t1 == 0.0 {
        let a = pf * pf / (2.0 * (2.0 * kk + 2.0) * (4.0 * kk + 3.0))
            * alpha_f64(k).powf(-1.0 / pf);
        return Ok(a * signed_pow(x, (4 * k + 3) as i32, p) + log_part);
    }
    if k != 1 {
        return Err(Error::Domain(format!(
            "t1-dependent h_Asy is only available for k = 1, got k = {k}"
        )));
    }
    let r = 0.8f64.cbrt();
    Ok(9.0 / 56.0 * r * signed_pow(x, 7, 3) - 3.0 * t1 / 10.0 * r * r * signed_pow(x, 5, 3)
        + 4.0 * t1 * t1 / 15.0 * x
        - 8.0 / 45.0 * r * t1.powi(3) * signed_root(x, 3)
        + log_part)
}

/// A number with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Solved tritronquee profile on `[-L, L]`.
#[derive(Debug, Clone)]
pub struct Pi2Profile {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    /// `q'`, `q''`, `q'''` on the grid from finite-difference stencils.
    pub dq: [Vec<f64>; 3],
    /// `h` normalized so that `h(L)` equals the expansion value there.
    pub h: Vec<f64>,
    /// `int_{-L}^{x_i} h`.
    pub h_cumulative: Vec<f64>,
    /// The polynomial Hamiltonian evaluated on the grid jets. It agrees with
    /// `h` up to discretization error, with no additive constant.
    pub h_local: Vec<f64>,
    pub h_local_cumulative: Vec<f64>,
    pub t1: f64,
    pub half_width: f64,
    pub coefficients: Vec<f64>,
    /// Largest residual of the discrete equation at interior nodes.
    pub max_residual: f64,
    pub newton_iterations: usize,
    /// `h(-L)` minus the expansion value there. `h` is normalized on the
    /// right only, so this measures how well both ends agree.
    pub left_h_defect: f64,
    coarse: Option<Box<Pi2Profile>>,
}

const D4: [f64; 7] = [-1.0 / 6.0, 2.0, -6.5, 28.0 / 3.0, -6.5, 2.0, -1.0 / 6.0];
const D2: [f64; 5] = [-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0];
const D1: [f64; 5] = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
// Seven-point stencils for post-processing the converged profile.
const P1: [f64; 7] = [-1.0 / 60.0, 0.15, -0.75, 0.0, 0.75, -0.15, 1.0 / 60.0];
const P2: [f64; 7] = [1.0 / 90.0, -0.15, 1.5, -49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0];
const P3: [f64; 7] = [0.125, -1.0, 1.625, 0.0, -1.625, 1.0, -0.125];

/// Polynomial Hamiltonian of the k = 1 equation,
///
/// ```text
/// -q'q'''/4 + q''^2/8 + (5/2) q q'^2 - (5/2) q^4 + x q - 2 t1 q^2,
/// ```
///
/// whose x-derivative along solutions is `q`. With no added constant it
/// satisfies `h - h_Asy -> 0` at both infinities.
pub fn hamiltonian_pi2(x: f64, t1: f64, jet: [f64; 4]) -> f64 {
    let [q, q1, q2, q3] = jet;
    -0.25 * q1 * q3 + q2 * q2 / 8.0 + 2.5 * q * q1 * q1 - 2.5 * q.powi(4) + x * q - 2.0 * t1 * q * q
}

/// Solve the BVP on `[-l, l]` with `n` intervals (`n` even).
///
/// A second solve on `n/2` intervals is kept to attach error bars to the
/// integrals. If Newton fails from the closed-form initial guess, the
/// window is grown from `L = 20` by continuation.
pub fn solve_tritronquee(l: f64, n: usize, t1: f64) -> Result<Pi2Profile> {
    if !(20.0..=60.0).contains(&l) {
        return Err(Error::Domain(format!("window half-width {l} outside [20, 60]")));
    }
    if n < 2000 || n % 2 == 1 {
        return Err(Error::Domain(format!("grid size {n} must be even and at least 2000")));
    }
    if !t1.is_finite() || t1.abs() > 3.0 {
        return Err(Error::Domain(format!("t1 = {t1} outside [-3, 3]")));
    }
    let coefficients = series_coefficients(t1, SERIES_TERMS);
    let mut fine = solve_with_continuation(l, n, t1, &coefficients)?;
    let coarse = solve_with_continuation(l, n / 2, t1, &coefficients)?;
    fine.coarse = Some(Box::new(coarse));
    Ok(fine)
}

fn solve_with_continuation(l: f64, n: usize, t1: f64, a: &[f64]) -> Result<Pi2Profile> {
    let guess = |x: f64| 0.1f64.cbrt() * x * (x * x + 1.0).powf(-1.0 / 3.0);
    match solve_grid(l, n, t1, a, &guess) {
        Ok(p) => Ok(p),
        Err(Error::Divergence { .. }) if l > 20.0 => {
            let step = 2.0 * l / n as f64;
            let mut current = 20.0;
            let mut prev = solve_grid(current, (2.0 * current / step).round() as usize, t1, a, &guess)?;
            while current < l {
                current = (current + 10.0).min(l);
                let m = if current == l { n } else { (2.0 * current / step).round() as usize };
                let p = &prev;
                let seed = |x: f64| {
                    if x.abs() < p.half_width {
                        p.eval_q(x).map(|v| v.0).unwrap_or_else(|_| q_series(a, x)[0])
                    } else {
                        q_series(a, x)[0]
                    }
                };
                prev = solve_grid(current, m, t1, a, &seed)?;
            }
            Ok(prev)
        }
        Err(e) => Err(e),
    }
}

fn solve_grid(
    l: f64,
    n: usize,
    t1: f64,
    a: &[f64],
    guess: &dyn Fn(f64) -> f64,
) -> Result<Pi2Profile> {
    let step = 2.0 * l / n as f64;
    // Storage index k = i + 2 for grid index i in -2..=n+2.
    let xs: Vec<f64> = (0..n + 5).map(|k| -l + (k as f64 - 2.0) * step).collect();
    let fixed = |k: usize| k <= 2 || k >= n + 2;
    let mut u: Vec<f64> = xs
        .iter()
        .enumerate()
        .map(|(k, &x)| if fixed(k) { q_series(a, x)[0] } else { guess(x) })
        .collect();
    let (h2, h4) = (step * step, step.powi(4));
    let stencil = |u: &[f64], k: usize, s: &[f64]| -> f64 {
        let r = s.len() / 2;
        s.iter().enumerate().map(|(j, c)| c * u[k + j - r]).sum()
    };
    let residual = |u: &[f64]| -> Vec<f64> {
        (3..=n + 1)
            .map(|k| {
                let q = u[k];
                let q4 = stencil(u, k, &D4) / h4;
                let q2 = stencil(u, k, &D2) / h2;
                let q1 = stencil(u, k, &D1) / step;
                q4 - 20.0 * q * q2 - 10.0 * q1 * q1 + 40.0 * q * q * q - 4.0 * xs[k] + 16.0 * t1 * q
            })
            .collect()
    };
    let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = 1.0 / h4;
    let m = n - 1;
    let mut r = residual(&u);
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > 60 {
            return Err(Error::Divergence {
                iterations,
                residual: norm(&r),
                advice: "shrink the initial window and continue outward",
            });
        }
        let mut jac = crate::banded::BandedMatrix::new(m, 3, 3);
        for row in 0..m {
            let k = row + 3;
            let q = u[k];
            let q2 = stencil(&u, k, &D2) / h2;
            let q1 = stencil(&u, k, &D1) / step;
            for o in -3i64..=3 {
                let kk = (k as i64 + o) as usize;
                if fixed(kk) {
                    continue;
                }
                let mut v = D4[(o + 3) as usize] / h4;
                if o.abs() <= 2 {
                    v -= 20.0 * q * D2[(o + 2) as usize] / h2;
                    v -= 20.0 * q1 * D1[(o + 2) as usize] / step;
                }
                if o == 0 {
                    v += -20.0 * q2 + 120.0 * q * q + 16.0 * t1;
                }
                jac.add(row, kk - 3, v / scale);
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v / scale).collect();
        let delta = jac.solve(&rhs)?;
        let old = norm(&r);
        let mut step_len = 1.0;
        let mut trial = u.clone();
        let mut accepted = false;
        for _ in 0..30 {
            for (row, d) in delta.iter().enumerate() {
                trial[row + 3] = u[row + 3] + step_len * d;
            }
            let rt = residual(&trial);
            if norm(&rt) < old || old < 1e-6 {
                r = rt;
                accepted = true;
                break;
            }
            step_len *= 0.5;
        }
        if !accepted {
            return Err(Error::Divergence {
                iterations,
                residual: old,
                advice: "shrink the initial window and continue outward",
            });
        }
        u = trial;
        let update = norm(&delta) * step_len;
        // Updates stall near 1e-10, the roundoff floor of the fourth-derivative stencil.
        if update < 1e-9 {
            break;
        }
    }

    let grid = xs[2..=n + 2].to_vec();
    let q = u[2..=n + 2].to_vec();
    // The end nodes take their derivatives from the expansion, as their
    // values do.
    let deriv = |s: &[f64], p: usize| -> Vec<f64> {
        (2..=n + 2)
            .map(|k| {
                if k == 2 || k == n + 2 {
                    q_series(a, xs[k])[p]
                } else {
                    stencil(&u, k, s) / step.powi(p as i32)
                }
            })
            .collect()
    };
    let dq = [deriv(&P1, 1), deriv(&P2, 2), deriv(&P3, 3)];

    // Euler-Maclaurin corrected trapezoid: exact through degree 5 per step.
    let em = |f: &[f64], f1: &[f64], f3: &[f64], i: usize| -> f64 {
        step / 2.0 * (f[i] + f[i + 1]) - step * step / 12.0 * (f1[i + 1] - f1[i])
            + step.powi(4) / 720.0 * (f3[i + 1] - f3[i])
    };
    let mut h = vec![0.0; n + 1];
    for i in 0..n {
        h[i + 1] = h[i] + em(&q, &dq[0], &dq[2], i);
    }
    let shift = h_series(a, t1, l) - h[n];
    for v in h.iter_mut() {
        *v += shift;
    }
    let h_local: Vec<f64> = (0..=n)
        .map(|i| hamiltonian_pi2(grid[i], t1, [q[i], dq[0][i], dq[1][i], dq[2][i]]))
        .collect();
    let cumulative = |f: &[f64]| {
        let mut c = vec![0.0; n + 1];
        for i in 0..n {
            c[i + 1] = c[i] + em(f, &q, &dq[1], i);
        }
        c
    };
    let h_cumulative = cumulative(&h);
    let h_local_cumulative = cumulative(&h_local);
    let left_h_defect = h[0] - h_series(a, t1, -l);
    Ok(Pi2Profile {
        grid,
        q,
        dq,
        h,
        h_cumulative,
        h_local,
        h_local_cumulative,
        t1,
        half_width: l,
        coefficients: a.to_vec(),
        max_residual: norm(&r),
        newton_iterations: iterations,
        left_h_defect,
        coarse: None,
    })
}

impl Pi2Profile {
    fn step(&self) -> f64 {
        2.0 * self.half_width / (self.grid.len() - 1) as f64
    }

    fn check_inside(&self, x: f64) -> Result<()> {
        let l = self.half_width;
        if x >= -l && x <= l {
            Ok(())
        } else {
            Err(Error::Window(format!("x = {x} outside [-{l}, {l}]")))
        }
    }

    /// `(q, q')` by quintic Hermite interpolation.
    pub fn eval_q(&self, x: f64) -> Result<(f64, f64)> {
        self.check_inside(x)?;
        let n = self.grid.len() - 1;
        let i = locate(-self.half_width, self.step(), n, x);
        let end = |j: usize| [self.q[j], self.dq[0][j], self.dq[1][j]];
        Ok(quintic_hermite(self.grid[i], self.step(), end(i), end(i + 1), x))
    }

    fn hermite_h(&self, values: &[f64], x: f64) -> Result<f64> {
        self.check_inside(x)?;
        let n = self.grid.len() - 1;
        let i = locate(-self.half_width, self.step(), n, x);
        let end = |j: usize| [values[j], self.q[j], self.dq[0][j]];
        Ok(quintic_hermite(self.grid[i], self.step(), end(i), end(i + 1), x).0)
    }

    fn integral(&self, values: &[f64], cumulative: &[f64], x: f64) -> Result<f64> {
        self.check_inside(x)?;
        let n = self.grid.len() - 1;
        let i = locate(-self.half_width, self.step(), n, x);
        let rule = gauss_legendre(6);
        let (nodes, weights) = rule.on_interval_f64(self.grid[i], x);
        let mut acc = cumulative[i];
        for (t, w) in nodes.into_iter().zip(weights) {
            acc += w * self.hermite_h(values, t)?;
        }
        Ok(acc)
    }

    /// `h(x)` by quintic Hermite interpolation with `h' = q`, `h'' = q'`.
    pub fn eval_h(&self, x: f64) -> Result<f64> {
        self.hermite_h(&self.h, x)
    }

    /// `int_{-L}^x h`.
    pub fn h_integral_from_left(&self, x: f64) -> Result<f64> {
        self.integral(&self.h, &self.h_cumulative, x)
    }

    /// `int_{-L}^x` of the polynomial Hamiltonian.
    pub fn h_local_integral_from_left(&self, x: f64) -> Result<f64> {
        self.integral(&self.h_local, &self.h_local_cumulative, x)
    }

    /// `[q, q', q'', q''', q'''']` at interior node `i` from the stencils.
    pub fn jet_at(&self, i: usize) -> Option<[f64; 5]> {
        let n = self.grid.len() - 1;
        if i < 3 || i + 3 > n {
            return None;
        }
        let q4: f64 = D4
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.q[i + j - 3])
            .sum::<f64>()
            / self.step().powi(4);
        Some([self.q[i], self.dq[0][i], self.dq[1][i], self.dq[2][i], q4])
    }

    pub fn coarse(&self) -> Option<&Pi2Profile> {
        self.coarse.as_deref()
    }
}

/// `int_{L}^{inf} (h - h_Asy)` or `int_{-inf}^{-L} (h - h_Asy)` from the
/// expansion, with the size of the last term used as the truncation bound.
fn tail(a: &[f64], l: f64, right: bool) -> (f64, f64) {
    // Terms n in {0, 2, 6} coincide with h_Asy; n = 7 against the rational
    // part of h_Asy gives 1/(36x(x^2+1)), integrated in closed form.
    let ln_part = (1.0 + 1.0 / (l * l)).ln() / 72.0;
    let mut sum = if right { ln_part } else { -ln_part };
    let big_w = l.cbrt();
    let mut last = 0.0;
    for (n, &c) in a.iter().enumerate().skip(8) {
        if c == 0.0 {
            continue;
        }
        // int_L^inf w^m dx = -3 W^{m+3}/(m+3); on the left pick up (-1)^m.
        let m = 4 - n as i32;
        let mut term = 3.0 * c / m as f64 * (-3.0 * big_w.powi(m + 3) / (m + 3) as f64);
        if !right && m % 2 != 0 {
            term = -term;
        }
        sum += term;
        last = term.abs();
    }
    (sum, last)
}

fn ih_value(p: &Pi2Profile, x: f64) -> Result<f64> {
    let l = p.half_width;
    let int_h = p.h_integral_from_left(l)? - p.h_integral_from_left(x)?;
    let int_asy = h_asy_integral(1, l, p.t1)? - h_asy_integral(1, x, p.t1)?;
    Ok(int_h - int_asy + tail(&p.coefficients, l, true).0)
}

fn left_value(p: &Pi2Profile, x: f64) -> Result<f64> {
    let l = p.half_width;
    let int_h = p.h_integral_from_left(x)?;
    let int_asy = h_asy_integral(1, x, p.t1)? - h_asy_integral(1, -l, p.t1)?;
    Ok(tail(&p.coefficients, l, false).0 + int_h - int_asy)
}

fn with_error(p: &Pi2Profile, f: impl Fn(&Pi2Profile) -> Result<f64>, tail_bound: f64) -> Result<Estimate> {
    let value = f(p)?;
    let coarse = match p.coarse() {
        Some(c) => (value - f(c)?).abs(),
        None => 0.0,
    };
    Ok(Estimate {
        value,
        error: coarse + tail_bound,
    })
}

/// `I_h(x) = int_x^inf (h - h_Asy)`: quadrature up to `L`, expansion beyond.
#[allow(non_snake_case)]
pub fn I_h(profile: &Pi2Profile, x: f64) -> Result<Estimate> {
    let l = profile.half_width;
    if !(x.abs() <= l - 0.5) {
        return Err(Error::Window(format!(
            "x = {x} within 0.5 of the window edge {l} or outside it"
        )));
    }
    let bound = tail(&profile.coefficients, l, true).1;
    with_error(profile, |p| ih_value(p, x), bound)
}

/// `I_h(x)` for `|x| >= 20` straight from the expansion, with no profile.
/// On the left this uses the total-integral identity `I_h(x) = -int_{-inf}^x`.
#[allow(non_snake_case)]
pub fn I_h_from_expansion(t1: f64, x: f64) -> Result<Estimate> {
    if !(x.abs() >= 20.0) {
        return Err(Error::Window(format!(
            "x = {x}: the expansion is only used for |x| >= 20"
        )));
    }
    let a = series_coefficients(t1, SERIES_TERMS);
    let (value, error) = if x > 0.0 {
        tail(&a, x, true)
    } else {
        let (v, e) = tail(&a, -x, false);
        (-v, e)
    };
    Ok(Estimate { value, error })
}

/// `int_{-inf}^x (h - h_Asy)`; by the total-integral identity this equals
/// `-I_h(x)`.
pub fn left_integral(profile: &Pi2Profile, x: f64) -> Result<Estimate> {
    let l = profile.half_width;
    if !(x.abs() <= l - 0.5) {
        return Err(Error::Window(format!(
            "x = {x} within 0.5 of the window edge {l} or outside it"
        )));
    }
    let bound = tail(&profile.coefficients, l, false).1;
    with_error(profile, |p| left_value(p, x), bound)
}

/// `int_{-inf}^{inf} (h - h_Asy)`.
pub fn total_integral(profile: &Pi2Profile) -> Result<Estimate> {
    let l = profile.half_width;
    let bound = tail(&profile.coefficients, l, true).1 + tail(&profile.coefficients, l, false).1;
    let total = |p: &Pi2Profile| -> Result<f64> {
        let int_h = p.h_integral_from_left(l)?;
        let int_asy = h_asy_integral(1, l, p.t1)? - h_asy_integral(1, -l, p.t1)?;
        Ok(int_h - int_asy + tail(&p.coefficients, l, true).0 + tail(&p.coefficients, l, false).0)
    };
    with_error(profile, total, bound)
}

/// The s-independent block at `k = 1`, `t1 = 0`, evaluated at `x`:
///
/// ```text
/// int_{-inf}^x (h - h_Asy) + (9/56)(4/5)^{1/3} x^{7/3} + log(x^2+1)/72
///     + log(3)/24 - log(5/4)/9 + chi0.
/// ```
///
/// Its x-derivative is `h(x)`, so it is not constant in `x`.
pub fn constant_block(profile: &Pi2Profile, x: f64) -> Result<f64> {
    Ok(left_integral(profile, x)?.value + constant_block_without_integral(x))
}

fn constant_block_without_integral(x: f64) -> f64 {
    h_asy_integral(1, x, 0.0).expect("k = 1")
        + 3f64.ln() / 24.0
        - 1.25f64.ln() / 9.0
        + chi0()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CkRow {
    pub x: f64,
    /// The block as displayed.
    pub literal: f64,
    /// The block minus `int_0^x` of the polynomial Hamiltonian. Constant in
    /// exact arithmetic; the block itself is built from `h` integrated from
    /// `q`, so this checks the two routes against each other.
    pub reduced: f64,
    /// The block with `h` replaced by `h_Asy`.
    pub control: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CkScan {
    pub rows: Vec<CkRow>,
    pub literal_spread: f64,
    pub reduced_spread: f64,
    pub control_spread: f64,
}

fn spread(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = v.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = v.fold(f64::INFINITY, f64::min);
    max - min
}

/// Evaluate the `k = 1` constant block at each `x` and report spreads.
#[allow(non_snake_case)]
pub fn constant_Ck_scan(profile: &Pi2Profile, xs: &[f64]) -> Result<CkScan> {
    if profile.t1 != 0.0 {
        return Err(Error::Domain("the constant block is defined at t1 = 0".into()));
    }
    let h0 = profile.h_local_integral_from_left(0.0)?;
    let rows = xs
        .iter()
        .map(|&x| {
            let literal = constant_block(profile, x)?;
            let int_0x = profile.h_local_integral_from_left(x)? - h0;
            Ok(CkRow {
                x,
                literal,
                reduced: literal - int_0x,
                control: constant_block_without_integral(x),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CkScan {
        literal_spread: spread(rows.iter().map(|r| r.literal)),
        reduced_spread: spread(rows.iter().map(|r| r.reduced)),
        control_spread: spread(rows.iter().map(|r| r.control)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficients() {
        let t1 = 0.7;
        let a = series_coefficients(t1, 12);
        let a0 = 0.1f64.cbrt();
        assert!((a[0] - a0).abs() < 1e-16);
        assert!((a[0] - 0.5 * 0.8f64.cbrt()).abs() < 1e-15);
        assert!((a[2] + 2.0 * t1 / (15.0 * a0)).abs() < 1e-15);
        assert!(a[1] == 0.0 && a[3] == 0.0 && a[5] == 0.0);
        assert!(a[4].abs() < 1e-15);
        let a6 = 64.0 / 2025.0 * 1.25f64.powf(2.0 / 3.0) * t1.powi(3);
        assert!((a[6] - a6).abs() < 1e-14);
        assert!((a[7] + 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn series_solves_equation_at_large_x() {
        let a = series_coefficients(0.0, SERIES_TERMS);
        for &x in &[30.0, -30.0] {
            let [q, q1, q2, q3] = q_series(&a, x);
            let d = 1e-2;
            let q3p = q_series(&a, x + d)[3];
            let q3m = q_series(&a, x - d)[3];
            let q4 = (q3p - q3m) / (2.0 * d);
            let r = q4 - 20.0 * q * q2 - 10.0 * q1 * q1 + 40.0 * q.powi(3) - 4.0 * x;
            assert!(r.abs() < 1e-7, "x={x}: {r} (q'''={q3})");
        }
    }

    #[test]
    fn h_series_matches_h_asy_terms() {
        let t1 = -0.4;
        let a = series_coefficients(t1, SERIES_TERMS);
        for &x in &[50.0, -50.0] {
            let diff = h_series(&a, t1, x) - h_asy(1, x, t1).unwrap();
            // What remains is the x^{-4/3} term from a_8 and the 1/(36x^3)
            // mismatch of the rational part.
            assert!(diff.abs() < 1e-3, "x={x}: {diff}");
        }
    }

    #[test]
    fn h_asy_forms_agree_at_t1_zero() {
        for &x in &[-3.0, 0.0, 0.4, 7.0] {
            let general = h_asy(1, x, 0.0).unwrap();
            let r = 0.8f64.cbrt();
            let display = 3.0 / 8.0 * r * signed_pow(x, 4, 3) + x / (36.0 * (x * x + 1.0));
            assert!((general - display).abs() < 1e-14);
        }
        assert_eq!(h_asy(1, 0.0, 0.0).unwrap(), 0.0);
        assert!(h_asy(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn h_asy_integral_differentiates_back() {
        for &(k, t1) in &[(1, 0.0), (1, 0.6), (2, 0.0), (3, 0.0)] {
            for &x in &[-4.0, -0.7, 1.3, 9.0] {
                let d = 1e-5;
                let fd = (h_asy_integral(k, x + d, t1).unwrap() - h_asy_integral(k, x - d, t1).unwrap())
                    / (2.0 * d);
                let v = h_asy(k, x, t1).unwrap();
                assert!((fd - v).abs() < 1e-7 * v.abs().max(1.0), "k={k} t1={t1} x={x}");
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_tritronquee(10.0, 4000, 0.0).is_err());
        assert!(solve_tritronquee(40.0, 1001, 0.0).is_err());
        assert!(solve_tritronquee(40.0, 4000, f64::NAN).is_err());
    }
}
