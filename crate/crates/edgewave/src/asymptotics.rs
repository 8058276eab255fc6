//! Closed-form pieces of the large-gap expansion for the `P_I^{2k}` kernel
//! determinant: the phase `theta`, the g-functions and their coefficient
//! families, the local conformal maps, the transition variable `chi`, the
//! itemized expansion itself, and the bookkeeping behind its derivation.
//!
//! Everything lives on the real line. Roots of negative numbers are real odd
//! roots (`signed_root`), never principal complex powers.
//!
//! Several quantities are differences of terms of size `|s|^{4k+3}` that
//! cancel down to `O(1)` or less. Those are evaluated from re-expanded series
//! instead of by direct subtraction; the direct forms are kept (in
//! double-double where it helps) as cross-checks.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::painleve2::{hamiltonian_pII, HMProfile};
use crate::pi2k_profile::{h_asy, Pi2Profile};
use crate::specfun::{alpha, alpha_f64, chi0, pochhammer, rational, signed_root, to_f64};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Default `C_1` in the region thresholds `+-C_1 lambda^{-k-1+delta}`.
pub const C1_DEFAULT: f64 = 1.0;
/// Default `delta` in the region thresholds.
pub const DELTA_DEFAULT: f64 = 1.0 / 6.0;
/// Default `epsilon` in the right end of the expansion's x-window.
pub const EPSILON_DEFAULT: f64 = 1.0 / 6.0;

fn binom_f64(p: f64, n: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..n {
        b *= (p - i as f64) / (i + 1) as f64;
    }
    b
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn horner_dd(c: &[f64], t: Dd) -> Dd {
    c.iter().rev().fold(Dd::from(0.0), |acc, &v| acc * t + v)
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("the g-function family needs k >= 1".into()));
    }
    Ok(())
}

/// `theta(eta; y) = 4/(4k+3) eta^{(4k+3)/2} + y eta^{1/2}` for `eta > 0`.
pub fn theta(k: u32, eta: f64, y: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("theta is evaluated on eta > 0, got {eta}")));
    }
    let m = (4 * k + 3) as f64;
    Ok(4.0 / m * eta.powf(m / 2.0) + y * eta.sqrt())
}

fn theta_dd(k: u32, eta: Dd, y: f64) -> Dd {
    let m = 4 * k + 3;
    let root = eta.sqrt();
    root * eta.powi(2 * k + 1) * (4.0 / m as f64) + root * y
}

/// `sum_i c_i (eta - rho)^{i + 1/2}` on `eta > rho`. Both g-functions have
/// this shape with top power `i = 2k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPowerSum {
    pub rho: f64,
    pub c: Vec<f64>,
}

impl HalfPowerSum {
    pub fn eval(&self, eta: f64) -> f64 {
        let t = eta - self.rho;
        t.sqrt() * horner(&self.c, t)
    }

    pub fn eval_dd(&self, eta: Dd) -> Dd {
        let t = eta - self.rho;
        t.sqrt() * horner_dd(&self.c, t)
    }

    /// Coefficients `e_n` of the expansion `sum_n e_n eta^{N + 1/2 - n}` at
    /// infinity, where `N = c.len() - 1`.
    pub fn at_infinity(&self, terms: usize) -> Vec<f64> {
        let top = self.c.len() - 1;
        (0..terms)
            .map(|n| {
                let mut e = 0.0;
                for (i, &ci) in self.c.iter().enumerate() {
                    if ci == 0.0 || n + i < top {
                        continue;
                    }
                    let m = n + i - top;
                    e += ci * binom_f64(i as f64 + 0.5, m) * (-self.rho).powi(m as i32);
                }
                e
            })
            .collect()
    }
}

/// Data of a matching `theta(eta; y) - g(eta) = d eta^{-1/2} + R(eta)`.
#[derive(Debug, Clone, PartialEq)]
struct Matching {
    series: HalfPowerSum,
    k: u32,
    y: f64,
}

impl Matching {
    fn theta_coefficient(&self, n: usize) -> f64 {
        let k = self.k as usize;
        if n == 0 {
            4.0 / (4 * k + 3) as f64
        } else if n == 2 * k + 1 {
            self.y
        } else {
            0.0
        }
    }

    /// Largest mismatch between the expansions of `theta` and `g` in the
    /// orders that must agree exactly.
    fn defect(&self) -> f64 {
        let k = self.k as usize;
        self.series
            .at_infinity(2 * k + 2)
            .iter()
            .enumerate()
            .map(|(n, e)| (e - self.theta_coefficient(n)).abs())
            .fold(0.0, f64::max)
    }

    fn d(&self) -> f64 {
        let k = self.k as usize;
        -self.series.at_infinity(2 * k + 3)[2 * k + 2]
    }

    /// `R(eta) = -sum_{n >= 2k+3} e_n eta^{2k+3/2-n}`, summed until the
    /// terms stop mattering.
    fn remainder(&self, eta: f64) -> Result<f64> {
        let rho = self.series.rho.abs();
        if !(eta > 2.0 * rho && eta > 0.0) {
            return Err(Error::Domain(format!(
                "the expansion at infinity needs eta > 2|rho| = {}, got {eta}",
                2.0 * rho
            )));
        }
        let k = self.k as usize;
        let first = 2 * k + 3;
        let e = self.series.at_infinity(first + 400);
        let top = 2.0 * k as f64 + 1.5;
        let mut sum = 0.0;
        for (n, en) in e.iter().enumerate().skip(first) {
            let term = en * eta.powf(top - n as f64);
            sum -= term;
            if n > first + 4 && term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    }

    /// The same remainder by direct subtraction in double-double.
    fn remainder_direct(&self, eta: f64, d: f64) -> f64 {
        let e = Dd::from(eta);
        (theta_dd(self.k, e, self.y) - self.series.eval_dd(e) - e.sqrt().recip() * d).to_f64()
    }
}

/// Least-squares slope of `log|f|` against `log eta` on `points`
/// log-spaced nodes of `[a, b]`.
pub fn loglog_slope(a: f64, b: f64, points: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let eta = a * (b / a).powf(t);
        let v = f(eta)?;
        if v == 0.0 {
            return Err(Error::Domain(format!("identically zero at {eta}; no slope")));
        }
        xs.push(eta.ln());
        ys.push(v.abs().ln());
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Which of the three `(r, y)` regimes the expansion is in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Algebraic,
    Transition,
    Exponential,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Algebraic => "algebraic",
            Region::Transition => "transition",
            Region::Exponential => "exponential",
        }
    }
}

/// Classify by `alpha_k r^{2k+1} + y` against `+-C_1 lambda^{-k-1+delta}`.
pub fn region_classify(k: u32, lambda: f64, r: f64, y: f64, c1: f64, delta: f64) -> Result<Region> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let v = alpha_f64(k) * r.powi(2 * k as i32 + 1) + y;
    let threshold = c1 * lambda.powf(-(k as f64) - 1.0 + delta);
    Ok(if v < -threshold {
        Region::Algebraic
    } else if v > threshold {
        Region::Exponential
    } else {
        Region::Transition
    })
}

/// `(-1)^{j+1} Gamma(2k+2) Gamma(3/2) / (Gamma(2k+2-j) Gamma(j+3/2)) alpha_k`,
/// the factor of `r^{2k+1-j}` in `b_j`.
fn b_factor(k: u32, j: usize) -> BigRational {
    let top = 2 * k as usize + 1;
    let mut falling = BigRational::one();
    for i in 0..j {
        falling *= BigRational::from_integer(BigInt::from(top - i));
    }
    let sign = if j % 2 == 1 { 1 } else { -1 };
    falling / pochhammer(&rational(3, 2), j) * alpha(k) * BigInt::from(sign)
}

/// `b_0 .. b_{2k+1}` in exact arithmetic.
pub fn b_exact(k: u32, r: &BigRational, y: &BigRational) -> Vec<BigRational> {
    let top = 2 * k as usize + 1;
    let mut b = vec![-(alpha(k) * pow_rational(r, top)) - y];
    for j in 1..=top {
        b.push(b_factor(k, j) * pow_rational(r, top - j));
    }
    b
}

/// `d_1 = alpha_k r^{2k+2} / (4(k+1)) + r y / 2` in exact arithmetic.
pub fn d1_exact(k: u32, r: &BigRational, y: &BigRational) -> BigRational {
    alpha(k) * pow_rational(r, 2 * k as usize + 2) / BigInt::from(4 * (k + 1))
        + r * y / BigInt::from(2)
}

fn pow_rational(r: &BigRational, n: usize) -> BigRational {
    let mut p = BigRational::one();
    for _ in 0..n {
        p *= r;
    }
    p
}

/// The g-function of the algebraic-growth analysis at `(r, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunctionData {
    pub k: u32,
    pub r: f64,
    pub y: f64,
    /// `b_0 .. b_{2k+1}`.
    pub b: Vec<f64>,
    pub d1: f64,
    /// `-(y/alpha_k)^{1/(2k+1)}`, where `b_0` would vanish at this `y`.
    pub r0: f64,
    /// Defined for `y > 0` only.
    pub kappa0: Option<f64>,
    pub region: Region,
}

impl GFunctionData {
    /// Coefficients at `(r, y)`; the region uses `lambda` with the default
    /// thresholds.
    pub fn new(k: u32, r: f64, y: f64, lambda: f64) -> Result<Self> {
        check_k(k)?;
        let top = 2 * k as usize + 1;
        let a = alpha_f64(k);
        let mut b = vec![-a * r.powi(top as i32) - y];
        for j in 1..=top {
            b.push(to_f64(&b_factor(k, j)) * r.powi((top - j) as i32));
        }
        Ok(GFunctionData {
            k,
            r,
            y,
            b,
            d1: a * r.powi(top as i32 + 1) / (4.0 * (k as f64 + 1.0)) + r * y / 2.0,
            r0: -signed_root(y / a, top as u32),
            kappa0: if y > 0.0 { Some(kappa0(k, r, y)?) } else { None },
            region: region_classify(k, lambda, r, y, C1_DEFAULT, DELTA_DEFAULT)?,
        })
    }

    pub fn b0(&self) -> f64 {
        self.b[0]
    }

    /// `(-1)^{j+1} b_j`, the coefficients of `(eta - r)^{j+1/2}` in `g_1`.
    fn signed_b(&self) -> Vec<f64> {
        self.b
            .iter()
            .enumerate()
            .map(|(j, &b)| if j % 2 == 1 { b } else { -b })
            .collect()
    }

    pub fn half_power_sum(&self) -> HalfPowerSum {
        HalfPowerSum {
            rho: self.r,
            c: self.signed_b(),
        }
    }

    fn matching(&self) -> Matching {
        Matching {
            series: self.half_power_sum(),
            k: self.k,
            y: self.y,
        }
    }

    /// `g_1(eta) = sum_j (-1)^{j+1} b_j (eta - r)^{j+1/2}` for `eta > r`.
    pub fn g1(&self, eta: f64) -> Result<f64> {
        if !(eta > self.r) {
            return Err(Error::Domain(format!("g1 needs eta > r = {}, got {eta}", self.r)));
        }
        Ok(self.half_power_sum().eval(eta))
    }

    /// `p_1` from its closed form: `4/(4k+3) sum_j (1/2)_j/j! r^j eta^{2k+1-j} + y`.
    pub fn p1(&self, eta: f64) -> f64 {
        let top = 2 * self.k as usize + 1;
        let mut c = BigRational::one();
        let mut sum = 0.0;
        for j in 0..=top {
            sum += to_f64(&c) * self.r.powi(j as i32) * eta.powi((top - j) as i32);
            c = c * (rational(1, 2) + BigInt::from(j)) / BigInt::from(j + 1);
        }
        4.0 / (4 * self.k + 3) as f64 * sum + self.y
    }

    /// `p_1 = g_1 / (eta - r)^{1/2}` from the b-coefficients.
    pub fn p1_from_b(&self, eta: f64) -> f64 {
        horner(&self.signed_b(), eta - self.r)
    }

    /// `p~_1` from its closed form: `2 sum_j (-1/2)_j/j! r^j eta^{2k+1-j} + y/2`.
    pub fn p1_tilde(&self, eta: f64) -> f64 {
        let top = 2 * self.k as usize + 1;
        let mut c = BigRational::one();
        let mut sum = 0.0;
        for j in 0..=top {
            sum += to_f64(&c) * self.r.powi(j as i32) * eta.powi((top - j) as i32);
            c = c * (rational(-1, 2) + BigInt::from(j)) / BigInt::from(j + 1);
        }
        2.0 * sum + self.y / 2.0
    }

    /// `p~_1 = (eta - r)^{1/2} g_1'` from the b-coefficients:
    /// `sum_j (-1)^{j+1} (j + 1/2) b_j (eta - r)^j`.
    pub fn p1_tilde_from_b(&self, eta: f64) -> f64 {
        let c: Vec<f64> = self
            .signed_b()
            .iter()
            .enumerate()
            .map(|(j, &v)| (j as f64 + 0.5) * v)
            .collect();
        horner(&c, eta - self.r)
    }

    /// `d_1` read off the expansion of `g_1` at infinity.
    pub fn d1_from_matching(&self) -> f64 {
        self.matching().d()
    }

    /// Largest mismatch between `theta` and `g_1` in the orders above
    /// `eta^{-1/2}`; zero up to rounding.
    pub fn matching_defect(&self) -> f64 {
        self.matching().defect()
    }

    /// `theta(eta; y) - g_1(eta) - d_1 eta^{-1/2}`, from the expansion at
    /// infinity. Needs `eta > 2|r|`.
    pub fn matching_remainder(&self, eta: f64) -> Result<f64> {
        self.matching().remainder(eta)
    }

    /// The same remainder by direct subtraction in double-double. It loses
    /// about `(2k + 3/2) log10(eta)` digits out of 32.
    pub fn matching_remainder_direct(&self, eta: f64) -> f64 {
        self.matching().remainder_direct(eta, self.d1)
    }

    /// `f_1(eta) = eta [1 + sum_{j>=1} (-1)^j b_j b_0^{j-1} eta^j]^2`.
    pub fn f1(&self, eta: f64) -> Result<f64> {
        let b0 = self.b0();
        if b0 == 0.0 {
            return Err(Error::Domain("f1 is undefined at b0 = 0".into()));
        }
        let mut inner = 1.0;
        for (j, &bj) in self.b.iter().enumerate().skip(1) {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * bj * b0.powi(j as i32 - 1) * eta.powi(j as i32);
        }
        Ok(eta * inner * inner)
    }

    /// `f_1(eta) = b_0^{-3} (-g_1(b_0 eta + r))^2`, the defining form.
    pub fn f1_from_g1(&self, eta: f64) -> Result<f64> {
        let b0 = self.b0();
        if b0 == 0.0 {
            return Err(Error::Domain("f1 is undefined at b0 = 0".into()));
        }
        let g = self.g1(b0 * eta + self.r)?;
        Ok(g * g / b0.powi(3))
    }

    /// `f_2(eta) = [(3/2) sum_{i>=1} (-1)^{i+1} b_i (eta - r)^{i-1}]^{2/3} (eta - r)`.
    pub fn f2(&self, eta: f64) -> Result<f64> {
        let c = &self.signed_b()[1..];
        let bracket = 1.5 * horner(c, eta - self.r);
        if !(bracket > 0.0) {
            return Err(Error::Domain(format!(
                "f2 bracket {bracket} is not positive at eta = {eta}"
            )));
        }
        Ok(bracket.cbrt().powi(2) * (eta - self.r))
    }

    /// `f_2'(r) = ((3/2) b_1)^{2/3}`.
    pub fn f2_prime_at_r(&self) -> f64 {
        (1.5 * self.b[1]).cbrt().powi(2)
    }

    /// `kappa(r) = -b_0 ((3/2) b_1)^{-1/3}`.
    pub fn kappa_at_r(&self) -> Result<f64> {
        let b1 = self.b[1];
        if !(b1 > 0.0) {
            return Err(Error::Domain("kappa(r) needs b1 > 0, i.e. r != 0".into()));
        }
        Ok(-self.b0() / (1.5 * b1).cbrt())
    }
}

/// `kappa_0 = -b_0 [(2k+1) alpha_k (y/alpha_k)^{2k/(2k+1)}]^{-1/3}`, for `y > 0`.
pub fn kappa0(k: u32, r: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!(
            "kappa0 is defined for y > 0 (the transition analysis), got {y}"
        )));
    }
    let p = 2 * k as i32 + 1;
    let a = alpha_f64(k);
    let b0 = -a * r.powi(p) - y;
    Ok(-b0 / kappa0_scale(k, y))
}

fn kappa0_scale(k: u32, y: f64) -> f64 {
    let p = (2 * k + 1) as f64;
    let a = alpha_f64(k);
    (p * a * (y / a).powf(2.0 * k as f64 / p)).cbrt()
}

/// `d kappa_0 / dr = (2k+1) alpha_k r^{2k} / [(2k+1) alpha_k (y/alpha_k)^{2k/(2k+1)}]^{1/3}`.
pub fn kappa0_dr(k: u32, r: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("kappa0 is defined for y > 0, got {y}")));
    }
    let p = 2 * k + 1;
    Ok(p as f64 * alpha_f64(k) * r.powi(2 * k as i32) / kappa0_scale(k, y))
}

/// Outcome of the sign check behind the g-function sign lemma.
#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub samples: usize,
    pub violations: usize,
    /// First `(eta, p~_1(eta))` with `p~_1 >= 0`.
    pub first_violation: Option<(f64, f64)>,
    /// Largest sampled value; negative when there are no violations.
    pub max_value: f64,
}

/// Check `p~_1(eta) < 0` at `samples` midpoints of `(-span, r)`. Requires
/// `alpha_k r^{2k+1} + y <= 0` and `r > -span`.
pub fn lemma41_sign_check(k: u32, r: f64, y: f64, span: f64, samples: usize) -> Result<SignReport> {
    check_k(k)?;
    let v = alpha_f64(k) * r.powi(2 * k as i32 + 1) + y;
    if v > 0.0 {
        return Err(Error::Domain(format!(
            "sign check needs alpha_k r^(2k+1) + y <= 0, got {v}"
        )));
    }
    if !(r > -span) || samples == 0 {
        return Err(Error::Domain(format!("empty sample interval (-{span}, {r})")));
    }
    let g = GFunctionData::new(k, r, y, 1.0)?;
    let mut report = SignReport {
        samples,
        violations: 0,
        first_violation: None,
        max_value: f64::NEG_INFINITY,
    };
    for i in 0..samples {
        let eta = -span + (r + span) * (i as f64 + 0.5) / samples as f64;
        let p = g.p1_tilde(eta);
        report.max_value = report.max_value.max(p);
        if p >= 0.0 {
            report.violations += 1;
            report.first_violation.get_or_insert((eta, p));
        }
    }
    Ok(report)
}

/// The g-function of the transition analysis, `g_2 = (eta - r_0)^{3/2} p_2(eta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Family {
    pub k: u32,
    pub y: f64,
    pub r0: f64,
    /// Coefficient of `eta^{2k-j}` in `p_2`, for `j = 0..=2k`.
    pub p2: Vec<f64>,
    /// Coefficient of `eta^{-1/2}` in `theta - g_2`. The closed form is not
    /// needed anywhere, so it is read off the expansion at infinity.
    pub d2: f64,
    pub d2_from_matching: bool,
    /// Largest mismatch between `theta` and `g_2` above order `eta^{-1/2}`.
    pub matching_defect: f64,
    series: HalfPowerSum,
}

/// `r_0 = -(y/alpha_k)^{1/(2k+1)}` and `p_2` coefficients
/// `4/(4k+3) (3/2)_j / j! r_0^j`.
pub fn g2_family(k: u32, y: f64) -> Result<G2Family> {
    let top = 2 * k as usize;
    let a = alpha_f64(k);
    let r0 = -signed_root(y / a, top as u32 + 1);
    let lead = 4.0 / (4 * k + 3) as f64;
    let mut c = BigRational::one();
    let mut p2 = Vec::with_capacity(top + 1);
    for j in 0..=top {
        p2.push(lead * to_f64(&c) * r0.powi(j as i32));
        c = c * (rational(3, 2) + BigInt::from(j)) / BigInt::from(j + 1);
    }
    // Re-expand p_2 about r_0: eta^m = sum_i binom(m, i) (eta - r_0)^i r_0^{m-i}.
    let mut half = vec![0.0; top + 2];
    for (j, &pj) in p2.iter().enumerate() {
        let m = top - j;
        for i in 0..=m {
            half[i + 1] += pj * binom_f64(m as f64, i) * r0.powi((m - i) as i32);
        }
    }
    let series = HalfPowerSum { rho: r0, c: half };
    let matching = Matching {
        series: series.clone(),
        k,
        y,
    };
    Ok(G2Family {
        k,
        y,
        r0,
        p2,
        d2: matching.d(),
        d2_from_matching: true,
        matching_defect: matching.defect(),
        series,
    })
}

impl G2Family {
    pub fn p2_eval(&self, eta: f64) -> f64 {
        self.p2.iter().fold(0.0, |acc, &v| acc * eta + v)
    }

    fn p2_derivative(&self, eta: f64) -> f64 {
        let top = self.p2.len() - 1;
        let mut d = 0.0;
        for (j, &v) in self.p2.iter().enumerate().take(top) {
            let m = top - j;
            d += m as f64 * v * eta.powi(m as i32 - 1);
        }
        d
    }

    /// `g_2(eta)` for `eta >= r_0`.
    pub fn g2(&self, eta: f64) -> Result<f64> {
        if !(eta >= self.r0) {
            return Err(Error::Domain(format!("g2 needs eta >= r0 = {}, got {eta}", self.r0)));
        }
        Ok((eta - self.r0).powf(1.5) * self.p2_eval(eta))
    }

    pub fn half_power_sum(&self) -> &HalfPowerSum {
        &self.series
    }

    /// `f_3(eta; r_0) = ((3/2) g_2)^{2/3} = ((3/2) p_2(eta))^{2/3} (eta - r_0)`.
    /// The second form continues the map across `r_0`; it needs `p_2 > 0`.
    pub fn f3(&self, eta: f64) -> Result<f64> {
        let p = self.p2_eval(eta);
        if !(p > 0.0) {
            return Err(Error::Domain(format!("f3 needs p2(eta) > 0, got {p} at {eta}")));
        }
        Ok((1.5 * p).cbrt().powi(2) * (eta - self.r0))
    }

    pub fn f3_prime(&self, eta: f64) -> Result<f64> {
        let p = self.p2_eval(eta);
        if !(p > 0.0) {
            return Err(Error::Domain(format!("f3 needs p2(eta) > 0, got {p} at {eta}")));
        }
        let c = (1.5 * p).cbrt();
        Ok(c * c + self.p2_derivative(eta) / c * (eta - self.r0))
    }

    /// `theta(eta; y) - g_2(eta) - d_2 eta^{-1/2}` from the expansion at
    /// infinity. Needs `eta > 2|r_0|`.
    pub fn matching_remainder(&self, eta: f64) -> Result<f64> {
        Matching {
            series: self.series.clone(),
            k: self.k,
            y: self.y,
        }
        .remainder(eta)
    }
}

/// The transition variable `chi(s; x)` for `x > 0`: the rational form where
/// `alpha_k s^{2k+1} + x <= 0`, `f_3(s; s_0)` otherwise.
pub fn chi_variable(k: u32, s: f64, x: f64) -> Result<f64> {
    Ok(chi_with_slope(k, s, x)?.0)
}

/// `d chi / ds`, analytic on each branch.
pub fn chi_ds(k: u32, s: f64, x: f64) -> Result<f64> {
    Ok(chi_with_slope(k, s, x)?.1)
}

fn chi_with_slope(k: u32, s: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("chi is defined for x > 0, got {x}")));
    }
    let p = 2 * k as i32 + 1;
    let pf = p as f64;
    let a = alpha_f64(k);
    let big_x = a * s.powi(p) + x;
    if big_x <= 0.0 {
        let denom = pf.cbrt() * a.powf(1.0 / (3.0 * pf)) * x.powf(2.0 * k as f64 / (3.0 * pf));
        Ok((big_x / denom, pf * a * s.powi(p - 1) / denom))
    } else {
        let g2 = g2_family(k, x)?;
        Ok((g2.f3(s)?, g2.f3_prime(s)?))
    }
}

/// `s_0 = -(x/alpha_k)^{1/(2k+1)}`, the zero of `alpha_k s^{2k+1} + x`.
pub fn s0(k: u32, x: f64) -> f64 {
    -signed_root(x / alpha_f64(k), 2 * k + 1)
}

/// How `I_h(x)` enters the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IhInput {
    Value(f64),
    /// Structural evaluation with the `I_h` term left at zero.
    Omitted,
}

/// The right side of the large-gap expansion, term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticBreakdown {
    /// `alpha_k^2 s^{4k+3} / (4(4k+3))`
    pub quartic_power: f64,
    /// `alpha_k x s^{2k+2} / (2(2k+2))`
    pub cross: f64,
    /// `x^2 s / 4`
    pub quadratic: f64,
    /// `-(1/8) log|alpha_k s^{2k+1} + x|`
    pub log_term: f64,
    /// `-I_h(x)`
    pub ih_term: f64,
    /// `(2k+1)^2 / (2(2k+2)(4k+3)) alpha_k^{-1/(2k+1)} x^{(4k+3)/(2k+1)}`
    pub power_x: f64,
    /// `k log(x^2 + 1) / (24(2k+1))`
    pub log_x: f64,
    /// `log(2k+1)/24 + log(alpha_k)/(24(2k+1)) + chi0`
    pub const_block: f64,
    pub total: f64,
    pub ih_supplied: bool,
    /// False when `x` is outside `[-|s|^{2k+1}, alpha_k|s|^{2k+1} - |s|^{2k/3+1/6}]`.
    pub in_window: bool,
}

impl AsymptoticBreakdown {
    /// The itemized terms in summation order.
    pub fn terms(&self) -> [(&'static str, f64); 8] {
        [
            ("quartic_power", self.quartic_power),
            ("cross", self.cross),
            ("quadratic", self.quadratic),
            ("log_term", self.log_term),
            ("ih_term", self.ih_term),
            ("power_x", self.power_x),
            ("log_x", self.log_x),
            ("const_block", self.const_block),
        ]
    }
}

/// `A_k = (2k+1)^2 / (2(2k+2)(4k+3)) alpha_k^{-1/(2k+1)}`.
fn power_x_coefficient(k: u32) -> f64 {
    let kk = k as f64;
    let pf = 2.0 * kk + 1.0;
    pf * pf / (2.0 * (2.0 * kk + 2.0) * (4.0 * kk + 3.0)) * alpha_f64(k).powf(-1.0 / pf)
}

/// The expansion at `(s, x)` for `s < 0`. `k = 0` is accepted and gives the
/// rescaled Airy case. Outside the window the result is returned with
/// `in_window = false`.
pub fn theorem_expansion(k: u32, s: f64, x: f64, ih: IhInput) -> Result<AsymptoticBreakdown> {
    if !(s < 0.0) {
        return Err(Error::Domain(format!("the expansion needs s < 0, got {s}")));
    }
    let kk = k as f64;
    let p = 2 * k + 1;
    let pf = p as f64;
    let a = alpha_f64(k);
    let u = -s;
    let quartic_power = a * a * s.powi(4 * k as i32 + 3) / (4.0 * (4.0 * kk + 3.0));
    let cross = a * x * s.powi(2 * k as i32 + 2) / (2.0 * (2.0 * kk + 2.0));
    let quadratic = x * x * s / 4.0;
    let log_term = -(a * s.powi(p as i32) + x).abs().ln() / 8.0;
    let (ih_term, ih_supplied) = match ih {
        IhInput::Value(v) => (-v, true),
        IhInput::Omitted => (0.0, false),
    };
    let power_x = power_x_coefficient(k) * signed_root(x, p).powi(4 * k as i32 + 3);
    let log_x = kk * (x * x + 1.0).ln() / (24.0 * pf);
    let const_block = pf.ln() / 24.0 + a.ln() / (24.0 * pf) + chi0();
    let total = quartic_power + cross + quadratic + log_term + ih_term + power_x + log_x + const_block;
    let up = u.powi(p as i32);
    let in_window =
        x >= -up && x <= a * up - u.powf(2.0 * kk / 3.0 + EPSILON_DEFAULT);
    Ok(AsymptoticBreakdown {
        quartic_power,
        cross,
        quadratic,
        log_term,
        ih_term,
        power_x,
        log_x,
        const_block,
        total,
        ih_supplied,
        in_window,
    })
}

/// The `s`-power coefficients of the `k = 1` expansion derived from
/// `alpha_1`: `alpha^2/(4(4k+3))`, `alpha/(2(2k+2))` and `1/4`.
pub fn k1_power_coefficients() -> [BigRational; 3] {
    let a = alpha(1);
    [
        &a * &a / BigInt::from(28),
        a / BigInt::from(8),
        rational(1, 4),
    ]
}

/// The `k = 1` expansion with general `t1`, as printed:
///
/// ```text
/// 25/448 s^7 + t1 s^5/4 + 5x s^4/32 + t1^2 s^3/3 + t1 x s^2/2 + x^2 s/4
///   - log|5s^3/4 + x + 2 t1 s|/8 - J0 + J1 + log(x^2+1)/72
///   + log(3)/24 + log(5/4)/72 + chi0
/// ```
///
/// `j0` is `int_x^inf (h - h_Asy)`. `J1` is the polynomial part of the
/// antiderivative of `h_Asy`; its `t1^3` term carries `x^{1/3}`.
pub fn expansion_k1(s: f64, x: f64, t1: f64, j0: f64) -> f64 {
    let r = 0.8f64.cbrt();
    let j1 = 9.0 / 56.0 * r * signed_root(x, 3).powi(7)
        - 3.0 * t1 / 10.0 * r * r * signed_root(x, 3).powi(5)
        + 4.0 * t1 * t1 / 15.0 * x
        - 8.0 / 45.0 * r * t1.powi(3) * signed_root(x, 3);
    25.0 / 448.0 * s.powi(7) + t1 * s.powi(5) / 4.0 + 5.0 * x * s.powi(4) / 32.0
        + t1 * t1 * s.powi(3) / 3.0
        + t1 * x * s * s / 2.0
        + x * x * s / 4.0
        - (1.25 * s.powi(3) + x + 2.0 * t1 * s).abs().ln() / 8.0
        - j0
        + j1
        + (x * x + 1.0).ln() / 72.0
        + 3f64.ln() / 24.0
        + 1.25f64.ln() / 72.0
        + chi0()
}

/// The large-gap expansion along `x = alpha_k|s|^{2k+1} + (2k+1)^{1/3}
/// alpha_k^{1/3} s~ |s|^{2k/3}`, minus the Airy asymptote in `s~`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEval {
    pub x: f64,
    /// `(2k+1)^{1/3} alpha_k^{1/3} s~ |s|^{-(4k+3)/3} / alpha_k`, so that
    /// `x = alpha_k |s|^{2k+1} (1 + delta)`.
    pub delta: f64,
    /// Polynomial terms minus `-|s~|^3/12`.
    pub power_block: f64,
    /// Logarithms and constants minus `-(1/8)log|s~| + chi0`.
    pub log_block: f64,
    /// `-I_h(x)`; zero when not available (`k != 1`).
    pub ih_term: f64,
    pub ih_included: bool,
    pub defect: f64,
}

/// Evaluate the transition defect without forming the `|s|^{4k+3}` terms.
///
/// Writing `x = alpha_k u^{2k+1} (1 + delta)` with `u = |s|`, the four power
/// terms add up to `alpha_k^2 u^{4k+3} c_0 sum_{n>=4} binom(q, n) delta^n
/// + s~^3/12` with `c_0 = (2k+1)^2/(4(k+1)(4k+3))` and `q = (4k+3)/(2k+1)`;
/// the orders `delta^0 .. delta^2` cancel identically. The logarithms reduce
/// to `-(1/8)log|s~|` plus `k log(1+delta)/(12(2k+1)) + k log(1+x^{-2})/(24(2k+1))`.
///
/// `simplify_log` replaces `log(x^2+1)` by `2 log x`, dropping the last term.
pub fn transition_eval(k: u32, s: f64, stilde: f64, simplify_log: bool) -> Result<TransitionEval> {
    if !(s < 0.0) {
        return Err(Error::Domain(format!("transition needs s < 0, got {s}")));
    }
    let u = -s;
    let kk = k as f64;
    let pf = 2.0 * kk + 1.0;
    let upper = u.powf(kk / 3.0 + 0.25);
    if !(stilde < 0.0 && -stilde < upper) {
        return Err(Error::Window(format!(
            "s~ = {stilde} outside the scaling window -|s|^(k/3+1/4) = {} < s~ < 0",
            -upper
        )));
    }
    let a = alpha_f64(k);
    let kappa = (pf * a).cbrt();
    let delta = kappa * stilde * u.powf(-(4.0 * kk + 3.0) / 3.0) / a;
    if !(delta > -1.0) {
        return Err(Error::Window(format!("x would not be positive (delta = {delta})")));
    }
    let x = a * u.powi(2 * k as i32 + 1) * (1.0 + delta);
    let q = (4.0 * kk + 3.0) / pf;
    let c0 = pf * pf / (4.0 * (kk + 1.0) * (4.0 * kk + 3.0));
    let mut series = 0.0;
    let mut binom = binom_f64(q, 4);
    let mut dn = delta.powi(4);
    for n in 4..400 {
        let term = binom * dn;
        series += term;
        if term.abs() <= 1e-18 * series.abs() {
            break;
        }
        binom *= (q - n as f64) / (n + 1) as f64;
        dn *= delta;
    }
    let power_block = a * a * u.powi(4 * k as i32 + 3) * c0 * series;
    let mut log_block = kk * delta.ln_1p() / (12.0 * pf);
    if !simplify_log {
        log_block += kk * (1.0 / (x * x)).ln_1p() / (24.0 * pf);
    }
    let (ih_term, ih_included) = if k == 1 {
        let v = crate::pi2k_profile::I_h_from_expansion(0.0, x)?.value;
        (-v, true)
    } else {
        (0.0, false)
    };
    Ok(TransitionEval {
        x,
        delta,
        power_block,
        log_block,
        ih_term,
        ih_included,
        defect: power_block + log_block + ih_term,
    })
}

/// Intermediate quantities of the integral decomposition at one `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProofScaffold {
    pub k: u32,
    pub s: f64,
    /// `+-|s|^{2k+1}`.
    pub x0: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub j2_s1: f64,
    pub j2_s2: f64,
    /// `alpha_k s_1^{2k+1} + x_0` in double-double.
    pub relation_lhs: f64,
    /// `-|x_0|^{(k+1/6)/(2k+1)}`.
    pub relation_rhs: f64,
    /// `A x_0^{(4k+3)/(2k+1)} + J_2(s_1; x_0) - chi(s_1; x_0)^3 / 12`, from the
    /// re-expanded series.
    pub cancellation: f64,
    /// The same combination by direct double-double subtraction, when that
    /// keeps at least six digits.
    pub cancellation_direct: Option<f64>,
}

/// `J_2(s; x) = alpha^2 s^{4k+3}/(4(4k+3)) + alpha x s^{2k+2}/(4k+4) + x^2 s/4`.
pub fn j2(k: u32, s: f64, x: f64) -> f64 {
    let kk = k as f64;
    let a = alpha_f64(k);
    a * a * s.powi(4 * k as i32 + 3) / (4.0 * (4.0 * kk + 3.0))
        + a * x * s.powi(2 * k as i32 + 2) / (4.0 * kk + 4.0)
        + x * x * s / 4.0
}

fn j2_dd(k: u32, s: Dd, x: Dd) -> Dd {
    let kk = k as f64;
    let a = alpha_f64(k);
    // Coefficients divided in double-double: 25/448 is not a binary fraction.
    s.powi(4 * k + 3) * (Dd::from(a * a) / (4.0 * (4.0 * kk + 3.0)))
        + x * s.powi(2 * k + 2) * (Dd::from(a) / (4.0 * kk + 4.0))
        + x * x * s / 4.0
}

/// `s_1`, `s_2`, `J_2` and the cancellation combination at `s < 0` with
/// `x_0 = sign |s|^{2k+1}`. With `eps = |s|^{-k-5/6}`,
/// `s_{1,2} = -(x_0/alpha_k)^{1/(2k+1)} (1 +- sgn(x_0) eps)^{1/(2k+1)}`.
pub fn proof_scaffold(k: u32, s: f64, x0_sign: i32) -> Result<ProofScaffold> {
    check_k(k)?;
    if !(s < 0.0) {
        return Err(Error::Domain(format!("scaffold needs s < 0, got {s}")));
    }
    if x0_sign != 1 && x0_sign != -1 {
        return Err(Error::Domain(format!("x0 sign must be +1 or -1, got {x0_sign}")));
    }
    let sg = x0_sign as f64;
    let u = -s;
    let kk = k as f64;
    let p = 2 * k + 1;
    let pf = p as f64;
    let a = alpha_f64(k);
    let eps = u.powf(-kk - 5.0 / 6.0);
    let x0 = sg * u.powi(p as i32);

    let root_a = Dd::from(a).nth_root(p);
    let ud = Dd::from(u);
    let s0d = -(ud / root_a) * sg;
    let s1d = s0d * (Dd::from(1.0) + sg * eps).nth_root(p);
    let s2d = s0d * (Dd::from(1.0) - sg * eps).nth_root(p);
    let x0d = Dd::from(x0);
    let big_x = s1d.powi(p) * a + x0d;
    let relation_rhs = -u.powf(kk + 1.0 / 6.0);

    let cancellation = cancellation_series(k, u, eps, sg);
    let cancellation_direct = if u.powi(4 * k as i32 + 3) < 1e22 {
        let c0 = Dd::from(pf * pf) / (4.0 * (kk + 1.0) * (4.0 * kk + 3.0));
        let power = ud.powi(4 * k + 3) * sg * c0 / root_a;
        let chi_cubed = big_x.powi(3) / (root_a * ud.powi(2 * k) * pf);
        Some((power + j2_dd(k, s1d, x0d) - chi_cubed / 12.0).to_f64())
    } else {
        None
    };

    Ok(ProofScaffold {
        k,
        s,
        x0,
        s0: s0d.to_f64(),
        s1: s1d.to_f64(),
        s2: s2d.to_f64(),
        j2_s1: j2(k, s1d.to_f64(), x0),
        j2_s2: j2(k, s2d.to_f64(), x0),
        relation_lhs: big_x.to_f64(),
        relation_rhs,
        cancellation,
        cancellation_direct,
    })
}

/// With `p = 1/(2k+1)` and `beta_n = -[c_0 binom(p,n) + c_1 binom(p,n-1)
/// + c_2 binom(p,n-2)]`, the combination equals
/// `sgn(x_0) u^{4k+3} alpha^{-p} sum_{n>=4} beta_n (sgn(x_0) eps)^n`.
/// `beta_0 .. beta_3` cancel against `-chi^3/12` and each other.
fn cancellation_series(k: u32, u: f64, eps: f64, sg: f64) -> f64 {
    let kk = k as f64;
    let pf = 2.0 * kk + 1.0;
    let p = 1.0 / pf;
    let c0 = pf * pf / (4.0 * (kk + 1.0) * (4.0 * kk + 3.0));
    let c1 = -pf / (4.0 * (kk + 1.0) * (4.0 * kk + 3.0));
    let c2 = 1.0 / (4.0 * (4.0 * kk + 3.0));
    let e = sg * eps;
    let mut sum = 0.0;
    for n in 4..200 {
        let beta = -(c0 * binom_f64(p, n) + c1 * binom_f64(p, n - 1) + c2 * binom_f64(p, n - 2));
        let term = beta * e.powi(n as i32);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sg * u.powi(4 * k as i32 + 3) / alpha_f64(k).powf(p) * sum
}

/// Four-term expansion of `s_1` in `u = |s|`, generalizing the `x_0 > 0`
/// display to both signs:
/// `alpha^{1/(2k+1)} s_1 = -sgn(x_0) u sum_{n<4} binom(1/(2k+1), n) (sgn(x_0) eps)^n`.
pub fn s1_expansion(k: u32, u: f64, x0_sign: i32) -> f64 {
    let kk = k as f64;
    let p = 1.0 / (2.0 * kk + 1.0);
    let sg = x0_sign as f64;
    let e = sg * u.powf(-kk - 5.0 / 6.0);
    let sum: f64 = (0..4).map(|n| binom_f64(p, n) * e.powi(n as i32)).sum();
    -sg * u * sum / alpha_f64(k).powf(p)
}

/// `alpha^{1/(2k+1)} (s_1 - s1_expansion)`, in double-double so that the
/// `O(u^{-4k-7/3})` remainder is resolved.
pub fn s1_expansion_remainder(k: u32, u: f64, x0_sign: i32) -> f64 {
    let p = 2 * k + 1;
    let sg = x0_sign as f64;
    let e = Dd::from(sg * u.powf(-(k as f64) - 5.0 / 6.0));
    let exact = (Dd::from(1.0) + e).nth_root(p);
    let pd = Dd::from(1.0) / p as f64;
    let mut binom = Dd::from(1.0);
    let mut en = Dd::from(1.0);
    let mut four = Dd::from(0.0);
    for n in 0..4 {
        four += binom * en;
        binom = binom * (pd - n as f64) / (n + 1) as f64;
        en = en * e;
    }
    ((exact - four) * (-sg * u)).to_f64()
}

/// Where `h(x)` comes from in the `x`-derivative approximant.
#[derive(Debug, Clone, Copy)]
pub enum HSupplier<'a> {
    Profile(&'a Pi2Profile),
    /// `h_Asy` in place of `h`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approximant {
    DfDx,
    DfDsAlgebraic,
    DfDsTransition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximantValue {
    pub value: f64,
    /// False when `(s, x)` is outside the region the approximant is stated for.
    pub in_region: bool,
    /// True when `h_Asy` stood in for `h`.
    pub h_fallback: bool,
}

/// Leading terms of the derivative expansions, error terms dropped.
///
/// * `DfDx`: `h(x) + alpha s^{2k+2}/(4k+4) + x s/2 - 1/(8X)`
/// * `DfDsAlgebraic`: `X^2/4 - (2k+1) alpha s^{2k} / (8X)`
/// * `DfDsTransition`: `(d chi/ds) H(chi)` with `H` the Hastings-McLeod
///   Hamiltonian from `hm`
///
/// where `X = alpha_k s^{2k+1} + x`.
pub fn lemma_approximant(
    k: u32,
    s: f64,
    x: f64,
    which: Approximant,
    h: HSupplier<'_>,
    hm: Option<&HMProfile>,
) -> Result<ApproximantValue> {
    let kk = k as f64;
    let p = 2 * k as i32 + 1;
    let a = alpha_f64(k);
    let big_x = a * s.powi(p) + x;
    let lambda = s.abs().max(x.abs().powf(1.0 / p as f64));
    let algebraic = lambda > 0.0
        && region_classify(k, lambda, s / lambda, x / lambda.powi(p), C1_DEFAULT, DELTA_DEFAULT)?
            == Region::Algebraic;
    match which {
        Approximant::DfDx => {
            let (hx, h_fallback) = match h {
                HSupplier::Profile(profile) => {
                    if k != 1 {
                        return Err(Error::Domain("the solved profile is the k = 1 case".into()));
                    }
                    (profile.eval_h(x)?, false)
                }
                HSupplier::Asymptotic => (h_asy(k, x, 0.0)?, true),
            };
            Ok(ApproximantValue {
                value: hx + a * s.powi(p + 1) / (4.0 * kk + 4.0) + x * s / 2.0
                    - 1.0 / (8.0 * big_x),
                in_region: algebraic,
                h_fallback,
            })
        }
        Approximant::DfDsAlgebraic => Ok(ApproximantValue {
            value: big_x * big_x / 4.0 - p as f64 * a * s.powi(p - 1) / (8.0 * big_x),
            in_region: algebraic,
            h_fallback: false,
        }),
        Approximant::DfDsTransition => {
            let hm = hm.ok_or_else(|| {
                Error::Domain("the transition approximant needs a Hastings-McLeod profile".into())
            })?;
            let (chi, slope) = chi_with_slope(k, s, x)?;
            let band = x.abs().powf((kk + 1.0 / 6.0) / p as f64);
            Ok(ApproximantValue {
                value: slope * hamiltonian_pII(hm, chi)?,
                in_region: big_x.abs() <= band,
                h_fallback: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_values() {
        assert!((theta(1, 1.0, 0.0).unwrap() - 4.0 / 7.0).abs() < 1e-15);
        assert!((theta(1, 1.0, -1.0).unwrap() + 3.0 / 7.0).abs() < 1e-15);
        assert!(theta(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn b_factor_top_is_theta_coefficient() {
        for k in 1..5 {
            assert_eq!(b_factor(k, 2 * k as usize + 1), rational(4, 4 * k as i64 + 3));
        }
    }

    #[test]
    fn half_power_expansion_reproduces_values() {
        let g = HalfPowerSum {
            rho: 0.7,
            c: vec![0.3, -1.1, 0.5],
        };
        let eta = 9.0f64;
        let e = g.at_infinity(80);
        let direct: f64 = e
            .iter()
            .enumerate()
            .map(|(n, en)| en * eta.powf(2.5 - n as f64))
            .sum();
        assert!((direct - g.eval(eta)).abs() < 1e-12 * g.eval(eta).abs());
    }

    #[test]
    fn cancellation_series_matches_double_double() {
        // At u = 10 the direct form loses about 22 of 32 digits.
        let sc = proof_scaffold(1, -10.0, 1).unwrap();
        let direct = sc.cancellation_direct.unwrap();
        assert!((sc.cancellation - direct).abs() < 1e-8 * direct.abs());
        assert!((sc.cancellation - 0.005_926_609_558_52).abs() < 1e-12);
    }
}
