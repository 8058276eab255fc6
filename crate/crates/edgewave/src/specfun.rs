//! Airy functions, Gamma, and the hierarchy constants `alpha_k` and `chi0`.
//!
//! Ai and Ai' are evaluated from the Maclaurin series in double-double
//! arithmetic on `[-12, 8]` and from the Poincare expansions outside it. In
//! plain f64 the Maclaurin sums at `|x| = 8` already lose about nine digits to
//! cancellation, so the extra precision is what keeps the absolute error below
//! 1e-13 across `[-20, 20]`.

use crate::dd::Dd;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::{FRAC_PI_4, LN_2, PI};

/// Ai(0) = 3^(-2/3) / Gamma(2/3).
const AI0: Dd = Dd::from_parts(0.355_028_053_887_817_2, 2.052_336_324_362_12e-17);
/// -Ai'(0) = 3^(-1/3) / Gamma(1/3).
const AIP0: Dd = Dd::from_parts(0.258_819_403_792_806_8, -2.522_243_111_610_832e-17);

const SERIES_LEFT: f64 = -12.0;
const SERIES_RIGHT: f64 = 8.0;

/// Ai and Ai' from the Maclaurin series, summed in double-double.
pub fn airy_series_dd(xd: Dd) -> (Dd, Dd) {
    let x3 = xd * xd * xd;
    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}, and their derivatives.
    let mut tf = Dd::ONE;
    let mut tg = xd;
    let mut tfp = xd * xd * 0.5;
    let mut tgp = Dd::ONE;
    let mut f = tf;
    let mut g = tg;
    let mut fp = tfp;
    let mut gp = tgp;
    let tiny = 1e-34;
    let mut k = 1u32;
    loop {
        let kf = k as f64;
        tf = tf * x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        tg = tg * x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp = tgp * x3 / ((3.0 * kf) * (3.0 * kf - 2.0));
        f += tf;
        g += tg;
        gp += tgp;
        if k >= 2 {
            let km = kf - 1.0;
            tfp = tfp * x3 / ((3.0 * km) * (3.0 * kf - 1.0));
            fp += tfp;
        }
        let scale = f.abs().hi().max(g.abs().hi()).max(1.0);
        let last = tf.abs().hi().max(tg.abs().hi()).max(tfp.abs().hi()).max(tgp.abs().hi());
        if k > 3 && last < tiny * scale {
            break;
        }
        k += 1;
        if k > 400 {
            break;
        }
    }
    let ai = AI0 * f - AIP0 * g;
    let aip = AI0 * fp - AIP0 * gp;
    (ai, aip)
}

/// Coefficients u_k of the Airy asymptotic expansions, together with
/// v_k = -(6k+1)/(6k-1) u_k.
fn airy_uv(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![1.0f64; n];
    let mut v = vec![1.0f64; n];
    for k in 1..n {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    (u, v)
}

/// Sums `sum_k sign^k c_k z^{-k}` with optimal truncation.
fn optimal_sum(c: &[f64], zeta: f64, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut zp = 1.0;
    for (k, &ck) in c.iter().enumerate() {
        let sign = if alternate && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * ck * zp;
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev < 1e-18 * sum.abs() {
            break;
        }
        zp /= zeta;
    }
    sum
}

fn airy_asymptotic_right(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (u, v) = airy_uv(60);
    let su = optimal_sum(&u, zeta, true);
    let sv = optimal_sum(&v, zeta, true);
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (pre / q * su, -pre * q * sv)
}

fn airy_asymptotic_left(x: f64) -> (f64, f64) {
    let t = -x;
    let zeta = 2.0 / 3.0 * t * t.sqrt();
    let (u, v) = airy_uv(80);
    // Split into even and odd index subsequences, each alternating in sign.
    let even = |c: &[f64]| -> Vec<f64> { c.iter().step_by(2).copied().collect() };
    let odd = |c: &[f64]| -> Vec<f64> { c.iter().skip(1).step_by(2).copied().collect() };
    let z2 = zeta * zeta;
    let ue = optimal_sum(&even(&u), z2, true);
    let uo = optimal_sum(&odd(&u), z2, true) / zeta;
    let ve = optimal_sum(&even(&v), z2, true);
    let vo = optimal_sum(&odd(&v), z2, true) / zeta;
    let phase = zeta - FRAC_PI_4;
    let (s, c) = phase.sin_cos();
    let q = t.powf(0.25);
    let rpi = 1.0 / PI.sqrt();
    let ai = rpi / q * (c * ue + s * uo);
    let aip = rpi * q * (s * ve - c * vo);
    (ai, aip)
}

/// Returns `(Ai(x), Ai'(x))`.
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Airy argument must be finite, got {x}")));
    }
    Ok(if x > SERIES_RIGHT {
        airy_asymptotic_right(x)
    } else if x < SERIES_LEFT {
        airy_asymptotic_left(x)
    } else {
        let (a, b) = airy_series_dd(Dd::from(x));
        (a.to_f64(), b.to_f64())
    })
}

/// `(Ai(x), Ai'(x))` carried in double-double where the series applies. Outside
/// the series range the f64 asymptotic value is promoted unchanged; there Ai is
/// either below 5e-8 or the argument is beyond anything the determinant uses.
pub fn airy_pair_dd(x: Dd) -> Result<(Dd, Dd)> {
    let xf = x.to_f64();
    if !x.is_finite() {
        return Err(Error::Domain(format!("Airy argument must be finite, got {xf}")));
    }
    Ok(if (SERIES_LEFT..=SERIES_RIGHT).contains(&xf) {
        airy_series_dd(x)
    } else {
        let (a, b) = airy_pair(xf)?;
        (Dd::from(a), Dd::from(b))
    })
}

pub fn airy_ai(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.0)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.1)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function (Lanczos, g = 7, nine coefficients). Relative accuracy is
/// about 1e-15 away from the poles.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// log |Gamma(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)` in exact arithmetic.
pub fn pochhammer(a: &BigRational, n: usize) -> BigRational {
    let mut p = BigRational::one();
    let mut t = a.clone();
    for _ in 0..n {
        p *= &t;
        t += BigRational::one();
    }
    p
}

/// Generalized binomial coefficient `binom(p, n)` for rational `p`.
pub fn binomial(p: &BigRational, n: usize) -> BigRational {
    let mut num = BigRational::one();
    let mut t = p.clone();
    for i in 0..n {
        num *= &t;
        t -= BigRational::one();
        num /= BigRational::from_integer(BigInt::from(i + 1));
    }
    num
}

/// `Gamma(a + n) / Gamma(a)` for a half-integer or integer `a`, exactly.
pub fn gamma_ratio(a: &BigRational, n: usize) -> BigRational {
    pochhammer(a, n)
}

/// alpha_k = 2 Gamma(2k + 3/2) / (Gamma(2k + 2) Gamma(3/2)), exactly.
pub fn alpha(k: u32) -> BigRational {
    let m = 2 * k as usize;
    let num = pochhammer(&rational(3, 2), m) * BigInt::from(2);
    let mut fact = BigInt::one();
    for i in 2..=(m + 1) {
        fact *= BigInt::from(i);
    }
    num / BigRational::from_integer(fact)
}

pub fn alpha_f64(k: u32) -> f64 {
    to_f64(&alpha(k))
}

pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators and denominators: scale through logs.
        let (n, d) = (r.numer(), r.denom());
        let bits = n.bits().max(d.bits()) as i64 - 60;
        let n2 = (n >> bits.max(0) as usize).to_f64().unwrap_or(f64::NAN);
        let d2 = (d >> bits.max(0) as usize).to_f64().unwrap_or(f64::NAN);
        n2 / d2
    })
}

/// log of the Glaisher-Kinkelin constant, from the Euler-Maclaurin expansion
/// of the hyperfactorial at n = 12 with Bernoulli corrections through B_18.
pub fn ln_glaisher() -> f64 {
    const N: usize = 12;
    // B_4, B_6, ..., B_18.
    const B: [f64; 8] = [
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
        43867.0 / 798.0,
    ];
    // Neumaier summation keeps the ~280-sized partial sum honest.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut push = |v: f64| {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    };
    for k in 2..=N {
        let kf = k as f64;
        push(kf * kf.ln());
    }
    let n = N as f64;
    push(-(n * n / 2.0) * n.ln());
    push(-(n / 2.0 + 1.0 / 12.0) * n.ln());
    push(n * n / 4.0);
    for (j, b) in B.iter().enumerate() {
        let j = (j + 1) as f64;
        push(b / ((2.0 * j + 2.0) * (2.0 * j + 1.0) * (2.0 * j)) / n.powf(2.0 * j));
    }
    sum + comp
}

/// zeta'(-1) = 1/12 - log A.
pub fn zeta_prime_minus1() -> f64 {
    1.0 / 12.0 - ln_glaisher()
}

/// chi0 = log(2)/24 + zeta'(-1), the constant in the Airy large-gap expansion.
pub fn chi0() -> f64 {
    LN_2 / 24.0 + zeta_prime_minus1()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyConstants {
    pub k: u32,
    pub alpha_k: BigRational,
    pub chi0: f64,
    pub zeta_prime_minus1: f64,
}

impl HierarchyConstants {
    pub fn new(k: u32) -> Self {
        HierarchyConstants {
            k,
            alpha_k: alpha(k),
            chi0: chi0(),
            zeta_prime_minus1: zeta_prime_minus1(),
        }
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha_k)
    }
}

/// Real `n`-th root with odd-root semantics for negative arguments.
pub fn signed_root(x: f64, n: u32) -> f64 {
    if n % 2 == 1 {
        x.signum() * x.abs().powf(1.0 / n as f64)
    } else {
        x.powf(1.0 / n as f64)
    }
}

/// `x^(p/q)` where `x^(1/q)` is the real odd root when q is odd.
pub fn signed_pow(x: f64, p: i32, q: u32) -> f64 {
    signed_root(x, q).powi(p)
}
