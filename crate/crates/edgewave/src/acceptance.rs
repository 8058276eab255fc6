//! The acceptance suite: eleven numbered criteria, each reduced to a list of
//! named boolean checks plus a one-line summary.

use crate::asymptotics::{
    expansion_k1, g2_family, k1_power_coefficients, lemma41_sign_check, loglog_slope, proof_scaffold,
    theorem_expansion, transition_eval, GFunctionData, IhInput,
};
use crate::fredholm::{dlog_det_ds, log_det};
use crate::hierarchy::{apply_lenard_operator, lenard_l, DifferentialPolynomial};
use crate::painleve2::{hamiltonian_pII, solve_hastings_mcleod, tw_via_integral, HMProfile};
use crate::pi2k_profile::{constant_Ck_scan, solve_tritronquee, total_integral, I_h, Pi2Profile};
use crate::specfun::{alpha, alpha_f64, chi0, rational};
use crate::Result;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The check cannot hold as stated. Its failure is documented rather
    /// than treated as a regression.
    pub known_unattainable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let note = if self.failures_are_known() && !self.passed {
            " [known unattainable]"
        } else {
            ""
        };
        format!(
            "{tag} {:>2} {}{note}: {} ({:.1} s)",
            self.id, self.name, self.detail, self.seconds
        )
    }

    /// True when every failing check is a known-unattainable one.
    pub fn failures_are_known(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.known_unattainable)
    }
}

/// Grid sizes. `quick` trades accuracy margin for speed; every tolerance
/// is the same in both modes.
#[derive(Debug, Clone, Copy)]
struct Settings {
    hm_nodes: usize,
    det_nodes: usize,
    h_grid: usize,
    pi2_half_width: f64,
    pi2_nodes: usize,
    random_configs: usize,
}

impl Settings {
    fn new(quick: bool) -> Self {
        if quick {
            Settings {
                hm_nodes: 2000,
                det_nodes: 80,
                h_grid: 13,
                pi2_half_width: 30.0,
                pi2_nodes: 3000,
                random_configs: 50,
            }
        } else {
            Settings {
                hm_nodes: 4000,
                det_nodes: 120,
                h_grid: 61,
                pi2_half_width: 40.0,
                pi2_nodes: 4000,
                random_configs: 50,
            }
        }
    }
}

struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check { name: name.into(), passed, known_unattainable: false });
    }

    fn unattainable(&mut self, name: impl Into<String>, passed: bool) {
        self.checks.push(Check { name: name.into(), passed, known_unattainable: true });
    }

    fn finish(self, id: u32, name: &'static str, detail: String) -> CriterionResult {
        CriterionResult {
            id,
            name,
            passed: self.checks.iter().all(|c| c.passed),
            detail,
            checks: self.checks,
            seconds: 0.0,
        }
    }
}

/// An error inside a criterion is reported as a failure of that criterion.
fn failed(id: u32, name: &'static str, err: crate::Error) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed: false,
        detail: format!("error: {err}"),
        checks: vec![Check { name: "ran without error".into(), passed: false, known_unattainable: false }],
        seconds: 0.0,
    }
}

const NAMES: [&str; 11] = [
    "Tracy-Widom constant recovery",
    "integral formula vs determinant",
    "Hamiltonian identity",
    "Lenard recursion",
    "printed coefficients",
    "g-function matching orders",
    "sign lemma on random configurations",
    "scaffold cancellation",
    "transition defect decreases",
    "total integral vanishes",
    "constant block consistency",
];

pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    (1..=11).map(|id| run_one(id, quick)).collect()
}

/// Run criterion `id` (1 to 11).
pub fn run_one(id: u32, quick: bool) -> CriterionResult {
    assert!((1..=11).contains(&id), "criterion {id} does not exist");
    let set = Settings::new(quick);
    let name = NAMES[id as usize - 1];
    let start = Instant::now();
    let out = match id {
        1 => tw_constant(set),
        2 => integral_formula(set),
        3 => hamiltonian_identity(set),
        4 => lenard(),
        5 => printed_coefficients(),
        6 => matching_orders(),
        7 => sign_lemma(set),
        8 => scaffold(),
        9 => transition(),
        10 => total(set),
        _ => constant_block(set),
    };
    let mut r = match out {
        Ok((b, detail)) => b.finish(id, name, detail),
        Err(e) => failed(id, name, e),
    };
    r.seconds = start.elapsed().as_secs_f64();
    r
}

type Outcome = Result<(Builder, String)>;

fn hm(set: Settings) -> Result<HMProfile> {
    solve_hastings_mcleod(10.0, set.hm_nodes)
}

fn pi2(set: Settings) -> Result<Pi2Profile> {
    solve_tritronquee(set.pi2_half_width, set.pi2_nodes, 0.0)
}

fn tw_constant(set: Settings) -> Outcome {
    // c(s) = c_inf + a |s|^{-3/2}, least squares over s = -5..-10.
    let rows = (5..=10i32)
        .map(|m| {
            let s = -(m as f64);
            let c = log_det(s, set.det_nodes)? + m.pow(3) as f64 / 12.0 + (m as f64).ln() / 8.0;
            Ok(((m as f64).powf(-1.5), c))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let mt = rows.iter().map(|r| r.0).sum::<f64>() / n;
    let mc = rows.iter().map(|r| r.1).sum::<f64>() / n;
    let stc: f64 = rows.iter().map(|r| (r.0 - mt) * (r.1 - mc)).sum();
    let stt: f64 = rows.iter().map(|r| (r.0 - mt) * (r.0 - mt)).sum();
    let c_inf = mc - stc / stt * mt;
    let err = (c_inf - chi0()).abs();
    let mut b = Builder::new();
    b.check("|c_inf - chi0| <= 1e-3", err <= 1e-3);
    Ok((b, format!("c_inf = {c_inf:.9}, chi0 = {:.9}, |diff| = {err:.2e}", chi0())))
}

fn integral_formula(set: Settings) -> Outcome {
    let p = hm(set)?;
    let mut worst = 0.0f64;
    let mut b = Builder::new();
    for s in [-6.0, -4.0, -2.0, 0.0] {
        let d = (tw_via_integral(&p, s)? - log_det(s, set.det_nodes)?).abs();
        b.check(format!("s = {s}: {d:.2e} <= 1e-6"), d <= 1e-6);
        worst = worst.max(d);
    }
    Ok((b, format!("max difference {worst:.2e}")))
}

fn hamiltonian_identity(set: Settings) -> Outcome {
    let p = hm(set)?;
    let grid: Vec<f64> = (0..set.h_grid)
        .map(|i| -6.0 + 6.0 * i as f64 / (set.h_grid - 1) as f64)
        .collect();
    let diffs = grid
        .par_iter()
        .map(|&s| Ok((dlog_det_ds(s, set.det_nodes)? - hamiltonian_pII(&p, s)?).abs()))
        .collect::<Result<Vec<f64>>>()?;
    let (i, worst) = diffs
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    let mut b = Builder::new();
    b.check(format!("max over {} points <= 1e-5", grid.len()), worst <= 1e-5);
    Ok((b, format!("max |F'/F - H| = {worst:.2e} at s = {:.2}", grid[i])))
}

fn lenard() -> Outcome {
    let r = |n, d| rational(n, d);
    let q = DifferentialPolynomial::q;
    let mono = |orders: Vec<u32>, c: BigRational| DifferentialPolynomial::monomial(orders, c);
    let l1 = mono(vec![0, 0], r(6, 1)).sub(&q(2));
    let l2 = mono(vec![4], r(-1, 4))
        .add(&mono(vec![0, 2], r(5, 1)))
        .add(&mono(vec![1, 1], r(5, 2)))
        .add(&mono(vec![0, 0, 0], r(-10, 1)));
    let mut b = Builder::new();
    b.check("L1 = 6q^2 - q_xx", lenard_l(1)? == l1);
    b.check("L2 = -q_xxxx/4 + 5q q_xx + 5/2 q_x^2 - 10q^3", lenard_l(2)? == l2);
    for j in 0..=6 {
        let lhs = lenard_l(j + 1)?.derivative();
        let rhs = apply_lenard_operator(&lenard_l(j)?);
        b.check(format!("d/dx L{} = R L{j}", j + 1), lhs.sub(&rhs).is_zero());
    }
    let held = b.checks.iter().filter(|c| c.passed).count();
    Ok((b, format!("{held}/9 identities exact")))
}

fn printed_coefficients() -> Outcome {
    let a = alpha(1);
    let [c7, c4, c1] = k1_power_coefficients();
    let mut b = Builder::new();
    b.check("alpha_1 = 5/4", a == rational(5, 4));
    b.check("alpha_1^2/28 = 25/448", &a * &a / BigRational::from_integer(28.into()) == rational(25, 448));
    b.check("s^7 coefficient 25/448", c7 == rational(25, 448));
    b.check("s^4 coefficient 5/32", c4 == rational(5, 32));
    b.check("s coefficient 1/4", c1 == rational(1, 4));
    Ok((b, format!("alpha_1 = {a}, coefficients {c7}, {c4}, {c1}")))
}

fn matching_orders() -> Outcome {
    let in_band = |s: f64| (-1.6..=-1.4).contains(&s);
    let mut b = Builder::new();
    let mut parts = Vec::new();
    for (k, r, y) in [(1, -1.0, 0.0), (1, 0.5, -1.0), (2, -1.0, 0.0)] {
        let g = GFunctionData::new(k, r, y, 10.0)?;
        let s1 = loglog_slope(1e2, 1e4, 21, |e| g.matching_remainder(e))?;
        b.check(format!("g1 ({k},{r},{y}) slope {s1:.4}"), in_band(s1));
        parts.push(format!("g1({k},{r},{y}) {s1:.3}"));

        // g2 depends on y only. At y = 0 it equals theta exactly and the
        // remainder vanishes identically, so there is no slope to fit; the
        // O(eta^{-3/2}) bound then holds trivially and is checked as such.
        let g2 = g2_family(k, y)?;
        let zero = (1..=20).all(|i| {
            let e = 1e2 * 100f64.powf(i as f64 / 20.0);
            g2.matching_remainder(e).map(|v| v == 0.0).unwrap_or(false)
        });
        if zero {
            b.check(format!("g2 (k={k}, y={y}) remainder identically zero"), g2.d2 == 0.0);
            parts.push(format!("g2({k},{y}) = theta"));
        } else {
            let s2 = loglog_slope(1e2, 1e4, 21, |e| g2.matching_remainder(e))?;
            b.check(format!("g2 (k={k}, y={y}) slope {s2:.4}"), in_band(s2));
            parts.push(format!("g2({k},{y}) {s2:.3}"));
        }
    }
    Ok((b, parts.join(", ")))
}

fn sign_lemma(set: Settings) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let configs: Vec<(u32, f64, f64)> = (0..set.random_configs)
        .map(|_| {
            let k = rng.gen_range(1..=3u32);
            let r: f64 = rng.gen_range(-3.0..3.0);
            let slack: f64 = rng.gen_range(0.0..5.0);
            (k, r, -alpha_f64(k) * r.powi(2 * k as i32 + 1) - slack)
        })
        .collect();
    let reports = configs
        .par_iter()
        .map(|&(k, r, y)| lemma41_sign_check(k, r, y, 50.0, 1000))
        .collect::<Result<Vec<_>>>()?;
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let max = reports.iter().map(|r| r.max_value).fold(f64::NEG_INFINITY, f64::max);
    let mut b = Builder::new();
    b.check("zero violations", violations == 0);
    Ok((
        b,
        format!(
            "{} configurations x 1000 points, {violations} violations, max p~1 = {max:.3e}",
            configs.len()
        ),
    ))
}

fn scaffold() -> Outcome {
    let mut b = Builder::new();
    let mut parts = Vec::new();
    for sign in [1, -1] {
        let slope = loglog_slope(1e3, 1e5, 9, |u| Ok(proof_scaffold(1, -u, sign)?.cancellation))?;
        b.check(format!("x0 sign {sign}: slope {slope:.4}"), (slope + 1.0 / 3.0).abs() <= 0.05);
        let mut worst = 0.0f64;
        for u in [1e3, 1e4, 1e5] {
            let sc = proof_scaffold(1, -u, sign)?;
            worst = worst.max(((sc.relation_lhs - sc.relation_rhs) / sc.relation_rhs).abs());
        }
        b.check(format!("x0 sign {sign}: s1 relation {worst:.1e}"), worst <= 1e-12);
        parts.push(format!("sign {sign:+}: slope {slope:.4}, relation {worst:.1e}"));
    }
    Ok((b, parts.join("; ")))
}

fn transition() -> Outcome {
    let mut b = Builder::new();
    let mut defects = Vec::new();
    for u in [20.0f64, 40.0, 80.0, 160.0] {
        defects.push(transition_eval(1, -u, -u.powf(0.3), false)?.defect.abs());
    }
    for w in defects.windows(2) {
        b.check(format!("{:.3e} > {:.3e}", w[0], w[1]), w[1] < w[0]);
    }
    let shown: Vec<String> = defects.iter().map(|d| format!("{d:.3e}")).collect();
    Ok((b, format!("|defect| at |s| = 20, 40, 80, 160: {}", shown.join(", "))))
}

fn total(set: Settings) -> Outcome {
    let p = pi2(set)?;
    let t = total_integral(&p)?;
    let mut b = Builder::new();
    b.check("|integral| + error budget <= 5e-3", t.value.abs() + t.error <= 5e-3);
    Ok((
        b,
        format!(
            "integral = {:.3e}, error budget {:.1e} (window [-{L}, {L}], residual {:.1e})",
            t.value,
            t.error,
            p.max_residual,
            L = p.half_width
        ),
    ))
}

fn constant_block(set: Settings) -> Outcome {
    let p = pi2(set)?;
    let mut b = Builder::new();
    let mut worst = 0.0f64;
    for (s, x) in [(-10.0, 3.0), (-6.0, -4.0), (-15.0, 12.0), (-8.0, 0.0)] {
        let ih = I_h(&p, x)?.value;
        let a = theorem_expansion(1, s, x, IhInput::Value(ih))?.total;
        worst = worst.max((a - expansion_k1(s, x, 0.0, ih)).abs() / a.abs());
    }
    b.check(format!("general vs k = 1 display {worst:.1e} <= 1e-12"), worst <= 1e-12);
    // The block as printed has x-derivative h(x), which is far from zero
    // on [-5, 10], so its spread cannot be small. The reduced spread
    // removes the integral of h over [0, x] and is what stays constant.
    let scan = constant_Ck_scan(&p, &[-5.0, 0.0, 5.0, 10.0])?;
    b.unattainable(
        format!("literal block spread {:.3} <= 1e-2", scan.literal_spread),
        scan.literal_spread <= 1e-2,
    );
    Ok((
        b,
        format!(
            "identity {worst:.1e}; spread literal {:.3}, reduced {:.1e}",
            scan.literal_spread, scan.reduced_spread
        ),
    ))
}
