//! Exact differential polynomials in `q` and the Lenard-Magri recursion
//! that generates the operators `L_j(q)` of the Painleve I hierarchy.
//!
//! A monomial is a sorted multiset of derivative orders, so `q^2 q_xx` is
//! `[0, 0, 2]`. Coefficients are arbitrary-precision rationals.

use crate::error::{Error, Result};
use crate::specfun::to_f64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DifferentialPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl DifferentialPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(Vec::new(), c)
    }

    /// `c * q^{(o_1)} q^{(o_2)} ...` for the given derivative orders.
    pub fn monomial(mut orders: Monomial, c: BigRational) -> Self {
        orders.sort_unstable();
        let mut p = Self::zero();
        p.add_term(orders, c);
        p
    }

    /// The `n`-th derivative `q^{(n)}` with coefficient one.
    pub fn q(n: u32) -> Self {
        Self::monomial(vec![n], BigRational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        let mut key = m.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, va) in &self.terms {
            for (b, vb) in &other.terms {
                let mut m = a.clone();
                m.extend_from_slice(b);
                m.sort_unstable();
                out.add_term(m, va * vb);
            }
        }
        out
    }

    /// Total x-derivative, by the product rule.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            for i in 0..m.len() {
                // Differentiating equal factors gives equal monomials; the
                // map merges them, so each factor is bumped once per position.
                let mut d = m.clone();
                d[i] += 1;
                d.sort_unstable();
                out.add_term(d, v.clone());
            }
        }
        out
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Scaling weight of a monomial: q counts 2, each x-derivative counts 1.
    pub fn monomial_weight(m: &[u32]) -> u32 {
        m.iter().map(|&o| 2 + o).sum()
    }

    /// Returns the common weight if the polynomial is weight-homogeneous.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut w = None;
        for m in self.terms.keys() {
            let mw = Self::monomial_weight(m);
            match w {
                None => w = Some(mw),
                Some(prev) if prev != mw => return None,
                _ => {}
            }
        }
        w
    }

    pub fn max_derivative_order(&self) -> Option<u32> {
        self.terms.keys().filter_map(|m| m.iter().max().copied()).max()
    }

    /// Evaluates with `values[n] = q^{(n)}(x)`.
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| to_f64(c) * m.iter().map(|&o| values[o as usize]).product::<f64>())
            .sum()
    }

    /// The unique antiderivative with no constant term.
    pub fn integrate_in_x(&self) -> Result<Self> {
        let mut rest = self.clone();
        let mut out = Self::zero();
        while let Some((m, c)) = rest.leading_term() {
            let top = *m.last().unwrap_or(&0);
            let top_mult = m.iter().filter(|&&o| o == top).count();
            if m.is_empty() || top == 0 || top_mult != 1 {
                return Err(Error::NotExactDerivative {
                    remainder: rest.to_string(),
                });
            }
            // m = q_top * q_{top-1}^{e-1} * S  comes from  q_{top-1}^e * S / e.
            let mut gen = m.clone();
            let pos = gen.iter().position(|&o| o == top).unwrap();
            gen[pos] = top - 1;
            gen.sort_unstable();
            let e = gen.iter().filter(|&&o| o == top - 1).count() as i64;
            let coef = c / int(e);
            let piece = Self::monomial(gen, coef);
            rest = rest.sub(&piece.derivative());
            out = out.add(&piece);
        }
        debug_assert_eq!(out.derivative(), *self);
        Ok(out)
    }

    /// Term with the highest top derivative order; ties broken by the
    /// canonical monomial order so the choice is deterministic.
    fn leading_term(&self) -> Option<(Monomial, BigRational)> {
        self.terms
            .iter()
            .max_by(|(a, _), (b, _)| {
                let ta = a.last().copied().unwrap_or(0);
                let tb = b.last().copied().unwrap_or(0);
                ta.cmp(&tb).then_with(|| b.cmp(a))
            })
            .map(|(m, c)| (m.clone(), c.clone()))
    }

    /// Monomials in display order: highest derivative first, then by degree.
    fn display_order(&self) -> Vec<(&Monomial, &BigRational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|(a, _), (b, _)| {
            let ta = a.last().copied().unwrap_or(0);
            let tb = b.last().copied().unwrap_or(0);
            tb.cmp(&ta).then(a.len().cmp(&b.len())).then(b.cmp(a))
        });
        v
    }
}

fn factor_name(order: u32) -> String {
    match order {
        0 => "q".to_string(),
        1..=4 => format!("q_{}", "x".repeat(order as usize)),
        n => format!("q_{{{n}x}}"),
    }
}

fn monomial_text(m: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let o = m[i];
        let mut e = 0;
        while i < m.len() && m[i] == o {
            e += 1;
            i += 1;
        }
        parts.push(if e == 1 {
            factor_name(o)
        } else {
            format!("{}^{}", factor_name(o), e)
        });
    }
    // Higher derivatives to the right, matching the usual q q_xx layout.
    parts.join(" ")
}

impl fmt::Display for DifferentialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.display_order().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            let sign = match (i, neg) {
                (0, true) => "-".to_string(),
                (0, false) => String::new(),
                (_, true) => " - ".to_string(),
                (_, false) => " + ".to_string(),
            };
            let body = monomial_text(m);
            let coef = if a.is_one() && !m.is_empty() {
                String::new()
            } else if a.is_integer() {
                format!("{}", a.numer())
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            let sep = if coef.is_empty() || body.is_empty() { "" } else { " " };
            write!(f, "{sign}{coef}{sep}{body}")?;
        }
        Ok(())
    }
}

/// `(1/4 D^3 - 2 q D - q_x) p`.
pub fn apply_lenard_operator(p: &DifferentialPolynomial) -> DifferentialPolynomial {
    let d1 = p.derivative();
    let d3 = d1.derivative().derivative();
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    d3.scale(&quarter)
        .sub(&DifferentialPolynomial::q(0).mul(&d1).scale(&int(2)))
        .sub(&DifferentialPolynomial::q(1).mul(p))
}

/// Highest index accepted by [`lenard_l`].
pub const MAX_LENARD_INDEX: usize = 8;

fn lenard_table() -> &'static Mutex<Vec<DifferentialPolynomial>> {
    static TABLE: OnceLock<Mutex<Vec<DifferentialPolynomial>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        Mutex::new(vec![DifferentialPolynomial::monomial(vec![0], int(-4))])
    })
}

/// `L_j(q)`, memoized. `L_0 = -4q` and `L_{j+1}` is the antiderivative of the
/// Lenard operator applied to `L_j` with no constant term.
pub fn lenard_l(j: usize) -> Result<DifferentialPolynomial> {
    if j > MAX_LENARD_INDEX {
        return Err(Error::Domain(format!(
            "L_j is supported for j <= {MAX_LENARD_INDEX}, got {j}"
        )));
    }
    let mut table = lenard_table().lock().expect("lenard table poisoned");
    while table.len() <= j {
        let prev = table.last().expect("table seeded with L_0");
        let next = apply_lenard_operator(prev).integrate_in_x()?;
        let idx = table.len() as u32;
        if next.homogeneous_weight() != Some(2 * idx + 2)
            || next.max_derivative_order() != Some(2 * idx)
        {
            return Err(Error::Domain(format!(
                "L_{idx} failed the weight/order invariant: {next}"
            )));
        }
        table.push(next);
    }
    Ok(table[j].clone())
}

/// A member `x + L_{2k}(q) + sum_{j=1}^{2k-1} t_j L_{j-1}(q) = 0` of the even
/// hierarchy.
#[derive(Clone, Debug)]
pub struct HierarchyEquation {
    pub k: usize,
    pub t: Vec<f64>,
    pub lhs: DifferentialPolynomial,
}

impl HierarchyEquation {
    /// Builds the symbolic left side without the affine `x` term; the times
    /// `t_j` stay numeric and are applied in [`HierarchyEquation::residual`].
    pub fn new(k: usize, t: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("hierarchy index k must be positive".into()));
        }
        if t.len() != 2 * k - 1 {
            return Err(Error::LengthMismatch {
                expected: 2 * k - 1,
                got: t.len(),
            });
        }
        Ok(HierarchyEquation {
            k,
            t,
            lhs: lenard_l(2 * k)?,
        })
    }

    pub fn residual(&self, x: f64, q_values: &[f64]) -> Result<f64> {
        let n = 4 * self.k + 1;
        if q_values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: q_values.len(),
            });
        }
        let mut r = x + self.lhs.eval(q_values);
        for (j, tj) in self.t.iter().enumerate() {
            if *tj != 0.0 {
                r += tj * lenard_l(j)?.eval(q_values);
            }
        }
        Ok(r)
    }
}

/// Residual of the `P_I^{2k}` equation at one point given `q, q', ..., q^{(4k)}`.
pub fn residual(k: usize, t: &[f64], x: f64, q_values: &[f64]) -> Result<f64> {
    HierarchyEquation::new(k, t.to_vec())?.residual(x, q_values)
}
