//! Gauss-Legendre rules with nodes and weights in double-double.

use crate::dd::Dd;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on `[-1, 1]`, nodes increasing.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<Dd>,
    pub weights: Vec<Dd>,
}

/// Returns `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ONE;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = (x * p1 * (2.0 * kf - 1.0) - p0 * (kf - 1.0)) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn compute(n: usize) -> GaussLegendre {
    assert!(n >= 1);
    let mut nodes = vec![Dd::ZERO; n];
    let mut weights = vec![Dd::ZERO; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, refined by Newton in double-double.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = Dd::from(theta.cos());
        let mut dp = Dd::ONE;
        for it in 0..12 {
            let (p, pm1) = legendre_pair(n, x);
            dp = (x * p - pm1) * nf / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if it > 2 && dx.abs().hi() < 1e-33 {
                break;
            }
        }
        let (p, pm1) = legendre_pair(n, x);
        if p.abs().hi() > 0.0 {
            dp = (x * p - pm1) * nf / (x * x - 1.0);
        }
        let w = Dd::from(2.0) / ((Dd::ONE - x * x) * dp * dp);
        // x is the i-th largest root.
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    GaussLegendre { nodes, weights }
}

/// Cached rule with `n` points.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return r.clone();
    }
    let rule = Arc::new(compute(n));
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .insert(n, rule.clone());
    rule
}

impl GaussLegendre {
    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: Dd, b: Dd) -> (Vec<Dd>, Vec<Dd>) {
        let half = (b - a) * 0.5;
        let mid = (b + a) * 0.5;
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| half * w).collect();
        (x, w)
    }

    /// f64 rule on `[a, b]`.
    pub fn on_interval_f64(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = self.on_interval(Dd::from(a), Dd::from(b));
        (
            x.into_iter().map(Dd::to_f64).collect(),
            w.into_iter().map(Dd::to_f64).collect(),
        )
    }
}
