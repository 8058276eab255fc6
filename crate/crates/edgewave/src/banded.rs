//! Banded linear solves by Gaussian elimination with partial pivoting.
//!
//! Rows are stored sparsely as a contiguous column window that grows as
//! pivoting fills in entries, so the work is O(n (kl + ku) kl).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Row {
    lo: usize,
    v: Vec<f64>,
}

impl Row {
    fn get(&self, c: usize) -> f64 {
        if c < self.lo {
            return 0.0;
        }
        self.v.get(c - self.lo).copied().unwrap_or(0.0)
    }

    fn hi(&self) -> usize {
        self.lo + self.v.len()
    }

    fn add(&mut self, c: usize, x: f64) {
        if self.v.is_empty() {
            self.lo = c;
        }
        if c < self.lo {
            let mut nv = vec![0.0; self.lo - c];
            nv.extend_from_slice(&self.v);
            self.v = nv;
            self.lo = c;
        }
        let k = c - self.lo;
        if k >= self.v.len() {
            self.v.resize(k + 1, 0.0);
        }
        self.v[k] += x;
    }
}

/// Square matrix with `kl` sub-diagonals and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    rows: Vec<Row>,
}

impl BandedMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(kl);
                let hi = (i + ku + 1).min(n);
                Row {
                    lo,
                    v: vec![0.0; hi - lo],
                }
            })
            .collect();
        BandedMatrix { n, kl, rows }
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        self.rows[i].add(j, x);
    }

    /// Solve `A x = b`, consuming the matrix.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let mut b = b.to_vec();
        for c in 0..n {
            let last = (c + self.kl).min(n - 1);
            let p = (c..=last)
                .max_by(|&i, &j| {
                    self.rows[i]
                        .get(c)
                        .abs()
                        .partial_cmp(&self.rows[j].get(c).abs())
                        .unwrap()
                })
                .unwrap();
            if self.rows[p].get(c) == 0.0 {
                return Err(Error::SingularSystem { pivot: c });
            }
            self.rows.swap(p, c);
            b.swap(p, c);
            let piv_row = self.rows[c].clone();
            let piv = piv_row.get(c);
            for r in (c + 1)..=last {
                let f = self.rows[r].get(c) / piv;
                if f == 0.0 {
                    continue;
                }
                for col in (c + 1)..piv_row.hi() {
                    let u = piv_row.get(col);
                    if u != 0.0 {
                        self.rows[r].add(col, -f * u);
                    }
                }
                let row = &mut self.rows[r];
                if row.lo <= c {
                    let drop = c + 1 - row.lo;
                    row.v.drain(..drop.min(row.v.len()));
                    row.lo = c + 1;
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let row = &self.rows[i];
            let mut acc = b[i];
            for col in (i + 1)..row.hi() {
                acc -= row.get(col) * x[col];
            }
            x[i] = acc / row.get(i);
        }
        Ok(x)
    }
}
