//! Oracles shared by the integration tests. They work on plain triples and
//! dense matrices and never call into the sparse implementation.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hierassoc::{AssociativeArray, Triple};
use rand::{Rng, RngExt};

pub type Pairs = BTreeMap<(String, String), i64>;

/// Ordered-map fold with `+`, zeros dropped.
pub fn fold(triples: &[Triple]) -> Pairs {
    let mut m = Pairs::new();
    for t in triples {
        *m.entry((t.row.clone(), t.col.clone())).or_insert(0) += t.val;
    }
    m.retain(|_, v| *v != 0);
    m
}

pub fn pairs_of(a: &AssociativeArray) -> Pairs {
    a.to_triples()
        .into_iter()
        .map(|t| ((t.row, t.col), t.val))
        .collect()
}

/// Dense matrix over an explicit, sorted key space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub vals: Vec<Vec<i64>>,
}

impl Dense {
    pub fn new(rows: &[String], cols: &[String], pairs: &Pairs) -> Self {
        let mut vals = vec![vec![0; cols.len()]; rows.len()];
        for ((r, c), v) in pairs {
            let i = rows.iter().position(|k| k == r).expect("row in key space");
            let j = cols.iter().position(|k| k == c).expect("col in key space");
            vals[i][j] = *v;
        }
        Dense {
            rows: rows.to_vec(),
            cols: cols.to_vec(),
            vals,
        }
    }

    pub fn pairs(&self) -> Pairs {
        let mut m = Pairs::new();
        for (i, r) in self.rows.iter().enumerate() {
            for (j, c) in self.cols.iter().enumerate() {
                if self.vals[i][j] != 0 {
                    m.insert((r.clone(), c.clone()), self.vals[i][j]);
                }
            }
        }
        m
    }

    pub fn zip(&self, other: &Dense, f: impl Fn(i64, i64) -> i64) -> Dense {
        assert_eq!((&self.rows, &self.cols), (&other.rows, &other.cols));
        let mut out = self.clone();
        for i in 0..self.rows.len() {
            for j in 0..self.cols.len() {
                out.vals[i][j] = f(self.vals[i][j], other.vals[i][j]);
            }
        }
        out
    }

    /// Triple-loop product; self.cols must equal other.rows.
    pub fn matmul(&self, other: &Dense) -> Dense {
        assert_eq!(self.cols, other.rows);
        let mut vals = vec![vec![0; other.cols.len()]; self.rows.len()];
        for i in 0..self.rows.len() {
            for j in 0..other.cols.len() {
                for k in 0..self.cols.len() {
                    vals[i][j] += self.vals[i][k] * other.vals[k][j];
                }
            }
        }
        Dense {
            rows: self.rows.clone(),
            cols: other.cols.clone(),
            vals,
        }
    }

    pub fn transpose(&self) -> Dense {
        let mut vals = vec![vec![0; self.rows.len()]; self.cols.len()];
        for i in 0..self.rows.len() {
            for j in 0..self.cols.len() {
                vals[j][i] = self.vals[i][j];
            }
        }
        Dense {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            vals,
        }
    }
}

/// Sorted union of every key appearing in any position of `pairs`.
pub fn key_space<'a>(pairs: impl IntoIterator<Item = &'a Pairs>) -> Vec<String> {
    let mut keys = BTreeSet::new();
    for p in pairs {
        for (r, c) in p.keys() {
            keys.insert(r.clone());
            keys.insert(c.clone());
        }
    }
    keys.into_iter().collect()
}

pub fn random_triples<R: Rng>(rng: &mut R, n: usize, keys: usize, vals: std::ops::RangeInclusive<i64>) -> Vec<Triple> {
    (0..n)
        .map(|_| {
            Triple::new(
                format!("k{:02}", rng.random_range(0..keys)),
                format!("k{:02}", rng.random_range(0..keys)),
                rng.random_range(vals.clone()),
            )
        })
        .collect()
}
