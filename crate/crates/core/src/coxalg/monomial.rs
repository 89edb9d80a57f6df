use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toric::DiagonalBundle;

/// Exponent vector indexed by the variables of some ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn times_var(&self, i: usize) -> Monomial {
        let mut m = self.clone();
        m.exps[i] += 1;
        m
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// Degree as the exponent-weighted sum of the columns of `grading`.
    pub fn degree_under(&self, grading: &[Vec<i64>]) -> Vec<i64> {
        grading
            .iter()
            .map(|row| row.iter().zip(&self.exps).map(|(g, &e)| g * e as i64).sum())
            .collect()
    }

    /// Renders e.g. `u0^2u1` (sep = "") or `u0^2*u1` (sep = "*"); `1` for the unit.
    pub fn display(&self, names: &[String], sep: &str) -> String {
        let mut out = String::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push_str(sep);
            }
            out.push_str(&names[i]);
            if e > 1 {
                write!(out, "^{e}").unwrap();
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }
}

pub(crate) fn fibre_names() -> Vec<String> {
    (0..4).map(|k| format!("u{k}")).collect()
}

/// The set M_{i,j} of monomials u0^c0 u1^c1 u2^c2 u3^c3 in the Cox ring of F_{a_s}
/// with c0 − a_s c1 + c2 = i and c1 + c3 = j.
///
/// Ordered lexicographically with u1 > u0 > u2 > u3, largest first; this lists the
/// u1-divisible monomials before the u3-divisible ones.
pub fn fiber_monomials(a_s: i64, i: i64, j: i64) -> Vec<Monomial> {
    let mut out = Vec::new();
    if j < 0 {
        return out;
    }
    for c1 in (0..=j).rev() {
        let c3 = j - c1;
        let t = i + a_s * c1;
        if t < 0 {
            continue;
        }
        for c0 in (0..=t).rev() {
            out.push(Monomial::new(vec![c0 as u32, c1 as u32, (t - c0) as u32, c3 as u32]));
        }
    }
    out
}

/// (d1, d2, d3, d4) for a monomial in u0..u3, read off the block matrix (B; −B; C).
pub fn fiber_degree_prefix(a_s: i64, m: &Monomial) -> [i64; 4] {
    let e = m.exps();
    let d1 = e[0] as i64 - a_s * e[1] as i64;
    let d2 = e[1] as i64;
    [d1, d2, -d1, -d2]
}

/// First four coordinates of the Z⁶-degree of a u-monomial in the Cox ring of E.
pub fn monomial_degree_prefix(bundle: &DiagonalBundle, m: &Monomial) -> Result<[i64; 4]> {
    let u0 = bundle.u(0);
    if let Some(i) = m.exps()[..u0].iter().position(|&e| e != 0) {
        return Err(Error::NotFiberMonomial(bundle.variable_names()[i].clone()));
    }
    let deg = m.degree_under(&bundle.grading()[..4]);
    Ok([deg[0], deg[1], deg[2], deg[3]])
}

/// Compositions of `n` into `k` nonnegative parts, largest-first lexicographic order.
pub fn compositions(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; k];
    fn rec(pos: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = rest;
            out.push(cur.clone());
            return;
        }
        for v in (0..=rest).rev() {
            cur[pos] = v;
            rec(pos + 1, rest - v, cur, out);
        }
    }
    rec(0, n, &mut cur, &mut out);
    out
}
