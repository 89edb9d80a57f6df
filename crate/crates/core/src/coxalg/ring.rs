use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::monomial::compositions;
use crate::toric::ToricVariety;

/// Coefficient field for degree-wise linear algebra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Rationals,
    Prime(u64),
}

pub const DEFAULT_PRIME: u64 = 32003;

/// Strands with at most this many basis elements are ranked over Q by default.
pub const RATIONAL_SIZE_THRESHOLD: usize = 200;

impl Field {
    /// Q for small problems, F_32003 otherwise.
    pub fn auto(size: usize) -> Field {
        if size <= RATIONAL_SIZE_THRESHOLD {
            Field::Rationals
        } else {
            Field::Prime(DEFAULT_PRIME)
        }
    }
}

/// The Cox ring of one factor: either P^r (Z-graded, `a` empty) or a Kleinschmidt
/// variety (Z²-graded) with variables x_0..x_r, y_0..y_s.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoxBlock {
    pub r: usize,
    pub a: Vec<i64>,
}

impl CoxBlock {
    pub fn kleinschmidt(r: usize, a: Vec<i64>) -> Self {
        CoxBlock { r, a }
    }

    pub fn projective(r: usize) -> Self {
        CoxBlock { r, a: Vec::new() }
    }

    pub fn grade_dim(&self) -> usize {
        if self.a.is_empty() {
            1
        } else {
            2
        }
    }

    pub fn nvars(&self) -> usize {
        if self.a.is_empty() {
            self.r + 1
        } else {
            self.r + self.a.len() + 2
        }
    }

    fn y_weights(&self) -> Vec<i64> {
        std::iter::once(0).chain(self.a.iter().copied()).collect()
    }

    pub fn var_degrees(&self) -> Vec<Vec<i64>> {
        if self.a.is_empty() {
            return vec![vec![1]; self.r + 1];
        }
        let mut out = vec![vec![1, 0]; self.r + 1];
        out.extend(self.y_weights().into_iter().map(|w| vec![-w, 1]));
        out
    }

    /// Monomials of the given degree, in decreasing lexicographic order.
    pub fn monomials(&self, deg: &[i64]) -> Vec<Vec<u32>> {
        if self.a.is_empty() {
            return if deg[0] < 0 { Vec::new() } else { compositions(deg[0] as u32, self.r + 1) };
        }
        let (k, l) = (deg[0], deg[1]);
        if l < 0 {
            return Vec::new();
        }
        let w = self.y_weights();
        let mut out = Vec::new();
        for ys in compositions(l as u32, w.len()) {
            let xdeg = k + ys.iter().zip(&w).map(|(&c, &a)| c as i64 * a).sum::<i64>();
            if xdeg < 0 {
                continue;
            }
            for xs in compositions(xdeg as u32, self.r + 1) {
                let mut e = xs;
                e.extend_from_slice(&ys);
                out.push(e);
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Number of monomials of the given degree.
    pub fn dim(&self, deg: &[i64]) -> u64 {
        if self.a.is_empty() {
            return if deg[0] < 0 { 0 } else { binomial(deg[0] as u64 + self.r as u64, self.r as u64) };
        }
        let (k, l) = (deg[0], deg[1]);
        if l < 0 {
            return 0;
        }
        weighted_compositions(&self.y_weights(), l as u64)
            .into_iter()
            .map(|(w, count)| {
                let d = k + w;
                if d < 0 {
                    0
                } else {
                    count * binomial(d as u64 + self.r as u64, self.r as u64)
                }
            })
            .sum()
    }
}

/// Multiset {Σ c_j w_j : c ∈ N^len(w), Σ c_j = n} as (value, multiplicity), ascending by value.
pub fn weighted_compositions(weights: &[i64], n: u64) -> Vec<(i64, u64)> {
    // dp over parts: value -> number of ways using the parts seen so far with total exactly t
    let mut table: Vec<BTreeMap<i64, u64>> = vec![BTreeMap::new(); n as usize + 1];
    table[0].insert(0, 1);
    for &w in weights {
        // unbounded multiplicity of this part
        for t in 1..=n as usize {
            let prev: Vec<(i64, u64)> = table[t - 1].iter().map(|(&v, &c)| (v, c)).collect();
            for (v, c) in prev {
                *table[t].entry(v + w).or_insert(0) += c;
            }
        }
    }
    if weights.is_empty() {
        return if n == 0 { vec![(0, 1)] } else { Vec::new() };
    }
    table[n as usize].iter().map(|(&v, &c)| (v, c)).collect()
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A multigraded polynomial ring presented as a tensor product of Cox rings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub variable_names: Vec<String>,
    pub degrees: Vec<Vec<i64>>,
    pub blocks: Vec<CoxBlock>,
    #[serde(default)]
    pub field: Field,
}

impl RingSpec {
    pub fn from_blocks(blocks: Vec<CoxBlock>, variable_names: Vec<String>) -> Self {
        let g: usize = blocks.iter().map(|b| b.grade_dim()).sum();
        let mut degrees = Vec::new();
        let mut offset = 0;
        for b in &blocks {
            for d in b.var_degrees() {
                let mut full = vec![0i64; g];
                full[offset..offset + d.len()].copy_from_slice(&d);
                degrees.push(full);
            }
            offset += b.grade_dim();
        }
        assert_eq!(degrees.len(), variable_names.len(), "one name per variable");
        RingSpec {
            variable_names,
            degrees,
            blocks,
            field: Field::Rationals,
        }
    }

    /// Cox ring of X, Z²-graded.
    pub fn cox(x: &ToricVariety) -> Self {
        Self::from_blocks(vec![x.cox_block()], x.variable_names().to_vec())
    }

    /// Cox ring of X × X, Z⁴-graded; second-factor variables carry a prime.
    pub fn cox_product(x: &ToricVariety) -> Self {
        let mut names = x.variable_names().to_vec();
        names.extend(x.variable_names().iter().map(|v| format!("{v}'")));
        Self::from_blocks(vec![x.cox_block(), x.cox_block()], names)
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.field = field;
        self
    }

    pub fn nvars(&self) -> usize {
        self.variable_names.len()
    }

    pub fn grade_dim(&self) -> usize {
        self.degrees.first().map_or_else(
            || self.blocks.iter().map(|b| b.grade_dim()).sum(),
            |d| d.len(),
        )
    }

    pub fn var_degree(&self, i: usize) -> &[i64] {
        &self.degrees[i]
    }

    /// All monomials of degree `deg`, decreasing lexicographic order.
    pub fn monomials(&self, deg: &[i64]) -> Vec<Vec<u32>> {
        let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
        let mut off = 0;
        for b in &self.blocks {
            let g = b.grade_dim();
            let part = b.monomials(&deg[off..off + g]);
            off += g;
            if part.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * part.len());
            for prefix in &acc {
                for p in &part {
                    let mut e = prefix.clone();
                    e.extend_from_slice(p);
                    next.push(e);
                }
            }
            acc = next;
        }
        acc
    }

    pub fn piece_dim(&self, deg: &[i64]) -> u64 {
        let mut off = 0;
        let mut acc = 1u64;
        for b in &self.blocks {
            let g = b.grade_dim();
            acc = acc.saturating_mul(b.dim(&deg[off..off + g]));
            off += g;
            if acc == 0 {
                break;
            }
        }
        acc
    }

    /// Degree of a monomial.
    pub fn degree_of(&self, exps: &[u32]) -> Vec<i64> {
        let mut out = vec![0i64; self.grade_dim()];
        for (i, &e) in exps.iter().enumerate() {
            if e != 0 {
                for (o, d) in out.iter_mut().zip(&self.degrees[i]) {
                    *o += d * e as i64;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn weighted_compositions_small() {
        // Sym^2(O + O(1) + O(3)) = O(0) + O(1) + O(2) + O(3) + O(4) + O(6)
        let v = weighted_compositions(&[0, 1, 3], 2);
        assert_eq!(v, vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (6, 1)]);
        assert_eq!(weighted_compositions(&[0, 0], 3), vec![(0, 4)]);
        assert_eq!(weighted_compositions(&[0, 2], 0), vec![(0, 1)]);
    }

    #[test]
    fn p1_linear_forms() {
        let ring = RingSpec::from_blocks(
            vec![CoxBlock::projective(1), CoxBlock::projective(1)],
            vec!["x0".into(), "x1".into(), "y0".into(), "y1".into()],
        );
        let m = ring.monomials(&[1, 0]);
        assert_eq!(m, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]);
        assert_eq!(ring.piece_dim(&[2, 3]), 12);
    }

    #[test]
    fn block_dim_matches_enumeration() {
        let b = CoxBlock::kleinschmidt(2, vec![1, 3]);
        for k in -8..6 {
            for l in -1..4 {
                assert_eq!(b.monomials(&[k, l]).len() as u64, b.dim(&[k, l]), "({k},{l})");
            }
        }
    }

    #[test]
    fn monomials_have_requested_degree() {
        let x = ToricVariety::new(1, vec![2]).unwrap();
        let ring = RingSpec::cox_product(&x);
        for e in ring.monomials(&[1, 1, -2, 1]) {
            assert_eq!(ring.degree_of(&e), vec![1, 1, -2, 1]);
        }
        let ms = ring.monomials(&[1, 1, 0, 1]);
        let mut sorted = ms.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(ms, sorted);
    }
}
