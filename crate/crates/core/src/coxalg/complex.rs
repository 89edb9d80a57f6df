use std::collections::HashSet;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::ring::RingSpec;
use crate::error::{Error, Result};

/// One summand S(t) of a graded free module; `degree` is the twist t, so the
/// summand's piece in degree d is S_{d+t}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub degree: Vec<i64>,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedFreeModule {
    pub generators: Vec<Generator>,
}

impl GradedFreeModule {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        let mut seen = HashSet::new();
        for g in &generators {
            if !seen.insert(g.label.as_str()) {
                return Err(Error::MalformedComplex(format!("duplicate generator label {}", g.label)));
            }
        }
        Ok(GradedFreeModule { generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn degrees(&self) -> impl Iterator<Item = &[i64]> {
        self.generators.iter().map(|g| g.degree.as_slice())
    }

    /// Twist multiset, sorted.
    pub fn degree_multiset(&self) -> Vec<Vec<i64>> {
        let mut v: Vec<Vec<i64>> = self.generators.iter().map(|g| g.degree.clone()).collect();
        v.sort();
        v
    }
}

/// coeff · x_var, or a constant when `var` is `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub coeff: i64,
    pub var: Option<usize>,
}

/// Sparse matrix whose entries are scalar multiples of a single variable or constants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Entry>,
}

impl LinearMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        LinearMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn push(&mut self, row: usize, col: usize, coeff: i64, var: Option<usize>) {
        self.entries.push(Entry { row, col, coeff, var });
    }

    /// Entries grouped by column, each group in row order.
    pub fn columns(&self) -> Vec<Vec<Entry>> {
        let mut cols = vec![Vec::new(); self.cols];
        for e in &self.entries {
            cols[e.col].push(*e);
        }
        for c in &mut cols {
            c.sort_unstable_by_key(|e| e.row);
        }
        cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Entry> {
        self.entries.iter().find(|e| e.row == row && e.col == col)
    }

    /// Dense rendering with the given variable names, `0` for empty positions.
    pub fn render(&self, names: &[String]) -> Vec<Vec<String>> {
        let mut out = vec![vec!["0".to_string(); self.cols]; self.rows];
        for e in &self.entries {
            out[e.row][e.col] = format_term(e.coeff, e.var.map(|v| names[v].as_str()));
        }
        out
    }
}

pub(crate) fn format_term(coeff: i64, var: Option<&str>) -> String {
    match (coeff, var) {
        (c, None) => c.to_string(),
        (1, Some(v)) => v.to_string(),
        (-1, Some(v)) => format!("-{v}"),
        (c, Some(v)) => format!("{c}*{v}"),
    }
}

/// Chain complex of graded free modules, `terms[0] ← terms[1] ← …`; `diffs[k]`
/// maps `terms[k+1]` to `terms[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    pub ring: RingSpec,
    pub terms: Vec<GradedFreeModule>,
    pub diffs: Vec<LinearMatrix>,
}

/// A nonzero entry of some composite ∂_k ∘ ∂_{k+1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdWitness {
    pub k: usize,
    pub row: usize,
    pub col: usize,
    pub poly: String,
}

impl std::fmt::Display for DdWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "d{} * d{} has entry {} at row {}, col {}",
            self.k + 1,
            self.k + 2,
            self.poly,
            self.row,
            self.col
        )
    }
}

impl FreeComplex {
    /// Validates shapes, entry positions, duplicate positions and homogeneity.
    pub fn new(ring: RingSpec, terms: Vec<GradedFreeModule>, diffs: Vec<LinearMatrix>) -> Result<Self> {
        let c = FreeComplex { ring, terms, diffs };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedComplex(msg));
        if !self.terms.is_empty() && self.diffs.len() + 1 != self.terms.len() {
            return bad(format!("{} terms but {} differentials", self.terms.len(), self.diffs.len()));
        }
        let g = self.ring.grade_dim();
        for (k, t) in self.terms.iter().enumerate() {
            let mut seen = HashSet::new();
            for gen in &t.generators {
                if gen.degree.len() != g {
                    return bad(format!("generator {} in slot {k} has a degree of length {}", gen.label, gen.degree.len()));
                }
                if !seen.insert(&gen.label) {
                    return bad(format!("duplicate label {} in slot {k}", gen.label));
                }
            }
        }
        for (k, d) in self.diffs.iter().enumerate() {
            let (target, source) = (&self.terms[k], &self.terms[k + 1]);
            if d.rows != target.rank() || d.cols != source.rank() {
                return bad(format!(
                    "d{} is {}x{} between ranks {} and {}",
                    k + 1,
                    d.rows,
                    d.cols,
                    source.rank(),
                    target.rank()
                ));
            }
            let mut positions = HashSet::new();
            for e in &d.entries {
                if e.row >= d.rows || e.col >= d.cols {
                    return bad(format!("d{} entry at ({}, {}) out of range", k + 1, e.row, e.col));
                }
                if !positions.insert((e.row, e.col)) {
                    return bad(format!("d{} has two entries at ({}, {})", k + 1, e.row, e.col));
                }
                if e.var.is_some_and(|v| v >= self.ring.nvars()) {
                    return bad(format!("d{} entry uses unknown variable", k + 1));
                }
                let tr = &target.generators[e.row].degree;
                let tc = &source.generators[e.col].degree;
                let ok = match e.var {
                    None => tr == tc,
                    Some(v) => tr
                        .iter()
                        .zip(tc)
                        .zip(self.ring.var_degree(v))
                        .all(|((a, b), w)| *a == b + w),
                };
                if !ok {
                    return bad(format!("d{} entry at ({}, {}) is not homogeneous", k + 1, e.row, e.col));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.rank()).collect()
    }

    /// Homological index of the last nonzero term.
    pub fn length(&self) -> usize {
        self.terms.iter().rposition(|t| t.rank() > 0).map_or(0, |i| i)
    }

    /// Symbolic check that consecutive differentials compose to zero.
    pub fn check_ddzero(&self) -> std::result::Result<(), DdWitness> {
        for k in 0..self.diffs.len().saturating_sub(1) {
            let left = self.diffs[k].columns();
            let right = &self.diffs[k + 1];
            let mut acc: FxHashMap<(usize, usize, Option<usize>, Option<usize>), i64> = FxHashMap::default();
            for e2 in &right.entries {
                for e1 in &left[e2.row] {
                    let (a, b) = match (e1.var, e2.var) {
                        (Some(a), Some(b)) => (Some(a.min(b)), Some(a.max(b))),
                        (a, None) => (a, None),
                        (None, b) => (b, None),
                    };
                    *acc.entry((e1.row, e2.col, a, b)).or_insert(0) += e1.coeff * e2.coeff;
                }
            }
            let bad = acc.iter().filter(|(_, c)| **c != 0).map(|(key, _)| (key.0, key.1)).min();
            if let Some((row, col)) = bad {
                let mut nonzero: Vec<_> = acc
                    .into_iter()
                    .filter(|((r, c, _, _), v)| *r == row && *c == col && *v != 0)
                    .map(|((_, _, a, b), v)| ((a, b), v))
                    .collect();
                nonzero.sort();
                return Err(DdWitness { k, row, col, poly: self.render_quadratic(&nonzero) });
            }
        }
        Ok(())
    }

    fn render_quadratic(&self, terms: &[((Option<usize>, Option<usize>), i64)]) -> String {
        let names = &self.ring.variable_names;
        let mut out = String::new();
        for (i, ((a, b), c)) in terms.iter().enumerate() {
            let vars: Vec<&str> = [a, b].iter().filter_map(|v| v.map(|v| names[v].as_str())).collect();
            let mono = if vars.is_empty() { None } else { Some(vars.join("*")) };
            let t = format_term(*c, mono.as_deref());
            if i > 0 && !t.starts_with('-') {
                out.push_str(" + ");
            } else if i > 0 {
                out.push(' ');
            }
            out.push_str(&t);
        }
        out
    }

    /// Adds `shift` to every generator twist, i.e. tensors with S(shift).
    pub fn twisted(&self, shift: &[i64]) -> FreeComplex {
        let mut c = self.clone();
        for t in &mut c.terms {
            for g in &mut t.generators {
                for (x, s) in g.degree.iter_mut().zip(shift) {
                    *x += s;
                }
            }
        }
        c
    }

    /// Direct sum over the same ring; labels are prefixed by the summand index.
    pub fn direct_sum(parts: &[FreeComplex]) -> Result<FreeComplex> {
        let Some(first) = parts.first() else {
            return Err(Error::MalformedComplex("direct sum of no complexes".into()));
        };
        if parts.iter().any(|p| p.ring != first.ring) {
            return Err(Error::MalformedComplex("direct sum over different rings".into()));
        }
        let len = parts.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut terms = vec![GradedFreeModule::default(); len];
        let mut diffs: Vec<LinearMatrix> = (0..len.saturating_sub(1)).map(|_| LinearMatrix::new(0, 0)).collect();
        let mut offsets = vec![0usize; len];
        for (idx, p) in parts.iter().enumerate() {
            for (k, t) in p.terms.iter().enumerate() {
                terms[k].generators.extend(t.generators.iter().map(|g| Generator {
                    degree: g.degree.clone(),
                    label: format!("{idx}:{}", g.label),
                }));
            }
            for (k, d) in p.diffs.iter().enumerate() {
                for e in &d.entries {
                    diffs[k].push(e.row + offsets[k], e.col + offsets[k + 1], e.coeff, e.var);
                }
            }
            for (k, off) in offsets.iter_mut().enumerate() {
                *off += p.terms.get(k).map_or(0, |t| t.rank());
            }
        }
        for (k, d) in diffs.iter_mut().enumerate() {
            d.rows = terms[k].rank();
            d.cols = terms[k + 1].rank();
        }
        FreeComplex::new(first.ring.clone(), terms, diffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxalg::CoxBlock;

    fn p1() -> RingSpec {
        RingSpec::from_blocks(vec![CoxBlock::projective(1)], vec!["x0".into(), "x1".into()])
    }

    fn gen(d: i64, label: &str) -> Generator {
        Generator { degree: vec![d], label: label.into() }
    }

    pub(crate) fn koszul_p1() -> FreeComplex {
        let ring = p1();
        let terms = vec![
            GradedFreeModule::new(vec![gen(0, "1")]).unwrap(),
            GradedFreeModule::new(vec![gen(-1, "e0"), gen(-1, "e1")]).unwrap(),
            GradedFreeModule::new(vec![gen(-2, "e0e1")]).unwrap(),
        ];
        let mut d1 = LinearMatrix::new(1, 2);
        d1.push(0, 0, 1, Some(0));
        d1.push(0, 1, 1, Some(1));
        let mut d2 = LinearMatrix::new(2, 1);
        d2.push(0, 0, -1, Some(1));
        d2.push(1, 0, 1, Some(0));
        FreeComplex::new(ring, terms, vec![d1, d2]).unwrap()
    }

    #[test]
    fn koszul_squares_to_zero() {
        assert!(koszul_p1().check_ddzero().is_ok());
    }

    #[test]
    fn flipped_sign_gives_witness() {
        let mut c = koszul_p1();
        c.diffs[1].entries[0].coeff = 1;
        let w = c.check_ddzero().unwrap_err();
        assert_eq!((w.k, w.row, w.col), (0, 0, 0));
        assert_eq!(w.poly, "2*x0*x1");
    }

    #[test]
    fn zero_complex() {
        let c = FreeComplex::new(p1(), vec![GradedFreeModule::default()], vec![]).unwrap();
        assert!(c.check_ddzero().is_ok());
        assert_eq!(c.length(), 0);
    }

    #[test]
    fn inhomogeneous_entry_rejected() {
        let mut c = koszul_p1();
        c.terms[1].generators[0].degree = vec![0];
        assert!(matches!(c.validate(), Err(Error::MalformedComplex(_))));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(GradedFreeModule::new(vec![gen(0, "a"), gen(1, "a")]).is_err());
    }

    #[test]
    fn direct_sum_stacks_blocks() {
        let k = koszul_p1();
        let s = FreeComplex::direct_sum(&[k.clone(), k.twisted(&[3])]).unwrap();
        assert_eq!(s.ranks(), vec![2, 4, 2]);
        assert!(s.check_ddzero().is_ok());
        assert_eq!(s.terms[0].generators[1].degree, vec![3]);
    }

    #[test]
    fn render_uses_names() {
        let k = koszul_p1();
        let r = k.diffs[1].render(&k.ring.variable_names);
        assert_eq!(r, vec![vec!["-x1".to_string()], vec!["x0".to_string()]]);
    }
}
