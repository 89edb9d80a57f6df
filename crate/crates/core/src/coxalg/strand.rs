use std::rc::Rc;

use rustc_hash::FxHashMap;

use super::complex::{FreeComplex, GradedFreeModule};
use super::linalg::SparseMatrix;
use super::ring::{Field, RingSpec};

/// Degree-wise slice of a free complex: `matrices[k]` maps slot k+1 to slot k.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScalarComplex {
    pub dims: Vec<usize>,
    pub matrices: Vec<SparseMatrix>,
}

/// A slot where rank(∂_k) + rank(∂_{k+1}) falls short of its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyDefect {
    pub slot: usize,
    pub dim: usize,
    pub homology: usize,
}

impl ScalarComplex {
    pub fn ranks(&self, field: Field) -> Vec<usize> {
        self.matrices.iter().map(|m| m.rank(field)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Homology dimensions in every slot.
    pub fn homology(&self, field: Field) -> Vec<usize> {
        let ranks = self.ranks(field);
        (0..self.dims.len())
            .map(|k| {
                let out = if k > 0 { ranks[k - 1] } else { 0 };
                let inc = ranks.get(k).copied().unwrap_or(0);
                self.dims[k] - out - inc
            })
            .collect()
    }

    /// Slots k ≥ 1 with nonzero homology.
    pub fn defects_in_positive_degrees(&self, field: Field) -> Vec<HomologyDefect> {
        if self.dims.iter().skip(1).all(|&d| d == 0) {
            return Vec::new();
        }
        self.homology(field)
            .into_iter()
            .enumerate()
            .skip(1)
            .filter(|&(_, h)| h != 0)
            .map(|(slot, homology)| HomologyDefect { slot, dim: self.dims[slot], homology })
            .collect()
    }
}

struct Piece {
    monos: Vec<Vec<u32>>,
    index: FxHashMap<Vec<u32>, u32>,
}

/// Evaluates a fixed complex at many degrees, caching graded pieces and
/// multiplication-by-variable maps between them.
pub struct StrandEvaluator<'a> {
    complex: &'a FreeComplex,
    pieces: FxHashMap<Vec<i64>, Rc<Piece>>,
    mult: FxHashMap<(Vec<i64>, usize), Rc<Vec<u32>>>,
    columns: Vec<Vec<Vec<super::complex::Entry>>>,
}

impl<'a> StrandEvaluator<'a> {
    pub fn new(complex: &'a FreeComplex) -> Self {
        let columns = complex.diffs.iter().map(|d| d.columns()).collect();
        StrandEvaluator { complex, pieces: FxHashMap::default(), mult: FxHashMap::default(), columns }
    }

    fn piece(&mut self, deg: &[i64]) -> Rc<Piece> {
        if let Some(p) = self.pieces.get(deg) {
            return p.clone();
        }
        let monos = self.complex.ring.monomials(deg);
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        let p = Rc::new(Piece { monos, index });
        self.pieces.insert(deg.to_vec(), p.clone());
        p
    }

    /// Positions in S_{deg + deg(var)} of var · (basis of S_deg).
    fn mult_map(&mut self, deg: &[i64], var: usize) -> Rc<Vec<u32>> {
        let key = (deg.to_vec(), var);
        if let Some(m) = self.mult.get(&key) {
            return m.clone();
        }
        let src = self.piece(deg);
        let tdeg: Vec<i64> = deg.iter().zip(self.complex.ring.var_degree(var)).map(|(a, b)| a + b).collect();
        let dst = self.piece(&tdeg);
        let mut z = Vec::new();
        let map: Vec<u32> = src
            .monos
            .iter()
            .map(|m| {
                z.clone_from(m);
                z[var] += 1;
                dst.index[&z]
            })
            .collect();
        let map = Rc::new(map);
        self.mult.insert(key, map.clone());
        map
    }

    fn shifted(d: &[i64], t: &[i64]) -> Vec<i64> {
        d.iter().zip(t).map(|(a, b)| a + b).collect()
    }

    /// Dimension of every slot at degree `d`, without building matrices.
    pub fn dims_at(&self, d: &[i64]) -> Vec<usize> {
        self.complex
            .terms
            .iter()
            .map(|t| module_dim(&self.complex.ring, t, d) as usize)
            .collect()
    }

    pub fn evaluate(&mut self, d: &[i64]) -> ScalarComplex {
        let complex = self.complex;
        let mut offsets: Vec<Vec<usize>> = Vec::with_capacity(complex.terms.len());
        let mut dims = Vec::with_capacity(complex.terms.len());
        for t in &complex.terms {
            let mut off = Vec::with_capacity(t.rank());
            let mut acc = 0usize;
            for g in &t.generators {
                off.push(acc);
                acc += complex.ring.piece_dim(&Self::shifted(d, &g.degree)) as usize;
            }
            offsets.push(off);
            dims.push(acc);
        }
        let mut matrices = Vec::with_capacity(complex.diffs.len());
        for k in 0..complex.diffs.len() {
            let mut m = SparseMatrix::new(dims[k], dims[k + 1]);
            if dims[k] > 0 && dims[k + 1] > 0 {
                let source = &complex.terms[k + 1];
                for (col, g) in source.generators.iter().enumerate() {
                    let deg = Self::shifted(d, &g.degree);
                    let n = complex.ring.piece_dim(&deg) as usize;
                    if n == 0 {
                        continue;
                    }
                    let c0 = offsets[k + 1][col];
                    for e in self.columns[k][col].clone() {
                        let r0 = offsets[k][e.row];
                        match e.var {
                            None => {
                                for i in 0..n {
                                    m.push(r0 + i, c0 + i, e.coeff);
                                }
                            }
                            Some(v) => {
                                let map = self.mult_map(&deg, v);
                                for (i, &j) in map.iter().enumerate() {
                                    m.push(r0 + j as usize, c0 + i, e.coeff);
                                }
                            }
                        }
                    }
                }
            }
            matrices.push(m);
        }
        ScalarComplex { dims, matrices }
    }

    pub fn cached_pieces(&self) -> usize {
        self.pieces.len()
    }

    /// Drops cached pieces (useful between far-apart batches of degrees).
    pub fn clear_cache(&mut self) {
        self.pieces.clear();
        self.mult.clear();
    }
}

/// Basis of the degree-d part of a free module: (generator index, monomial),
/// ordered by generator then by decreasing lexicographic monomial order.
pub fn graded_basis(ring: &RingSpec, module: &GradedFreeModule, d: &[i64]) -> Vec<(usize, Vec<u32>)> {
    module
        .generators
        .iter()
        .enumerate()
        .flat_map(|(i, g)| {
            let deg: Vec<i64> = d.iter().zip(&g.degree).map(|(a, b)| a + b).collect();
            ring.monomials(&deg).into_iter().map(move |m| (i, m))
        })
        .collect()
}

pub fn module_dim(ring: &RingSpec, module: &GradedFreeModule, d: &[i64]) -> u64 {
    module
        .generators
        .iter()
        .map(|g| {
            let deg: Vec<i64> = d.iter().zip(&g.degree).map(|(a, b)| a + b).collect();
            ring.piece_dim(&deg)
        })
        .sum()
}

pub fn evaluate_complex_at_degree(c: &FreeComplex, d: &[i64]) -> ScalarComplex {
    StrandEvaluator::new(c).evaluate(d)
}
