//! Line-bundle cohomology from the fan alone: for each character μ the μ-graded
//! piece of H^i(X, O(D)) is the reduced cohomology H̃^{i−1} of the subcomplex of
//! the fan spanned by the rays ρ with ⟨μ, u_ρ⟩ < −a_ρ.

use std::collections::HashMap;

use crate::coxalg::{scalar_rank, Field, SparseMatrix};
use crate::error::{Error, Result};
use crate::toric::ToricVariety;
use crate::window::Degree2;

pub const ORACLE_MAX_DIM: usize = 4;

/// dim H^i(X, O(k, ℓ)), computed without the pushforward formula.
pub fn cohomology_oracle(x: &ToricVariety, d: Degree2, i: usize) -> Result<u64> {
    let v = oracle_vector(x, d)?;
    v.get(i).copied().ok_or(Error::IndexOutOfRange {
        what: "cohomological index",
        index: i,
        max: x.dim(),
    })
}

/// All dimensions h^0..h^{r+s} from the fan.
pub fn oracle_vector(x: &ToricVariety, d: Degree2) -> Result<Vec<u64>> {
    FanOracle::new(x)?.vector(d, 1)
}

/// Reusable oracle for one variety; memoises subcomplex cohomology by ray subset.
pub struct FanOracle<'a> {
    x: &'a ToricVariety,
    rays: Vec<Vec<i64>>,
    faces: Vec<u32>,
    memo: HashMap<u32, Vec<u64>>,
}

impl<'a> FanOracle<'a> {
    pub fn new(x: &'a ToricVariety) -> Result<Self> {
        if x.dim() > ORACLE_MAX_DIM {
            return Err(Error::DimensionGuard { dim: x.dim(), max: ORACLE_MAX_DIM });
        }
        let rays = x.ray_matrix().to_vec();
        let (r, s) = (x.r(), x.s());
        let n = rays.len();
        // maximal cones omit one ρ and one σ
        let maximal: Vec<u32> = (0..=r)
            .flat_map(|i| (0..=s).map(move |j| ((1u32 << n) - 1) & !(1 << i) & !(1 << (r + 1 + j))))
            .collect();
        let faces = (0u32..1 << n).filter(|f| maximal.iter().any(|m| f & !m == 0)).collect();
        Ok(FanOracle { x, rays, faces, memo: HashMap::new() })
    }

    /// Reduced cohomology of the induced subcomplex on `mask`; entry p is H̃^{p−1}.
    fn reduced_cohomology(&mut self, mask: u32) -> Vec<u64> {
        if let Some(v) = self.memo.get(&mask) {
            return v.clone();
        }
        let n = self.rays.len();
        let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
        for &f in &self.faces {
            if f & !mask == 0 {
                by_dim[f.count_ones() as usize].push(f);
            }
        }
        // coboundary from faces of size p to size p+1, with the empty face at size 0
        let mut ranks = vec![0usize; n + 1];
        for p in 0..n {
            let (lower, upper) = (&by_dim[p], &by_dim[p + 1]);
            if lower.is_empty() || upper.is_empty() {
                continue;
            }
            let index: HashMap<u32, usize> = lower.iter().enumerate().map(|(i, &f)| (f, i)).collect();
            let mut m = SparseMatrix::new(upper.len(), lower.len());
            for (row, &g) in upper.iter().enumerate() {
                let mut sign = 1i64;
                for v in 0..n {
                    if g & (1 << v) != 0 {
                        m.push(row, index[&(g & !(1 << v))], sign);
                        sign = -sign;
                    }
                }
            }
            ranks[p] = scalar_rank(&m, Field::Rationals);
        }
        let out: Vec<u64> = (0..=n)
            .map(|p| {
                let before = if p > 0 { ranks[p - 1] } else { 0 };
                (by_dim[p].len() - ranks[p] - before) as u64
            })
            .collect();
        self.memo.insert(mask, out.clone());
        out
    }

    /// h^0..h^{r+s} of O(k, ℓ); `pad` widens the character box beyond the
    /// region where contributions can occur.
    pub fn vector(&mut self, d: Degree2, pad: i64) -> Result<Vec<u64>> {
        let (r, s) = (self.x.r(), self.x.s());
        let [k, l] = d;
        let dim = r + s;
        // divisor k·D_{ρ0} + ℓ·D_{σ0}
        let mut coeffs = vec![0i64; self.rays.len()];
        coeffs[0] = k;
        coeffs[r + 1] = l;
        let a: Vec<i64> = self.x.data().a().to_vec();
        let rs = l.abs() + s as i64 + pad;
        let mut out = vec![0u64; dim + 1];
        let mut nu = vec![-rs; s];
        loop {
            let t: i64 = nu.iter().zip(&a).map(|(v, w)| v * w).sum();
            let rr = (k + t).abs() + r as i64 + pad;
            let mut mu = vec![-rr; r];
            loop {
                let chi: Vec<i64> = mu.iter().chain(&nu).copied().collect();
                let mut mask = 0u32;
                for (idx, ray) in self.rays.iter().enumerate() {
                    let pairing: i64 = ray.iter().zip(&chi).map(|(u, c)| u * c).sum();
                    if pairing < -coeffs[idx] {
                        mask |= 1 << idx;
                    }
                }
                let h = self.reduced_cohomology(mask);
                for (p, &val) in h.iter().enumerate().take(dim + 1) {
                    out[p] += val;
                }
                if !advance(&mut mu, rr) {
                    break;
                }
            }
            if !advance(&mut nu, rs) {
                break;
            }
        }
        Ok(out)
    }
}

fn advance(v: &mut [i64], radius: i64) -> bool {
    for x in v.iter_mut() {
        if *x < radius {
            *x += 1;
            return true;
        }
        *x = -radius;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohom::closed::cohomology_vector;

    #[test]
    fn p1_times_p1_minus_one() {
        let x = ToricVariety::product_of_projective_spaces(1, 1).unwrap();
        assert_eq!(oracle_vector(&x, [-1, 0]).unwrap(), vec![0, 0, 0]);
        assert_eq!(oracle_vector(&x, [-2, 0]).unwrap(), vec![0, 1, 0]);
        assert_eq!(oracle_vector(&x, [-2, -2]).unwrap(), vec![0, 0, 1]);
    }

    #[test]
    fn f2_serre_dual_example() {
        let x = ToricVariety::hirzebruch(2).unwrap();
        assert_eq!(cohomology_oracle(&x, [0, -3], 2).unwrap(), 4);
    }

    #[test]
    fn agrees_with_pushforward_on_f1() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let mut o = FanOracle::new(&x).unwrap();
        for k in -5..=5 {
            for l in -5..=5 {
                assert_eq!(o.vector([k, l], 1).unwrap(), cohomology_vector(&x, [k, l]), "({k},{l})");
            }
        }
    }

    #[test]
    fn agrees_with_pushforward_in_dimension_four() {
        for (r, a) in [(2, vec![1, 2]), (1, vec![0, 1, 3]), (3, vec![2])] {
            let x = ToricVariety::new(r, a).unwrap();
            let mut o = FanOracle::new(&x).unwrap();
            for k in -5..=3 {
                for l in -5..=3 {
                    assert_eq!(o.vector([k, l], 1).unwrap(), cohomology_vector(&x, [k, l]), "{} ({k},{l})", x.name());
                }
            }
        }
    }

    #[test]
    fn box_is_saturated() {
        let x = ToricVariety::new(1, vec![1, 3]).unwrap();
        let mut o = FanOracle::new(&x).unwrap();
        for d in [[2, 2], [-4, -5], [7, -4], [-3, 1]] {
            assert_eq!(o.vector(d, 1).unwrap(), o.vector(d, 4).unwrap());
        }
    }

    #[test]
    fn dimension_guard() {
        let x = ToricVariety::new(3, vec![0, 1]).unwrap();
        assert!(matches!(FanOracle::new(&x), Err(Error::DimensionGuard { .. })));
    }
}
