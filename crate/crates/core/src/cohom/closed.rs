use crate::coxalg::{binomial, weighted_compositions};
use crate::error::{Error, Result};
use crate::toric::ToricVariety;
use crate::window::Degree2;

/// dim H⁰(F_a, O(k, ℓ)) = Σ_{i=0..ℓ} max(0, a·i + k + 1), zero for ℓ < 0.
pub fn h0_hirzebruch(a: i64, k: i64, l: i64) -> u64 {
    if l < 0 {
        return 0;
    }
    (0..=l).map(|i| (a * i + k + 1).max(0) as u64).sum()
}

/// dim H^i(P^r, O(d)).
pub fn projective_h(r: usize, d: i64, i: usize) -> u64 {
    let r64 = r as i64;
    if i == 0 && d >= 0 {
        binomial((d + r64) as u64, r as u64)
    } else if i == r && d <= -r64 - 1 {
        binomial((-d - 1) as u64, r as u64)
    } else {
        0
    }
}

/// dim H^i(X, O(k, ℓ)) via pushforward to P^r: Sym^ℓ of O ⊕ O(a_1) ⊕ … ⊕ O(a_s)
/// splits into O(w) over compositions, and the dual power appears for ℓ ≤ −s−1.
pub fn cohomology_dim(x: &ToricVariety, d: Degree2, i: usize) -> Result<u64> {
    let n = x.dim();
    if i > n {
        return Err(Error::IndexOutOfRange { what: "cohomological index", index: i, max: n });
    }
    Ok(cohomology_vector(x, d)[i])
}

/// All dimensions h^0..h^{r+s} of O(k, ℓ).
pub fn cohomology_vector(x: &ToricVariety, d: Degree2) -> Vec<u64> {
    let (r, s) = (x.r(), x.s());
    let [k, l] = d;
    let mut out = vec![0u64; r + s + 1];
    let weights: Vec<i64> = (0..=s).map(|j| x.data().twist(j)).collect();
    if l >= 0 {
        for (w, count) in weighted_compositions(&weights, l as u64) {
            for (i, slot) in out.iter_mut().enumerate().take(r + 1) {
                *slot += count * projective_h(r, k + w, i);
            }
        }
    } else if l <= -(s as i64) - 1 {
        let p = (-l - s as i64 - 1) as u64;
        for (w, count) in weighted_compositions(&weights, p) {
            for i in 0..=r {
                out[i + s] += count * projective_h(r, k - x.m() - w, i);
            }
        }
    }
    out
}

/// Whether H^i(X, O(k, ℓ)) vanishes, decided by the inequalities alone.
pub fn vanishing(x: &ToricVariety, d: Degree2, i: usize) -> bool {
    let (r, s) = (x.r() as i64, x.s() as i64);
    let (a_s, m) = (x.a_s(), x.m());
    let [k, l] = d;
    let i = i as i64;
    let h0 = l < 0 || k + a_s * l < 0;
    let top = -r - 1 - a_s * (l + s + 1) + m < k || -s - 1 < l;
    let at_r = -r - 1 < k || l < 0;
    let at_s = -s - 1 < l || k < m;
    if i == 0 {
        h0
    } else if i == r + s {
        top
    } else if r == s && i == r {
        at_r && at_s
    } else if i == r {
        at_r
    } else if i == s {
        at_s
    } else {
        true
    }
}

/// H^i = 0 for all i > 0, by the three acyclic regions.
pub fn is_acyclic(x: &ToricVariety, d: Degree2) -> bool {
    acyclic_region(x, d).is_some()
}

/// Which acyclic region contains the twist: the middle band, the region above
/// the nef cone's translate, or the far side of the band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcyclicRegion {
    MiddleBand,
    Upper,
    Lower,
}

pub fn acyclic_region(x: &ToricVariety, d: Degree2) -> Option<AcyclicRegion> {
    let (r, s) = (x.r() as i64, x.s() as i64);
    let (a_s, m) = (x.a_s(), x.m());
    let [k, l] = d;
    if -s - 1 < l && l < 0 {
        Some(AcyclicRegion::MiddleBand)
    } else if -r - 1 < k && 0 <= l {
        Some(AcyclicRegion::Upper)
    } else if -r - 1 - a_s * (l + s + 1) + m < k && k < m && l <= -s - 1 {
        Some(AcyclicRegion::Lower)
    } else {
        None
    }
}

/// Largest index with nonzero cohomology among i > 0, if any.
pub fn higher_cohomology(x: &ToricVariety, d: Degree2) -> Vec<(usize, u64)> {
    cohomology_vector(x, d)
        .into_iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, h)| h > 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: i64) -> ToricVariety {
        ToricVariety::hirzebruch(a).unwrap()
    }

    #[test]
    fn hirzebruch_h0_values() {
        assert_eq!(h0_hirzebruch(2, 1, 1), 6);
        assert_eq!(h0_hirzebruch(3, 0, 1), 5);
        for a in 0..4 {
            assert_eq!(h0_hirzebruch(a, 5, -1), 0);
        }
    }

    #[test]
    fn structure_sheaf() {
        let x = f(1);
        assert_eq!(cohomology_vector(&x, [0, 0]), vec![1, 0, 0]);
    }

    #[test]
    fn middle_band_twist_is_zero() {
        for a in 1..4 {
            assert_eq!(cohomology_vector(&f(a), [a, -1]), vec![0, 0, 0]);
        }
    }

    #[test]
    fn h1_of_minus_two_fibres() {
        assert_eq!(cohomology_dim(&f(1), [-2, 0], 1).unwrap(), 1);
    }

    #[test]
    fn serre_dual_example_on_f2() {
        // dual twist (m − r − 1 − k, −s − 1 − ℓ) = (0, 1), and h⁰(0, 1) = 1 + 3
        assert_eq!(cohomology_dim(&f(2), [0, -3], 2).unwrap(), 4);
        assert_eq!(h0_hirzebruch(2, 0, 1), 4);
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(cohomology_dim(&f(1), [0, 0], 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn h0_agrees_with_hirzebruch_formula() {
        for a in 0..4 {
            for k in -6..6 {
                for l in -3..4 {
                    assert_eq!(cohomology_vector(&f(a), [k, l])[0], h0_hirzebruch(a, k, l));
                }
            }
        }
    }

    #[test]
    fn equal_r_and_s_use_the_merged_predicate() {
        let x = ToricVariety::new(2, vec![1, 1]).unwrap();
        // both H^2 sources can fire at index r = s = 2
        for k in -8..8 {
            for l in -8..8 {
                let h = cohomology_vector(&x, [k, l]);
                assert_eq!(vanishing(&x, [k, l], 2), h[2] == 0, "({k},{l})");
            }
        }
        // a twist nonvanishing only through the ℓ ≤ −s−1 branch
        assert!(!vanishing(&x, [2, -3], 2));
        // and one only through the ℓ ≥ 0 branch
        assert!(!vanishing(&x, [-3, 0], 2));
    }

    #[test]
    fn acyclic_regions_examples() {
        let x = f(2);
        assert_eq!(acyclic_region(&x, [5, -1]), Some(AcyclicRegion::MiddleBand));
        assert_eq!(acyclic_region(&x, [-1, 0]), Some(AcyclicRegion::Upper));
        assert_eq!(acyclic_region(&x, [-2, 0]), None);
        assert_eq!(acyclic_region(&x, [1, -2]), Some(AcyclicRegion::Lower));
    }
}
