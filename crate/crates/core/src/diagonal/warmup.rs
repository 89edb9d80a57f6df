use std::collections::HashMap;

use crate::coxalg::{
    binomial, check_exactness, compositions, generator_locations, CoxBlock, Field, FreeComplex, Generator,
    GradedFreeModule, LinearMatrix, RingSpec, StrandEvaluator,
};
use crate::window::DegreeBox;

/// Cox ring of P^n × P^n with x_0..x_n, y_0..y_n in degrees (1,0), (0,1).
pub fn pn_product_ring(n: usize) -> RingSpec {
    let names = (0..=n).map(|i| format!("x{i}")).chain((0..=n).map(|i| format!("y{i}"))).collect();
    RingSpec::from_blocks(vec![CoxBlock::projective(n), CoxBlock::projective(n)], names)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn u_label(c0: u32, c1: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        e => format!("{v}^{e}"),
    };
    let s = format!("{}{}", part("u0", c0), part("u1", c1));
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

fn word_label(word: &[usize], prefix: char) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter().map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(".")
}

/// Restriction to u-degree 0 of the Koszul complex on α_i = u_1 x_i − u_0 y_i,
/// twisted by (0, 0, n), on the bundle P(O ⊕ O(−1, 1)) over P^n × P^n.
pub fn build_pn_warmup(n: usize) -> FreeComplex {
    assert!(n >= 1, "warm-up needs n >= 1");
    let ring = pn_product_ring(n);
    let mut labels: Vec<Vec<(Vec<usize>, [u32; 2])>> = Vec::new();
    for k in 0..=n {
        let mut slot = Vec::new();
        for c in compositions((n - k) as u32, 2) {
            for w in subsets(n + 1, k) {
                slot.push((w, [c[0], c[1]]));
            }
        }
        labels.push(slot);
    }
    let twist = |w: &[usize], c: [u32; 2]| vec![-(w.len() as i64) - c[0] as i64, c[0] as i64];
    let terms: Vec<GradedFreeModule> = labels
        .iter()
        .map(|slot| GradedFreeModule {
            generators: slot
                .iter()
                .map(|(w, c)| Generator {
                    degree: twist(w, *c),
                    label: format!("{}|{}", word_label(w, 'a'), u_label(c[0], c[1])),
                })
                .collect(),
        })
        .collect();
    let mut diffs = Vec::new();
    for k in 1..=n {
        let index: HashMap<&(Vec<usize>, [u32; 2]), usize> =
            labels[k - 1].iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut d = LinearMatrix::new(labels[k - 1].len(), labels[k].len());
        for (col, (w, c)) in labels[k].iter().enumerate() {
            for (t, &i) in w.iter().enumerate() {
                let sign = if t % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = w.iter().copied().filter(|&v| v != i).collect();
                let x_row = index[&(rest.clone(), [c[0], c[1] + 1])];
                let y_row = index[&(rest, [c[0] + 1, c[1]])];
                d.push(x_row, col, sign, Some(i));
                d.push(y_row, col, -sign, Some(n + 1 + i));
            }
        }
        diffs.push(d);
    }
    FreeComplex::new(ring, terms, diffs).expect("warm-up complex is homogeneous")
}

/// Terms Sym^{n−k}(C_0) ⊗ Λ^k(C_1) of the n-th exterior power of a two-term
/// complex φ: C_1 → C_0, with the Koszul differential induced by φ.
pub fn exterior_power_of_two_term(phi: &FreeComplex, n: usize) -> FreeComplex {
    assert_eq!(phi.terms.len(), 2, "expects a complex concentrated in degrees 0 and 1");
    let (c0, c1) = (&phi.terms[0], &phi.terms[1]);
    let cols = phi.diffs[0].columns();
    let g = phi.ring.grade_dim();
    let mut labels: Vec<Vec<(Vec<usize>, Vec<u32>)>> = Vec::new();
    for k in 0..=n {
        let mut slot = Vec::new();
        for w in subsets(c1.rank(), k) {
            for e in compositions((n - k) as u32, c0.rank()) {
                slot.push((w.clone(), e));
            }
        }
        labels.push(slot);
    }
    let twist = |w: &[usize], e: &[u32]| {
        let mut t = vec![0i64; g];
        for &i in w {
            for (a, b) in t.iter_mut().zip(&c1.generators[i].degree) {
                *a += b;
            }
        }
        for (j, &m) in e.iter().enumerate() {
            for (a, b) in t.iter_mut().zip(&c0.generators[j].degree) {
                *a += m as i64 * b;
            }
        }
        t
    };
    let terms: Vec<GradedFreeModule> = labels
        .iter()
        .map(|slot| GradedFreeModule {
            generators: slot
                .iter()
                .map(|(w, e)| Generator {
                    degree: twist(w, e),
                    label: format!(
                        "{}|{}",
                        word_label(w, 'g'),
                        e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
                    ),
                })
                .collect(),
        })
        .collect();
    let mut diffs = Vec::new();
    for k in 1..=n {
        let index: HashMap<&(Vec<usize>, Vec<u32>), usize> =
            labels[k - 1].iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut d = LinearMatrix::new(labels[k - 1].len(), labels[k].len());
        for (col, (w, e)) in labels[k].iter().enumerate() {
            for (t, &i) in w.iter().enumerate() {
                let sign = if t % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = w.iter().copied().filter(|&v| v != i).collect();
                for entry in &cols[i] {
                    let mut e2 = e.clone();
                    e2[entry.row] += 1;
                    let row = index[&(rest.clone(), e2)];
                    d.push(row, col, sign * entry.coeff, entry.var);
                }
            }
        }
        diffs.push(d);
    }
    FreeComplex::new(phi.ring.clone(), terms, diffs).expect("exterior power is homogeneous")
}

/// S(−1, 1) ⊕ S ← S(−1, 0)^{n+1}, with g_i ↦ −y_i f_0 + x_i f_1.
pub fn section_complex(n: usize) -> FreeComplex {
    let ring = pn_product_ring(n);
    let c0 = GradedFreeModule {
        generators: vec![
            Generator { degree: vec![-1, 1], label: "f0".into() },
            Generator { degree: vec![0, 0], label: "f1".into() },
        ],
    };
    let c1 = GradedFreeModule {
        generators: (0..=n).map(|i| Generator { degree: vec![-1, 0], label: format!("g{i}") }).collect(),
    };
    let mut d = LinearMatrix::new(2, n + 1);
    for i in 0..=n {
        d.push(0, i, -1, Some(n + 1 + i));
        d.push(1, i, 1, Some(i));
    }
    FreeComplex::new(ring, vec![c0, c1], vec![d]).expect("section map is homogeneous")
}

pub fn build_eagon_northcott(n: usize) -> FreeComplex {
    exterior_power_of_two_term(&section_complex(n), n)
}

/// C(n+1, i) · (n − i + 1).
pub fn warmup_rank(n: usize, i: usize) -> u64 {
    binomial(n as u64 + 1, i as u64) * (n - i + 1) as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WarmupComparison {
    pub n: usize,
    pub terms_match: bool,
    pub warmup_exact: bool,
    pub eagon_northcott_exact: bool,
    pub cokernels_match: bool,
    pub window: DegreeBox,
}

impl WarmupComparison {
    pub fn passed(&self) -> bool {
        self.terms_match && self.warmup_exact && self.eagon_northcott_exact && self.cokernels_match
    }
}

fn cokernel_dims(c: &FreeComplex, window: &DegreeBox, field: Field) -> Vec<usize> {
    let mut ev = StrandEvaluator::new(c);
    window
        .points()
        .iter()
        .map(|d| {
            let s = ev.evaluate(d);
            let rank = s.matrices.first().map_or(0, |m| m.rank(field));
            s.dims[0] - rank
        })
        .collect()
}

/// Compares the warm-up complex with the Eagon–Northcott complex: equal twist
/// multisets slot by slot, exactness of both, and equal Hilbert functions of coker ∂_1.
pub fn compare_warmup(n: usize) -> WarmupComparison {
    let warm = build_pn_warmup(n);
    let en = build_eagon_northcott(n);
    let terms_match =
        warm.len() == en.len() && warm.terms.iter().zip(&en.terms).all(|(a, b)| a.degree_multiset() == b.degree_multiset());
    let window = generator_locations(&warm).expect("nonempty").padded(2);
    let field = Field::Rationals;
    WarmupComparison {
        n,
        terms_match,
        warmup_exact: check_exactness(&warm, &window, field).passed(),
        eagon_northcott_exact: check_exactness(&en, &window, field).passed(),
        cokernels_match: cokernel_dims(&warm, &window, field) == cokernel_dims(&en, &window, field),
        window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_ranks() {
        for n in 1..=4 {
            let c = build_pn_warmup(n);
            let ranks: Vec<u64> = c.ranks().into_iter().map(|r| r as u64).collect();
            let expect: Vec<u64> = (0..=n).map(|i| warmup_rank(n, i)).collect();
            assert_eq!(ranks, expect);
            assert_eq!(ranks, ranks.iter().rev().copied().collect::<Vec<_>>());
            assert!(c.check_ddzero().is_ok());
        }
    }

    #[test]
    fn displayed_matrices_for_n_2() {
        let c = build_pn_warmup(2);
        let names = &c.ring.variable_names;
        let d1 = c.diffs[0].render(names);
        let d2 = c.diffs[1].render(names);
        let rows = |m: &[&[&str]]| -> Vec<Vec<String>> {
            m.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect()
        };
        assert_eq!(
            d1,
            rows(&[
                &["-y0", "-y1", "-y2", "0", "0", "0"],
                &["x0", "x1", "x2", "-y0", "-y1", "-y2"],
                &["0", "0", "0", "x0", "x1", "x2"],
            ])
        );
        assert_eq!(
            d2,
            rows(&[
                &["y1", "y2", "0"],
                &["-y0", "0", "y2"],
                &["0", "-y0", "-y1"],
                &["-x1", "-x2", "0"],
                &["x0", "0", "-x2"],
                &["0", "x0", "x1"],
            ])
        );
        let twists: Vec<Vec<i64>> = c.terms[0].generators.iter().map(|g| g.degree.clone()).collect();
        assert_eq!(twists, vec![vec![-2, 2], vec![-1, 1], vec![0, 0]]);
    }

    #[test]
    fn first_exterior_power_is_the_section_map() {
        let en = build_eagon_northcott(1);
        let sec = section_complex(1);
        assert_eq!(en.terms[0].degree_multiset(), sec.terms[0].degree_multiset());
        assert_eq!(en.terms[1].degree_multiset(), sec.terms[1].degree_multiset());
        assert_eq!(en.diffs[0].entries.len(), sec.diffs[0].entries.len());
    }

    #[test]
    fn comparison_passes_for_small_n() {
        for n in 1..=3 {
            let cmp = compare_warmup(n);
            assert!(cmp.passed(), "{cmp:?}");
        }
    }
}
