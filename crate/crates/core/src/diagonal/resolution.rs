use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cohom::h0_hirzebruch;
use crate::coxalg::{
    binomial, fiber_degree_prefix, fiber_monomials, FreeComplex, Generator, GradedFreeModule, LinearMatrix, Monomial,
    RingSpec,
};
use crate::error::{Error, Result};
use crate::toric::ToricVariety;

/// Bookkeeping for a summand of R: the exterior monomial α_I β_J times the fibre
/// monomial m ∈ M_{r−|I|, s−|J|}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RLabel {
    pub alphas: Vec<usize>,
    pub betas: Vec<usize>,
    pub m: Monomial,
}

impl RLabel {
    pub fn len(&self) -> usize {
        self.alphas.len() + self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// e.g. `a0.b1|u0^2u1`; `1` stands for the empty word or the unit monomial.
    pub fn render(&self) -> String {
        let mut word = String::new();
        for (k, i) in self.alphas.iter().map(|i| ('a', i)).chain(self.betas.iter().map(|j| ('b', j))) {
            if !word.is_empty() {
                word.push('.');
            }
            write!(word, "{k}{i}").unwrap();
        }
        if word.is_empty() {
            word.push('1');
        }
        format!("{word}|{}", self.m.display(&crate::coxalg::fibre_names(), ""))
    }
}

/// The complex R over the Cox ring of X × X together with its generator labels.
#[derive(Clone, Debug)]
pub struct DiagonalResolution {
    pub variety: ToricVariety,
    pub complex: FreeComplex,
    pub labels: Vec<Vec<RLabel>>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
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
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

impl DiagonalResolution {
    pub fn ring(&self) -> &RingSpec {
        &self.complex.ring
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.complex.ranks()
    }

    /// Twist of the summand labelled (I, J, m).
    pub fn twist(x: &ToricVariety, label: &RLabel) -> Vec<i64> {
        let [d1, d2, _, _] = fiber_degree_prefix(x.a_s(), &label.m);
        let sum_a: i64 = label.betas.iter().map(|&j| x.data().twist(j)).sum();
        vec![-(label.alphas.len() as i64) - d1 + sum_a, -(label.betas.len() as i64) - d2, d1, d2]
    }

    /// First-factor twist L_1 of a generator: the first two twist coordinates.
    pub fn first_factor(&self, slot: usize, idx: usize) -> [i64; 2] {
        let t = &self.complex.terms[slot].generators[idx].degree;
        [t[0], t[1]]
    }

    pub fn second_factor(&self, slot: usize, idx: usize) -> [i64; 2] {
        let t = &self.complex.terms[slot].generators[idx].degree;
        [t[2], t[3]]
    }
}

/// Builds R directly from the (I, J, m) indexing of its summands.
pub fn build_r(x: &ToricVariety) -> DiagonalResolution {
    let (r, s, a_s) = (x.r(), x.s(), x.a_s());
    let n_vars = x.num_vars();
    let ring = RingSpec::cox_product(x);
    let mut labels: Vec<Vec<RLabel>> = Vec::with_capacity(r + s + 1);
    for n in 0..=r + s {
        let mut slot = Vec::new();
        // more alphas first, matching the order in which R is usually displayed
        for ni in (0..=n.min(r + 1)).rev() {
            let nj = n - ni;
            if nj > s + 1 {
                continue;
            }
            let ms = fiber_monomials(a_s, r as i64 - ni as i64, s as i64 - nj as i64);
            let is = subsets(r + 1, ni);
            let js = subsets(s + 1, nj);
            for m in &ms {
                for j in &js {
                    for i in &is {
                        slot.push(RLabel { alphas: i.clone(), betas: j.clone(), m: m.clone() });
                    }
                }
            }
        }
        labels.push(slot);
    }
    let index: Vec<HashMap<&RLabel, usize>> =
        labels.iter().map(|slot| slot.iter().enumerate().map(|(i, l)| (l, i)).collect()).collect();
    let terms: Vec<GradedFreeModule> = labels
        .iter()
        .map(|slot| GradedFreeModule {
            generators: slot
                .iter()
                .map(|l| Generator { degree: DiagonalResolution::twist(x, l), label: l.render() })
                .collect(),
        })
        .collect();
    let u = |e: [u32; 4]| Monomial::new(e.to_vec());
    let mut diffs = Vec::with_capacity(r + s);
    for n in 1..=r + s {
        let mut d = LinearMatrix::new(labels[n - 1].len(), labels[n].len());
        for (col, l) in labels[n].iter().enumerate() {
            let mut pos = 0usize;
            let emit = |target: RLabel, var: usize, coeff: i64, d: &mut LinearMatrix| {
                let row = *index[n - 1]
                    .get(&target)
                    .unwrap_or_else(|| panic!("row {} missing from R_{}", target.render(), n - 1));
                d.push(row, col, coeff, Some(var));
            };
            for (t, &i) in l.alphas.iter().enumerate() {
                let sign = if (pos + t) % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = l.alphas.iter().copied().filter(|&v| v != i).collect();
                let to = |f: [u32; 4]| RLabel { alphas: rest.clone(), betas: l.betas.clone(), m: l.m.mul(&u(f)) };
                emit(to([0, 0, 1, 0]), x.x(i), sign, &mut d);
                emit(to([1, 0, 0, 0]), n_vars + x.x(i), -sign, &mut d);
            }
            pos += l.alphas.len();
            for (t, &j) in l.betas.iter().enumerate() {
                let sign = if (pos + t) % 2 == 0 { 1 } else { -1 };
                let rest: Vec<usize> = l.betas.iter().copied().filter(|&v| v != j).collect();
                let aj = x.data().twist(j);
                let to = |f: [u32; 4]| RLabel { alphas: l.alphas.clone(), betas: rest.clone(), m: l.m.mul(&u(f)) };
                emit(to([0, 0, 0, 1]), x.y(j), sign, &mut d);
                emit(to([(a_s - aj) as u32, 1, aj as u32, 0]), n_vars + x.y(j), -sign, &mut d);
            }
        }
        diffs.push(d);
    }
    let complex = FreeComplex::new(ring, terms, diffs).expect("R is homogeneous by construction");
    DiagonalResolution { variety: x.clone(), complex, labels }
}

/// C(r+s, n) · ((r+1)(s+1) + C(s+1, 2) a_s).
pub fn rank_formula(x: &ToricVariety, n: usize) -> Result<u64> {
    let (r, s) = (x.r(), x.s());
    if n > r + s {
        return Err(Error::IndexOutOfRange { what: "homological index", index: n, max: r + s });
    }
    Ok(binomial((r + s) as u64, n as u64) * h0_hirzebruch(x.a_s(), r as i64, s as i64))
}

/// Text rendering of ∂_k with primed second-factor variables.
pub fn render_differential(res: &DiagonalResolution, k: usize) -> String {
    let d = &res.complex.diffs[k - 1];
    let cells = d.render(&res.complex.ring.variable_names);
    let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(line.join(" ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(res: &DiagonalResolution, k: usize, row: &str, col: &str) -> String {
        let c = &res.complex;
        let r = c.terms[k - 1].generators.iter().position(|g| g.label == row).expect(row);
        let cc = c.terms[k].generators.iter().position(|g| g.label == col).expect(col);
        c.diffs[k - 1].render(&c.ring.variable_names)[r][cc].clone()
    }

    #[test]
    fn hirzebruch_slot_ranks() {
        for a in 0..6 {
            let res = build_r(&ToricVariety::hirzebruch(a).unwrap());
            let a = a as usize;
            assert_eq!(res.ranks(), vec![a + 4, 2 * a + 8, a + 4]);
        }
    }

    #[test]
    fn r0_labels_and_twists_on_f_a() {
        let a = 3;
        let res = build_r(&ToricVariety::hirzebruch(a).unwrap());
        let labels: Vec<&str> = res.complex.terms[0].generators.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, ["1|u0^4u1", "1|u0^3u1u2", "1|u0^2u1u2^2", "1|u0u1u2^3", "1|u1u2^4", "1|u0u3", "1|u2u3"]);
        let twists: Vec<Vec<i64>> = res.complex.terms[0].generators.iter().map(|g| g.degree.clone()).collect();
        assert_eq!(twists[0], vec![-1, -1, 1, 1]);
        assert_eq!(twists[4], vec![a, -1, -a, 1]);
        assert_eq!(twists[5], vec![-1, 0, 1, 0]);
        assert_eq!(twists[6], vec![0, 0, 0, 0]);
    }

    #[test]
    fn r1_and_r2_order_on_f_a() {
        let res = build_r(&ToricVariety::hirzebruch(2).unwrap());
        let l1: Vec<&str> = res.complex.terms[1].generators.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(
            l1,
            [
                "a0|u0^2u1", "a1|u0^2u1", "a0|u0u1u2", "a1|u0u1u2", "a0|u1u2^2", "a1|u1u2^2", "a0|u3", "a1|u3",
                "b0|u0", "b1|u0", "b0|u2", "b1|u2"
            ]
        );
        let l2: Vec<&str> = res.complex.terms[2].generators.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(l2, ["a0.a1|u0u1", "a0.a1|u1u2", "a0.b0|1", "a1.b0|1", "a0.b1|1", "a1.b1|1"]);
        let t: Vec<Vec<i64>> = res.complex.terms[1].generators.iter().map(|g| g.degree.clone()).collect();
        assert_eq!(t[0], vec![-1, -1, 0, 1]);
        assert_eq!(t[6], vec![-1, 0, 0, 0]);
        assert_eq!(t[9], vec![1, -1, 1, 0]);
        assert_eq!(t[11], vec![2, -1, 0, 0]);
    }

    #[test]
    fn first_differential_matches_displayed_matrix() {
        let res = build_r(&ToricVariety::hirzebruch(2).unwrap());
        assert_eq!(cell(&res, 1, "1|u0^3u1", "a0|u0^2u1"), "-x0'");
        assert_eq!(cell(&res, 1, "1|u0^2u1u2", "a1|u0^2u1"), "x1");
        assert_eq!(cell(&res, 1, "1|u0^3u1", "b0|u0"), "-y0'");
        assert_eq!(cell(&res, 1, "1|u0u1u2^2", "b1|u0"), "-y1'");
        assert_eq!(cell(&res, 1, "1|u0u3", "b1|u0"), "y1");
        assert_eq!(cell(&res, 1, "1|u2u3", "a1|u3"), "x1");
        assert_eq!(cell(&res, 1, "1|u0u3", "a0|u3"), "-x0'");
        assert_eq!(cell(&res, 1, "1|u1u2^3", "b1|u2"), "-y1'");
        for col in res.complex.diffs[0].columns() {
            assert_eq!(col.len(), 2);
            let primed = col.iter().filter(|e| e.var.unwrap() >= res.variety.num_vars()).count();
            assert_eq!(primed, 1);
        }
    }

    #[test]
    fn second_differential_matches_displayed_matrix() {
        let res = build_r(&ToricVariety::hirzebruch(2).unwrap());
        assert_eq!(cell(&res, 2, "a0|u0^2u1", "a0.a1|u0u1"), "x1'");
        assert_eq!(cell(&res, 2, "a1|u0^2u1", "a0.a1|u0u1"), "-x0'");
        assert_eq!(cell(&res, 2, "a0|u0u1u2", "a0.a1|u0u1"), "-x1");
        assert_eq!(cell(&res, 2, "a1|u0u1u2", "a0.a1|u0u1"), "x0");
        assert_eq!(cell(&res, 2, "a0|u0^2u1", "a0.b0|1"), "y0'");
        assert_eq!(cell(&res, 2, "a0|u3", "a0.b0|1"), "-y0");
        assert_eq!(cell(&res, 2, "b0|u0", "a0.b0|1"), "-x0'");
        assert_eq!(cell(&res, 2, "b0|u2", "a1.b0|1"), "x1");
        assert_eq!(cell(&res, 2, "a0|u1u2^2", "a0.b1|1"), "y1'");
        assert_eq!(cell(&res, 2, "a1|u3", "a1.b1|1"), "-y1");
    }

    #[test]
    fn rank_formula_values() {
        let f2 = ToricVariety::hirzebruch(2).unwrap();
        assert_eq!(rank_formula(&f2, 1).unwrap(), 12);
        let x = ToricVariety::new(2, vec![1, 3]).unwrap();
        assert_eq!(rank_formula(&x, 0).unwrap(), 3 * 3 + 3 * 3);
        for n in 0..=4 {
            assert_eq!(rank_formula(&x, n).unwrap(), rank_formula(&x, 4 - n).unwrap());
        }
        assert!(rank_formula(&x, 5).is_err());
    }

    #[test]
    fn squares_to_zero_and_is_linear() {
        for (r, a) in [(1, vec![1]), (2, vec![0, 2]), (1, vec![1, 3])] {
            let res = build_r(&ToricVariety::new(r, a).unwrap());
            assert!(res.complex.check_ddzero().is_ok());
            for d in &res.complex.diffs {
                assert!(d.entries.iter().all(|e| e.var.is_some() && e.coeff.abs() == 1));
            }
        }
    }

    #[test]
    fn label_rendering() {
        let l = RLabel { alphas: vec![0], betas: vec![1], m: Monomial::new(vec![2, 1, 0, 0]) };
        assert_eq!(l.render(), "a0.b1|u0^2u1");
        let l = RLabel { alphas: vec![], betas: vec![], m: Monomial::new(vec![0; 4]) };
        assert_eq!(l.render(), "1|1");
    }
}
