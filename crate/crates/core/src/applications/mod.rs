//! Virtual resolutions of line-bundle sums and the splitting criterion for
//! bundles whose cohomology table looks like that of a sum of line bundles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cohom::{cohomology_table, cohomology_vector, is_acyclic, vanishing, CohomologyTable, SheafSpec};
use crate::coxalg::{window_cost, Field, FreeComplex};
use crate::diagonal::{build_r, DiagonalResolution, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::monad::{build_monad_for, check_monad_at, monad_window, select_degrees, CokernelScope, Monad, MonadCheck};
use crate::toric::{nef_le, ToricVariety};
use crate::window::{Degree2, Rect};

/// Distinct first-factor twists L_1 of R, slot by slot.
#[derive(Clone, Debug)]
pub struct FirstFactors {
    pub r: usize,
    pub s: usize,
    pub slots: Vec<Vec<Degree2>>,
}

impl FirstFactors {
    pub fn new(x: &ToricVariety) -> Self {
        Self::of(&build_r(x))
    }

    pub fn of(res: &DiagonalResolution) -> Self {
        let slots = res
            .complex
            .terms
            .iter()
            .map(|t| {
                let set: BTreeSet<Degree2> = t.generators.iter().map(|g| [g.degree[0], g.degree[1]]).collect();
                set.into_iter().collect()
            })
            .collect();
        FirstFactors { r: res.variety.r(), s: res.variety.s(), slots }
    }

    pub fn all(&self) -> impl Iterator<Item = Degree2> + '_ {
        let set: BTreeSet<Degree2> = self.slots.iter().flatten().copied().collect();
        set.into_iter()
    }
}

fn b1_term_vanishes(x: &ToricVariety, ff: &FirstFactors, d: Degree2, n: usize) -> bool {
    ff.slots[n].iter().all(|l| vanishing(x, [d[0] + l[0], d[1] + l[1]], n - 1))
}

/// B(O(d))_1 = 0: H^{n−1}(O(d) ⊗ L_1) = 0 for every first factor L_1 of every R_n, n ≥ 1.
pub fn b1_vanishes(x: &ToricVariety, d: Degree2) -> bool {
    b1_vanishes_with(x, &FirstFactors::new(x), d)
}

pub fn b1_vanishes_with(x: &ToricVariety, ff: &FirstFactors, d: Degree2) -> bool {
    (1..ff.slots.len()).all(|n| b1_term_vanishes(x, ff, d, n))
}

/// Same answer as [`b1_vanishes_with`], looking only at n ∈ {1, r+1, s+1}:
/// line bundles have cohomology only in degrees 0, r, s and r + s.
pub fn b1_vanishes_fast(x: &ToricVariety, ff: &FirstFactors, d: Degree2) -> bool {
    let ns: BTreeSet<usize> = [1, ff.r + 1, ff.s + 1].into_iter().filter(|&n| n < ff.slots.len()).collect();
    ns.into_iter().all(|n| b1_term_vanishes(x, ff, d, n))
}

/// A sum of line bundles: distinct twists with positive multiplicities, sorted by
/// descending b + c, then descending b.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplittingType {
    pub parts: Vec<SplitPart>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplitPart {
    pub twist: Degree2,
    pub mult: u64,
}

fn nef_key(t: Degree2) -> (i64, i64) {
    (-(t[0] + t[1]), -t[0])
}

impl SplittingType {
    pub fn new<I: IntoIterator<Item = (Degree2, u64)>>(parts: I) -> Result<Self> {
        let mut acc: BTreeMap<(i64, i64), (Degree2, u64)> = BTreeMap::new();
        for (t, m) in parts {
            if m == 0 {
                return Err(Error::ZeroMultiplicity(t[0], t[1]));
            }
            acc.entry(nef_key(t)).or_insert((t, 0)).1 += m;
        }
        Ok(SplittingType { parts: acc.into_values().map(|(twist, mult)| SplitPart { twist, mult }).collect() })
    }

    pub fn from_sheaf(f: &SheafSpec) -> Self {
        Self::new(f.summands().iter().map(|s| (s.twist, s.mult))).expect("multiplicities are positive")
    }

    pub fn to_sheaf(&self) -> SheafSpec {
        SheafSpec::new(self.parts.iter().map(|p| (p.twist, p.mult)).collect()).expect("multiplicities are positive")
    }

    pub fn rank(&self) -> u64 {
        self.parts.iter().map(|p| p.mult).sum()
    }

    /// Consecutive twists descend in the nef order.
    pub fn is_nef_chain(&self) -> bool {
        self.parts.windows(2).all(|w| nef_le(w[1].twist, w[0].twist))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingVerdict {
    pub nef_chain_ok: bool,
    pub table_match: bool,
    /// Both hold, so a bundle with this table splits as the candidate.
    pub conclusion: bool,
}

/// Checks whether a bundle with cohomology table `table` must split as `candidate`.
/// The window has to contain every −(b_i, c_i) with a margin of two.
pub fn check_splitting_hypothesis(
    x: &ToricVariety,
    candidate: &SplittingType,
    table: &CohomologyTable,
) -> Result<SplittingVerdict> {
    let w = table.window;
    for p in &candidate.parts {
        let loc = [-p.twist[0], -p.twist[1]];
        let inner = Rect::new((w.k.0 + DEFAULT_MARGIN, w.k.1 - DEFAULT_MARGIN), (w.l.0 + DEFAULT_MARGIN, w.l.1 - DEFAULT_MARGIN));
        if !inner.contains(loc) {
            return Err(Error::WindowTooSmall(format!(
                "window k {:?}, l {:?} does not contain ({},{}) with margin {DEFAULT_MARGIN}",
                w.k, w.l, loc[0], loc[1]
            )));
        }
    }
    let expected = cohomology_table(x, &candidate.to_sheaf(), w);
    let table_match = expected.rows == table.rows;
    let nef_chain_ok = candidate.is_nef_chain();
    Ok(SplittingVerdict { nef_chain_ok, table_match, conclusion: nef_chain_ok && table_match })
}

/// Recovers the twists of a promised sum of line bundles E from d ↦ h⁰(E(d)).
///
/// Degrees (b, c) are visited in descending b + (a_s + 1)c, which is positive on
/// every nonzero effective class, so each part O(b', c') that has sections after
/// twisting by (−b, −c) has already been found.
pub fn recover_splitting_type<H: Fn(Degree2) -> u64>(x: &ToricVariety, h0: H, window: Rect) -> Result<SplittingType> {
    let phi = |t: Degree2| t[0] + (x.a_s() + 1) * t[1];
    let mut order = window.points();
    order.sort_by_key(|&t| (-phi(t), -t[0]));
    let h0_line = |t: Degree2| cohomology_vector(x, t)[0];
    let mut found: Vec<(Degree2, u64)> = Vec::new();
    for t in order {
        let seen: u64 = found.iter().map(|&(p, m)| m * h0_line([p[0] - t[0], p[1] - t[1]])).sum();
        let total = h0([-t[0], -t[1]]);
        if total < seen {
            return Err(Error::RecoveryFailed(format!(
                "h0 at ({},{}) is {total}, below the {seen} sections of the parts found so far",
                -t[0], -t[1]
            )));
        }
        if total > seen {
            found.push((t, total - seen));
        }
    }
    let split = SplittingType::new(found)?;
    let recomposed = split.to_sheaf();
    for d in window.points() {
        let want = h0(d);
        let got: u64 = recomposed.summands().iter().map(|s| s.mult * h0_line([s.twist[0] + d[0], s.twist[1] + d[1]])).sum();
        if want != got {
            return Err(Error::RecoveryFailed(format!(
                "recomposed h0 at ({},{}) is {got}, expected {want}",
                d[0], d[1]
            )));
        }
    }
    Ok(split)
}

/// h⁰ lookup into a cohomology table; degrees outside the window panic.
pub fn table_h0(table: &CohomologyTable) -> impl Fn(Degree2) -> u64 + '_ {
    move |d| table.get(0, d).unwrap_or_else(|| panic!("degree ({},{}) outside the table window", d[0], d[1]))
}

#[derive(Clone, Debug)]
pub struct VirtualResolutionResult {
    pub shift: Degree2,
    /// B(F(i, j)) twisted back by (−i, −j).
    pub complex: FreeComplex,
    /// The untwisted monad B(F(i, j)).
    pub monad: Monad,
}

impl VirtualResolutionResult {
    pub fn length(&self) -> usize {
        self.complex.length()
    }
}

/// Outcome of re-checking a virtual resolution.
#[derive(Clone, Debug)]
pub struct VirtualCheck {
    pub length_ok: bool,
    pub ddzero: bool,
    /// Exactness and cokernel comparison of the untwisted monad against F(i, j).
    pub monad: MonadCheck,
}

impl VirtualCheck {
    pub fn passed(&self) -> bool {
        self.length_ok && self.ddzero && self.monad.passed() && self.monad.cokernel_degrees > 0
    }
}

/// Length, ∂² = 0, and the monad checks of B(F(i, j)) on its generator box.
/// The box is padded by the largest margin ≤ 2 within `budget`; past the
/// budget only the cheapest degrees are checked (see [`select_degrees`]).
pub fn verify_virtual_resolution(v: &VirtualResolutionResult, budget: u64, field: Field) -> VirtualCheck {
    let m = &v.monad;
    let window = (0..=DEFAULT_MARGIN)
        .rev()
        .map(|margin| monad_window(m, margin))
        .find(|w| window_cost(&m.complex, w) <= budget)
        .unwrap_or_else(|| monad_window(m, 0));
    let degrees = select_degrees(m, &window, budget, CokernelScope::SheafDegrees);
    VirtualCheck {
        length_ok: v.complex.length() <= m.variety.dim(),
        ddzero: v.complex.check_ddzero().is_ok(),
        monad: check_monad_at(m, &window, &degrees, field, CokernelScope::SheafDegrees),
    }
}

/// First (i, j) on the sweep i + j = 0, 1, 2, … (i ascending) making every
/// F(i, j) ⊗ L_1 acyclic.
pub fn acyclic_shift(x: &ToricVariety, ff: &FirstFactors, f: &SheafSpec) -> Degree2 {
    let twists: Vec<Degree2> = f.summands().iter().map(|s| s.twist).collect();
    let factors: Vec<Degree2> = ff.all().collect();
    for n in 0i64.. {
        for i in 0..=n {
            let j = n - i;
            let ok = twists
                .iter()
                .all(|t| factors.iter().all(|l| is_acyclic(x, [t[0] + i + l[0], t[1] + j + l[1]])));
            if ok {
                return [i, j];
            }
        }
    }
    unreachable!()
}

pub fn virtual_resolution(x: &ToricVariety, f: &SheafSpec) -> Result<VirtualResolutionResult> {
    virtual_resolution_for(&build_r(x), f)
}

pub fn virtual_resolution_for(res: &DiagonalResolution, f: &SheafSpec) -> Result<VirtualResolutionResult> {
    if f.is_empty() {
        return Err(Error::EmptySheaf);
    }
    let x = &res.variety;
    let shift = acyclic_shift(x, &FirstFactors::of(res), f);
    let monad = build_monad_for(res, &f.twisted(shift))?;
    let complex = monad.complex.twisted(&[-shift[0], -shift[1]]);
    assert!(complex.length() <= x.dim(), "virtual resolution longer than dim X");
    Ok(VirtualResolutionResult { shift, complex, monad })
}
