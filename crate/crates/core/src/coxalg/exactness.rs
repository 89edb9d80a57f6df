use std::collections::BTreeMap;

use rayon::prelude::*;

use super::complex::FreeComplex;
use super::ring::Field;
use super::strand::StrandEvaluator;
use crate::window::DegreeBox;

/// Homology found in a positive slot of some strand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessFailure {
    pub degree: Vec<i64>,
    pub slot: usize,
    pub dim: usize,
    pub homology: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub window: DegreeBox,
    pub field: Field,
    /// Degrees in the window.
    pub degrees: usize,
    /// Degrees whose strand is nonzero in some positive slot.
    pub nontrivial: usize,
    /// Total dimension of all evaluated strands.
    pub basis_elements: u64,
    pub failures: Vec<ExactnessFailure>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Smallest box containing −t for every summand S(t) of every term, i.e. the
/// degrees where the generators live.
pub fn generator_locations(c: &FreeComplex) -> Option<DegreeBox> {
    let locs: Vec<Vec<i64>> =
        c.terms.iter().flat_map(|t| t.degrees().map(|d| d.iter().map(|x| -x).collect())).collect();
    DegreeBox::bounding(locs.iter().map(|v| v.as_slice()))
}

/// Total strand dimension at each point of the window.
pub fn strand_costs(c: &FreeComplex, window: &DegreeBox) -> Vec<(u64, Vec<i64>)> {
    let mut twists: BTreeMap<&[i64], u64> = BTreeMap::new();
    for t in &c.terms {
        for g in &t.generators {
            *twists.entry(g.degree.as_slice()).or_default() += 1;
        }
    }
    let twists: Vec<(&[i64], u64)> = twists.into_iter().collect();
    window
        .points()
        .into_par_iter()
        .map(|d| {
            let cost = twists
                .iter()
                .map(|(t, n)| {
                    let deg: Vec<i64> = d.iter().zip(t.iter()).map(|(a, b)| a + b).collect();
                    n * c.ring.piece_dim(&deg)
                })
                .sum::<u64>();
            (cost, d)
        })
        .collect()
}

/// Sum of all strand dimensions over the window.
pub fn window_cost(c: &FreeComplex, window: &DegreeBox) -> u64 {
    strand_costs(c, window).iter().map(|e| e.0).sum()
}

/// Checks rank(∂_k) + rank(∂_{k+1}) = dim slot k for every k ≥ 1 at every degree of the window.
pub fn check_exactness(c: &FreeComplex, window: &DegreeBox, field: Field) -> ExactnessReport {
    let points = window.points();
    let results: Vec<(bool, u64, Vec<ExactnessFailure>)> = points
        .par_iter()
        .map_init(
            || StrandEvaluator::new(c),
            |ev, d| {
                let dims = ev.dims_at(d);
                if dims.iter().skip(1).all(|&x| x == 0) {
                    return (false, dims.iter().map(|&x| x as u64).sum(), Vec::new());
                }
                if ev.cached_pieces() > 20_000 {
                    ev.clear_cache();
                }
                let strand = ev.evaluate(d);
                let failures = strand
                    .defects_in_positive_degrees(field)
                    .into_iter()
                    .map(|f| ExactnessFailure { degree: d.clone(), slot: f.slot, dim: f.dim, homology: f.homology })
                    .collect();
                (true, strand.total_dim() as u64, failures)
            },
        )
        .collect();
    let mut report = ExactnessReport {
        window: window.clone(),
        field,
        degrees: points.len(),
        nontrivial: 0,
        basis_elements: 0,
        failures: Vec::new(),
    };
    for (nontrivial, size, failures) in results {
        report.nontrivial += nontrivial as usize;
        report.basis_elements += size;
        report.failures.extend(failures);
    }
    report
}
