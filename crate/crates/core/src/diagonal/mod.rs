//! The short resolution R of the diagonal and the P^n warm-up complexes.

mod resolution;
mod warmup;

use crate::coxalg::{check_exactness, generator_locations, window_cost, ExactnessReport, Field};
use crate::window::DegreeBox;

pub use resolution::{build_r, rank_formula, render_differential, DiagonalResolution, RLabel};
pub use warmup::{
    build_eagon_northcott, build_pn_warmup, compare_warmup, exterior_power_of_two_term, pn_product_ring,
    section_complex, warmup_rank, WarmupComparison,
};

/// Margin added around the generator locations when choosing a window.
pub const DEFAULT_MARGIN: i64 = 2;

/// Upper bound on the total strand dimension of an automatically chosen window.
pub const WINDOW_BUDGET: u64 = 4_000_000;

/// Box of generator locations of R padded by `margin`.
pub fn exactness_window(res: &DiagonalResolution, margin: i64) -> DegreeBox {
    generator_locations(&res.complex).expect("R has generators").padded(margin)
}

/// The generator-location box padded by the largest margin ≤ [`DEFAULT_MARGIN`]
/// whose strands fit in [`WINDOW_BUDGET`]; the unpadded box is the fallback.
pub fn default_window(res: &DiagonalResolution) -> (DegreeBox, i64) {
    for margin in (1..=DEFAULT_MARGIN).rev() {
        let w = exactness_window(res, margin);
        if window_cost(&res.complex, &w) <= WINDOW_BUDGET {
            return (w, margin);
        }
    }
    (exactness_window(res, 0), 0)
}

/// Exactness of R in positive homological degrees, strand by strand over the window.
pub fn verify_exactness(res: &DiagonalResolution, window: &DegreeBox, field: Field) -> ExactnessReport {
    check_exactness(&res.complex, window, field)
}
