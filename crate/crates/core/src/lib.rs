//! Short linear resolutions of the diagonal for smooth projective toric varieties
//! of Picard rank 2, with line-bundle cohomology, Beilinson-type monads, virtual
//! resolutions and a splitting recognizer built on top.

pub mod applications;
pub mod cohom;
pub mod coxalg;
pub mod diagonal;
pub mod error;
pub mod export;
pub mod monad;
pub mod toric;
pub mod window;

pub use applications::{
    b1_vanishes, check_splitting_hypothesis, recover_splitting_type, virtual_resolution, SplittingType,
    SplittingVerdict, VirtualResolutionResult,
};
pub use cohom::{cohomology_dim, cohomology_oracle, cohomology_table, is_acyclic, CohomologyTable, SheafSpec};
pub use coxalg::{ExactnessReport, Field, FreeComplex, Generator, GradedFreeModule, LinearMatrix, Monomial, RingSpec};
pub use diagonal::{build_pn_warmup, build_r, compare_warmup, verify_exactness, DiagonalResolution};
pub use error::{Error, Result};
pub use monad::{build_monad, e1_terms, verify_monad_identity, E1Page, Monad};
pub use toric::{is_effective, nef_le, DiagonalBundle, KleinschmidtData, ToricVariety};
pub use window::{Degree2, DegreeBox, Rect};
