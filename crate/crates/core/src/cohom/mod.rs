//! Cohomology of line bundles on X and of finite sums of them.

mod closed;
mod oracle;
mod table;

pub use closed::{
    acyclic_region, cohomology_dim, cohomology_vector, h0_hirzebruch, higher_cohomology, is_acyclic, projective_h,
    vanishing, AcyclicRegion,
};
pub use oracle::{cohomology_oracle, oracle_vector, FanOracle, ORACLE_MAX_DIM};
pub use table::{cohomology_table, CohomologyTable, SheafSpec, Summand};
