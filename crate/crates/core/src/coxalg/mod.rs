//! Multigraded monomials, graded free complexes and their degree-wise evaluation.

mod complex;
mod exactness;
mod linalg;
mod monomial;
mod ring;
mod strand;

pub(crate) use monomial::fibre_names;
pub use complex::{DdWitness, Entry, FreeComplex, Generator, GradedFreeModule, LinearMatrix};
pub use exactness::{check_exactness, generator_locations, strand_costs, window_cost, ExactnessFailure, ExactnessReport};
pub use linalg::{cross_check_rank, rank_bareiss, rank_mod_p, scalar_rank, sparse_rank_mod_p, SparseMatrix};
pub use monomial::{compositions, fiber_degree_prefix, fiber_monomials, monomial_degree_prefix, Monomial};
pub use ring::{binomial, weighted_compositions, CoxBlock, Field, RingSpec, DEFAULT_PRIME, RATIONAL_SIZE_THRESHOLD};
pub use strand::{evaluate_complex_at_degree, graded_basis, module_dim, HomologyDefect, ScalarComplex, StrandEvaluator};
