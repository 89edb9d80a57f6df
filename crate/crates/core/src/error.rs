use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("base dimension r must be at least 1 (got r = {0}); X = P(O + O(a_1) + ... + O(a_s)) over P^r")]
    BaseDimension(usize),

    #[error("twist sequence is empty; Picard rank 2 needs s >= 1 twists a_1 <= ... <= a_s")]
    EmptyTwists,

    #[error("twist a_{index} = {value} is negative; Kleinschmidt normal form needs 0 <= a_1")]
    NegativeTwist { index: usize, value: i64 },

    #[error("twist sequence not ascending at a_{index} > a_{next}; Kleinschmidt normal form needs a_1 <= ... <= a_s", next = index + 1)]
    UnsortedTwists { index: usize },

    #[error("monomial involves non-fiber variable {0}; only u0..u3 have a degree prefix")]
    NotFiberMonomial(String),

    #[error("{what} index {index} out of range 0..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("cohomology oracle limited to dim X <= {max} (got {dim})")]
    DimensionGuard { dim: usize, max: usize },

    #[error("twist ({b},{c}) outside the box [0,{r}]x[0,{s}]")]
    TwistOutsideBox { b: i64, c: i64, r: usize, s: usize },

    #[error("non-acyclic twists: {}", fmt_offenders(.0))]
    NonAcyclicTwist(Vec<NonAcyclic>),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("splitting recovery failed: {0}")]
    RecoveryFailed(String),

    #[error("sheaf has no summands")]
    EmptySheaf,

    #[error("invalid multiplicity 0 for twist ({0},{1})")]
    ZeroMultiplicity(i64, i64),

    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A first-factor twist `F ⊗ L_1` with a nonvanishing higher cohomology group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonAcyclic {
    pub twist: [i64; 2],
    pub index: usize,
    pub dim: u64,
}

fn fmt_offenders(v: &[NonAcyclic]) -> String {
    v.iter()
        .map(|o| format!("H^{}(O({},{})) = {}", o.index, o.twist[0], o.twist[1], o.dim))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
