use thiserror::Error;

use crate::expr::ParseError;

/// Errors produced anywhere in the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid is not strictly increasing at index {index}")]
    NonMonotonicGrid { index: usize },

    #[error("grid is empty")]
    EmptyGrid,

    #[error("probability budget {0} is outside (0, 1]")]
    BudgetOutOfRange(f64),

    #[error("first moment {n_bar} is outside the feasible range [{lo}, {hi}]")]
    InfeasibleMean { n_bar: f64, lo: f64, hi: f64 },

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("invalid weight {weight} at support point {x}")]
    InvalidWeight { x: f64, weight: f64 },

    #[error("point {0} is outside the objective's domain")]
    OutOfDomain(f64),

    #[error("expression domain error: {0}")]
    ExpressionDomain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("objective slope is mixed; use the segmented solver")]
    MixedSlopeRequiresSegmentation,

    #[error("mean {0} must be nonnegative")]
    NegativeMean(f64),

    #[error("split is degenerate: no probability mass above the pivot")]
    DegenerateSplit,

    #[error("ratio {ratio} lies outside the interval [{lo}, {hi}]")]
    RatioOutsideInterval { ratio: f64, lo: f64, hi: f64 },

    #[error("no feasible allocation for mean {0}")]
    NoFeasibleAllocation(f64),

    #[error("cap {cap} is below the mean photon number {n_bar}")]
    CapBelowMean { cap: u32, n_bar: f64 },

    #[error("cap {cap} is below the highest occupied Fock level {max_level}")]
    CapBelowSupport { cap: u32, max_level: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
