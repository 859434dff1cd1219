//! Extremal expectations of an objective `F(x)` over distributions on a finite
//! grid with a fixed total probability and a fixed first moment.
//!
//! For slope-monotone objectives the optimum is one of two closed-form
//! two-point distributions ([`interior_two_point`], [`endpoint_two_point`]).
//! Non-monotone objectives are split into alternating convex and concave
//! intervals by [`segment`]. [`oracle`] is an independent vertex-enumeration
//! check, and [`quantum`] holds the interferometry and cavity applications.

#![forbid(unsafe_code)]
// `!(a < b)` rejects NaN along with the ordinary failure
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod objective;
pub mod oracle;
pub mod problem;
pub mod quantum;
pub mod segment;
pub mod solver;
pub mod split;

pub use error::{Error, Result};
pub use expr::{eval_expr, parse, Expr, ParseError, ParseErrorKind};
pub use objective::{
    classify_slope, classify_slope_with_tol, find_inflections, Builtin, InflectionMode, Objective, Slope, SlopeClass,
    Table, SLOPE_TOL,
};
pub use oracle::{lp_extremal, random_feasible, OracleReport};
pub use problem::{moments, Branch, Direction, ExtremalResult, MomentProblem, Point, WeightedDistribution};
pub use segment::{
    allocate_optimize, allocation_value, assemble, inner_extremal, segment_domain, Allocation, AllocationOptions,
    AllocationResult, InnerResult, InteriorMode, Interval, OptimizerTrace, SegmentPlan,
};
pub use solver::{adjacent_fock_distribution, endpoint_two_point, extremal_expectation, interior_two_point};
pub use split::{split_distribution, SplitFamily, SplitGroup};
