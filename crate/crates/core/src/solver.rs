//! Closed-form extremal distributions for slope-monotone objectives.

use crate::error::{Error, Result};
use crate::objective::{classify_slope, Objective, SlopeClass};
use crate::problem::{locate_pivot, Branch, Direction, ExtremalResult, MomentProblem, Pivot, WeightedDistribution};

/// Weights on `(a, b)` with total `p` and first moment `n`, `a < b`.
/// Rounding residue below zero is clamped.
pub(crate) fn pair_weights(a: f64, b: f64, p: f64, n: f64) -> (f64, f64) {
    let d = b - a;
    (((b * p - n) / d).max(0.0), ((n - a * p) / d).max(0.0))
}

fn pair(a: f64, b: f64, p: f64, n: f64) -> WeightedDistribution {
    let (wa, wb) = pair_weights(a, b, p, n);
    let mut d = WeightedDistribution::point_mass(a, wa);
    d.merge(&WeightedDistribution::point_mass(b, wb));
    d
}

/// Adjacent-pair distribution on `grid` for budget `p` and moment `n`.
/// `grid` must be strictly increasing and `n / p` inside its range.
pub(crate) fn interior_on(grid: &[f64], p: f64, n: f64) -> WeightedDistribution {
    match locate_pivot(grid, p, n) {
        Pivot::OnGrid(m) => WeightedDistribution::point_mass(grid[m], p),
        Pivot::Between(m) => pair(grid[m], grid[m + 1], p, n),
    }
}

/// Extreme-point distribution on `lo < hi` for budget `p` and moment `n`.
pub(crate) fn endpoint_on(lo: f64, hi: f64, p: f64, n: f64) -> WeightedDistribution {
    if hi > lo {
        pair(lo, hi, p, n)
    } else {
        WeightedDistribution::point_mass(lo, p)
    }
}

/// Mass on the adjacent grid pair straddling `n_bar / p_bar`, or a point mass
/// when the ratio is itself a grid point.
pub fn interior_two_point(problem: &MomentProblem) -> WeightedDistribution {
    interior_on(problem.grid(), problem.p_bar(), problem.n_bar())
}

/// Mass on the two extreme grid points.
pub fn endpoint_two_point(problem: &MomentProblem) -> WeightedDistribution {
    let g = problem.grid();
    endpoint_on(g[0], g[g.len() - 1], problem.p_bar(), problem.n_bar())
}

/// Extremal expectation for an objective whose average slope is monotone on
/// the grid.
pub fn extremal_expectation(problem: &MomentProblem, obj: &Objective, direction: Direction) -> Result<ExtremalResult> {
    let class = classify_slope(obj, problem.grid())?;
    let interior = match (&class, direction) {
        (SlopeClass::Mixed { .. }, _) => return Err(Error::MixedSlopeRequiresSegmentation),
        (SlopeClass::DecreasingSlope, Direction::Max) | (SlopeClass::IncreasingSlope, Direction::Min) => true,
        _ => false,
    };
    let distribution = if interior { interior_two_point(problem) } else { endpoint_two_point(problem) };
    let value = distribution.expectation(obj)?;
    let branch = match (distribution.len(), interior) {
        (1, _) => Branch::Singleton,
        (_, true) => Branch::InteriorTwoPoint,
        (_, false) => Branch::EndpointTwoPoint,
    };
    Ok(ExtremalResult { distribution, value, branch, direction })
}

/// Number-state pair around `n_bar`: weight `1 - frac` at `floor(n_bar)` and
/// `frac` at the next integer, or a point mass when `n_bar` is an integer.
pub fn adjacent_fock_distribution(n_bar: f64) -> Result<WeightedDistribution> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::NegativeMean(n_bar));
    }
    let floor = n_bar.floor();
    let frac = n_bar - floor;
    let mut d = WeightedDistribution::point_mass(floor, 1.0 - frac);
    d.merge(&WeightedDistribution::point_mass(floor + 1.0, frac));
    Ok(d)
}
