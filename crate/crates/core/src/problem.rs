//! Domain types shared by every solver: the moment problem, sparse weighted
//! distributions, and extremal results.
//!
//! The first moment `n_bar` is the un-normalized sum `Σ x·p(x)`, so a problem
//! with budget `p_bar < 1` has conditional mean `n_bar / p_bar`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;

/// Relative slack allowed when checking the feasibility boundary and when
/// matching `n_bar / p_bar` against a grid point.
pub(crate) const BOUNDARY_RTOL: f64 = 1e-12;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Max,
    Min,
}

impl Direction {
    /// `true` if `a` is strictly better than `b` in this direction.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Max => a > b,
            Direction::Min => a < b,
        }
    }

    /// Sign that turns this direction into a maximization.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Max => 1.0,
            Direction::Min => -1.0,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Direction::Max),
            "min" => Ok(Direction::Min),
            other => Err(Error::InvalidParameter(format!("direction must be \"max\" or \"min\", got {other:?}"))),
        }
    }
}

/// A validated moment problem: support grid, probability budget and first moment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentProblem {
    grid: Vec<f64>,
    p_bar: f64,
    n_bar: f64,
}

/// Position of `n_bar / p_bar` on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Pivot {
    /// The ratio coincides with grid point `m`.
    OnGrid(usize),
    /// `grid[m] < ratio < grid[m + 1]`.
    Between(usize),
}

impl MomentProblem {
    /// Validate a grid, budget and first moment.
    ///
    /// The feasibility boundary `n_bar = x_1 p_bar` (or `x_K p_bar`) is accepted and
    /// forces a point mass. Duplicate grid points are rejected rather than merged.
    pub fn new(grid: Vec<f64>, p_bar: f64, n_bar: f64) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (i, w) in grid.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotonicGrid { index: i + 1 });
            }
        }
        if let Some(i) = grid.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonMonotonicGrid { index: i });
        }
        if !(p_bar > 0.0 && p_bar <= 1.0) {
            return Err(Error::BudgetOutOfRange(p_bar));
        }
        let lo = grid[0] * p_bar;
        let hi = grid[grid.len() - 1] * p_bar;
        let slack = BOUNDARY_RTOL * lo.abs().max(hi.abs()).max(1.0);
        if !n_bar.is_finite() || n_bar < lo - slack || n_bar > hi + slack {
            return Err(Error::InfeasibleMean { n_bar, lo, hi });
        }
        Ok(MomentProblem { grid, p_bar, n_bar })
    }

    /// Re-run validation on an existing problem.
    pub fn validate(&self) -> Result<Self> {
        MomentProblem::new(self.grid.clone(), self.p_bar, self.n_bar)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn p_bar(&self) -> f64 {
        self.p_bar
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    /// Conditional mean `n_bar / p_bar`.
    pub fn ratio(&self) -> f64 {
        self.n_bar / self.p_bar
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub(crate) fn pivot(&self) -> Pivot {
        locate_pivot(&self.grid, self.p_bar, self.n_bar)
    }
}

/// Locate `n_bar / p_bar` on a strictly increasing, nonempty grid.
pub(crate) fn locate_pivot(grid: &[f64], p_bar: f64, n_bar: f64) -> Pivot {
    let k = grid.len();
    let ratio = n_bar / p_bar;
    // first index with grid[i] > ratio
    let upper = grid.partition_point(|&x| x <= ratio);
    let near = |i: usize| {
        (n_bar - grid[i] * p_bar).abs() <= BOUNDARY_RTOL * n_bar.abs().max((grid[i] * p_bar).abs()).max(1e-300)
    };
    if upper == 0 {
        return Pivot::OnGrid(0);
    }
    if upper >= k {
        return Pivot::OnGrid(k - 1);
    }
    let m = upper - 1;
    if near(m) {
        Pivot::OnGrid(m)
    } else if near(m + 1) {
        Pivot::OnGrid(m + 1)
    } else {
        Pivot::Between(m)
    }
}

/// One support point of a [`WeightedDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub weight: f64,
}

/// Sparse nonnegative weights on real support points, kept sorted by `x`.
/// Zero weights are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct WeightedDistribution {
    points: Vec<Point>,
}

impl WeightedDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(x, weight)` pairs, merging repeated points.
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self> {
        let mut d = Self::new();
        for (x, w) in pairs {
            d.add(x, w)?;
        }
        Ok(d)
    }

    /// Point mass of weight `w` at `x`.
    pub fn point_mass(x: f64, w: f64) -> Self {
        let mut d = Self::new();
        if w > 0.0 {
            d.points.push(Point { x, weight: w });
        }
        d
    }

    /// Add `w` to the weight at `x`.
    pub fn add(&mut self, x: f64, w: f64) -> Result<()> {
        if !x.is_finite() || !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeight { x, weight: w });
        }
        if w == 0.0 {
            return Ok(());
        }
        match self.points.binary_search_by(|p| p.x.total_cmp(&x)) {
            Ok(i) => self.points[i].weight += w,
            Err(i) => self.points.insert(i, Point { x, weight: w }),
        }
        Ok(())
    }

    /// Add every point of `other`.
    pub fn merge(&mut self, other: &WeightedDistribution) {
        for p in &other.points {
            // weights in `other` are already validated
            let _ = self.add(p.x, p.weight);
        }
    }

    /// Multiply every weight by `c >= 0`.
    pub fn scaled(&self, c: f64) -> WeightedDistribution {
        let points = self.points.iter().filter(|_| c > 0.0).map(|p| Point { x: p.x, weight: p.weight * c }).collect();
        WeightedDistribution { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().map(|p| (p.x, p.weight))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Weight stored at exactly `x` (zero if absent).
    pub fn weight_at(&self, x: f64) -> f64 {
        self.points.binary_search_by(|p| p.x.total_cmp(&x)).map(|i| self.points[i].weight).unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.weight).sum()
    }

    /// Un-normalized first moment `Σ x·w`.
    pub fn first_moment(&self) -> f64 {
        self.points.iter().map(|p| p.x * p.weight).sum()
    }

    /// `Σ w·F(x)` for the given objective.
    pub fn expectation(&self, objective: &Objective) -> Result<f64> {
        let mut acc = 0.0;
        for p in &self.points {
            acc += p.weight * objective.evaluate(p.x)?;
        }
        Ok(acc)
    }

    /// `true` if every support point is one of `grid`'s points.
    pub fn is_on_grid(&self, grid: &[f64]) -> bool {
        self.points.iter().all(|p| grid.binary_search_by(|g| g.total_cmp(&p.x)).is_ok())
    }
}

/// Total probability and un-normalized first moment of a distribution.
pub fn moments(dist: &WeightedDistribution) -> Result<(f64, f64)> {
    if dist.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok((dist.total(), dist.first_moment()))
}

/// Which construction produced an extremal distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Adjacent grid pair straddling `n_bar / p_bar`.
    InteriorTwoPoint,
    /// Mass on the two extreme grid points.
    EndpointTwoPoint,
    /// Forced or degenerate point mass.
    Singleton,
    /// Segmented solve over several slope-monotone intervals.
    Segmented,
}

/// An extremal distribution together with its objective value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub distribution: WeightedDistribution,
    pub value: f64,
    pub branch: Branch,
    pub direction: Direction,
}
