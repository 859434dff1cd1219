//! Equal-probability, equal-moment splitting of a feasible distribution.
//!
//! Every feasible `p` is cut into groups, one per occupied grid point
//! `x[m+j]` above the pivot `x[m] <= n_bar / p_bar < x[m+1]`. Group `j` takes
//! a fixed share `c_j` of every lower-region weight plus all of `p(x[m+j])`,
//! with
//!
//! ```text
//! c_j = (x[m+j] - x[m]) p(x[m+j]) / Σ_k (x[m+k] - x[m]) p(x[m+k])
//! ```
//!
//! Each group has the same probability and the same first moment as the
//! matching group of the interior two-point distribution, which is what makes
//! the sandwich inequalities hold term by term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::{MomentProblem, Pivot, WeightedDistribution};

/// One group of a [`SplitFamily`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitGroup {
    /// The upper-region point `x[m+j]`.
    pub upper_x: f64,
    /// `p(x[m+j])`, carried whole by this group.
    pub upper_weight: f64,
    /// `c_j`.
    pub share: f64,
    /// `c_j · p(x_i)` over the lower region.
    pub lower: WeightedDistribution,
    /// The matching part of the interior distribution: weight on `x[m]`.
    pub pivot_low_weight: f64,
    /// The matching part of the interior distribution: weight on `x[m+1]`.
    /// Zero when `n_bar / p_bar` is a grid point.
    pub pivot_high_weight: f64,
    /// `c_j (n_bar - x[m] p_bar)`.
    pub moment_share: f64,
}

impl SplitGroup {
    /// Probability carried by this group of `p`.
    pub fn probability(&self) -> f64 {
        self.lower.total() + self.upper_weight
    }

    /// First moment carried by this group of `p`.
    pub fn moment(&self) -> f64 {
        self.lower.first_moment() + self.upper_x * self.upper_weight
    }

    /// Probability of the matching interior group.
    pub fn budget(&self) -> f64 {
        self.pivot_low_weight + self.pivot_high_weight
    }
}

/// Decomposition of a feasible distribution relative to the interior pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitFamily {
    /// Index `m` of the pivot grid point.
    pub pivot_index: usize,
    /// `(x[m], x[m+1])`.
    pub pivot: (f64, f64),
    /// `true` when `n_bar / p_bar` equals `x[m]`.
    pub exact_pivot: bool,
    /// Groups for occupied upper points, in increasing `x`.
    pub groups: Vec<SplitGroup>,
    /// Weight `p(x[m])` kept aside as its own group when the pivot is exact.
    pub pivot_group: f64,
}

impl SplitFamily {
    /// `|probability - budget|` for every group.
    pub fn probability_residuals(&self) -> Vec<f64> {
        self.groups.iter().map(|g| (g.probability() - g.budget()).abs()).collect()
    }

    /// `|moment - interior moment|` for every group.
    pub fn moment_residuals(&self) -> Vec<f64> {
        let (lo, hi) = self.pivot;
        self.groups.iter().map(|g| (g.moment() - (lo * g.pivot_low_weight + hi * g.pivot_high_weight)).abs()).collect()
    }

    /// Largest identity residual over all groups.
    pub fn max_residual(&self) -> f64 {
        self.probability_residuals().into_iter().chain(self.moment_residuals()).fold(0.0, f64::max)
    }

    /// Sum of all groups, which recovers the split distribution.
    pub fn reassemble(&self) -> WeightedDistribution {
        let mut d = WeightedDistribution::point_mass(self.pivot.0, self.pivot_group);
        for g in &self.groups {
            d.merge(&g.lower);
            d.merge(&WeightedDistribution::point_mass(g.upper_x, g.upper_weight));
        }
        d
    }
}

/// Split `p`, which must be feasible for `problem` and supported on its grid.
pub fn split_distribution(p: &WeightedDistribution, problem: &MomentProblem) -> Result<SplitFamily> {
    let grid = problem.grid();
    if let Some(pt) = p.points().iter().find(|pt| grid.binary_search_by(|g| g.total_cmp(&pt.x)).is_err()) {
        return Err(Error::OutOfDomain(pt.x));
    }
    let (p_bar, n_bar) = (problem.p_bar(), problem.n_bar());
    let (total, first) = (p.total(), p.first_moment());
    let scale = n_bar.abs().max(1.0);
    if (total - p_bar).abs() > 1e-9 || (first - n_bar).abs() > 1e-9 * scale {
        return Err(Error::InvalidParameter(format!(
            "distribution has moments ({total}, {first}), problem requires ({p_bar}, {n_bar})"
        )));
    }

    let (m, exact) = match problem.pivot() {
        Pivot::OnGrid(m) => (m, true),
        Pivot::Between(m) => (m, false),
    };
    if m + 1 >= grid.len() {
        return Err(Error::DegenerateSplit);
    }
    let (xm, xm1) = (grid[m], grid[m + 1]);
    let gap = xm1 - xm;

    let upper: Vec<(f64, f64)> = p.iter().filter(|&(x, _)| x > xm).collect();
    let lower: Vec<(f64, f64)> = p.iter().filter(|&(x, _)| if exact { x < xm } else { x <= xm }).collect();
    let s: f64 = upper.iter().map(|&(x, w)| (x - xm) * w).sum();
    let pivot_group = if exact { p.weight_at(xm) } else { 0.0 };

    if s == 0.0 {
        if exact {
            // all mass already sits on the pivot
            return Ok(SplitFamily {
                pivot_index: m,
                pivot: (xm, xm1),
                exact_pivot: true,
                groups: Vec::new(),
                pivot_group,
            });
        }
        return Err(Error::DegenerateSplit);
    }

    let excess = if exact { 0.0 } else { n_bar - xm * p_bar };
    let lower_total: f64 = lower.iter().map(|&(_, w)| w).sum();
    let groups = upper
        .iter()
        .map(|&(x, w)| {
            let c = (x - xm) * w / s;
            let mut part = WeightedDistribution::new();
            for &(xi, wi) in &lower {
                // weights of a valid distribution are finite and nonnegative
                let _ = part.add(xi, c * wi);
            }
            let moment_share = c * excess;
            SplitGroup {
                upper_x: x,
                upper_weight: w,
                share: c,
                lower: part,
                pivot_low_weight: c * (lower_total - excess / gap) + w,
                pivot_high_weight: moment_share / gap,
                moment_share,
            }
        })
        .collect();
    Ok(SplitFamily { pivot_index: m, pivot: (xm, xm1), exact_pivot: exact, groups, pivot_group })
}
