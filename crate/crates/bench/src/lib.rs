//! Fixtures shared by the criterion benchmarks.

use extremal_core::{MomentProblem, Objective};

/// Evenly spaced grid `0, 1, ..., k - 1` with a mean at 40% of the range.
pub fn line_problem(k: usize, p_bar: f64) -> MomentProblem {
    let grid: Vec<f64> = (0..k).map(|i| i as f64).collect();
    let n_bar = 0.4 * (k - 1) as f64 * p_bar;
    MomentProblem::new(grid, p_bar, n_bar).expect("feasible by construction")
}

/// Concave table `sqrt(x + 1)` on the problem's grid.
pub fn concave_table(problem: &MomentProblem) -> Objective {
    Objective::tabulate(problem.grid(), |x| (x + 1.0).sqrt()).expect("finite values")
}

/// Table alternating curvature every few points.
pub fn wavy_table(problem: &MomentProblem, period: f64) -> Objective {
    Objective::tabulate(problem.grid(), |x| (x / period).sin() + 0.01 * x).expect("finite values")
}
