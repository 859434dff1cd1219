#![allow(dead_code)]

use extremal_core::{Direction, MomentProblem, Objective, Slope};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Strictly increasing grid of `k` points with random gaps.
pub fn random_grid(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let mut x = rng.random_range(-10.0..10.0);
    let mut grid = Vec::with_capacity(k);
    for _ in 0..k {
        grid.push(x);
        x += rng.random_range(0.05..3.0);
    }
    grid
}

/// Random feasible problem on a grid of 2 to `max_k` points.
pub fn random_problem(rng: &mut ChaCha8Rng, max_k: usize) -> MomentProblem {
    let k = rng.random_range(2..=max_k);
    let grid = random_grid(rng, k);
    let p_bar = rng.random_range(0.01..=1.0);
    // sometimes put the ratio exactly on a grid point
    let ratio = if rng.random_range(0..4) == 0 {
        grid[rng.random_range(0..k)]
    } else {
        rng.random_range(grid[0]..=grid[k - 1])
    };
    MomentProblem::new(grid, p_bar, ratio * p_bar).unwrap()
}

/// Tabulated objective whose chord slopes strictly increase (convex) or
/// strictly decrease (concave).
pub fn random_monotone_table(rng: &mut ChaCha8Rng, grid: &[f64], slope: Slope) -> Objective {
    let mut s = rng.random_range(-5.0..5.0);
    let mut values = vec![rng.random_range(-3.0..3.0)];
    for w in grid.windows(2) {
        let last = values[values.len() - 1];
        values.push(last + s * (w[1] - w[0]));
        s += rng.random_range(0.01..2.0);
    }
    if slope == Slope::Decreasing {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    Objective::tabulated(grid.to_vec(), values).unwrap()
}

/// Random table with no curvature constraint.
pub fn random_table(rng: &mut ChaCha8Rng, grid: &[f64]) -> Objective {
    let values = grid.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    Objective::tabulated(grid.to_vec(), values).unwrap()
}

pub fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    if rng.random::<bool>() {
        Direction::Max
    } else {
        Direction::Min
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
