//! Independent checks by vertex enumeration.
//!
//! The feasible set `{w >= 0 : Σ w = p_bar, Σ x w = n_bar}` is a polytope cut
//! by two equality constraints, so each vertex has at most two support points.
//! A linear objective attains its extremes at vertices, which makes
//! enumeration exact for every objective, monotone or not.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::objective::Objective;
use crate::problem::{Direction, MomentProblem, WeightedDistribution, BOUNDARY_RTOL};

/// Pairs closer than this are skipped.
const MIN_GAP: f64 = 1e-12;

/// Outcome of [`lp_extremal`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub best_value: f64,
    /// At most two `(x, weight)` pairs.
    pub best_support: WeightedDistribution,
    pub candidates_examined: usize,
}

/// A polytope vertex as `(i, w_i, j, w_j)` grid indices; singletons repeat the index.
#[derive(Debug, Clone, Copy)]
struct Vertex {
    i: usize,
    wi: f64,
    j: usize,
    wj: f64,
}

impl Vertex {
    fn support(&self, grid: &[f64]) -> WeightedDistribution {
        let mut d = WeightedDistribution::point_mass(grid[self.i], self.wi);
        if self.j != self.i {
            d.merge(&WeightedDistribution::point_mass(grid[self.j], self.wj));
        }
        d
    }

    fn key(&self) -> (usize, usize) {
        (self.i, self.j)
    }
}

/// Enumerate vertices, calling `visit` on each feasible one. Returns the
/// number of candidates examined.
fn for_each_vertex(problem: &MomentProblem, mut visit: impl FnMut(Vertex)) -> usize {
    let grid = problem.grid();
    let (p, n) = (problem.p_bar(), problem.n_bar());
    let tol = BOUNDARY_RTOL * n.abs().max(grid[grid.len() - 1].abs() * p).max(1.0);
    let mut examined = 0;
    for (i, &x) in grid.iter().enumerate() {
        if (x * p - n).abs() <= tol {
            examined += 1;
            visit(Vertex { i, wi: p, j: i, wj: 0.0 });
        }
    }
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            examined += 1;
            let gap = grid[j] - grid[i];
            if gap < MIN_GAP {
                continue;
            }
            let wi = (grid[j] * p - n) / gap;
            let wj = (n - grid[i] * p) / gap;
            if wi < -tol / gap || wj < -tol / gap {
                continue;
            }
            visit(Vertex { i, wi: wi.max(0.0), j, wj: wj.max(0.0) });
        }
    }
    examined
}

/// Extremal expectation of `obj` by enumerating every vertex of the moment
/// polytope. Ties resolve to the lexicographically smallest support.
pub fn lp_extremal(problem: &MomentProblem, obj: &Objective, direction: Direction) -> Result<OracleReport> {
    let values = obj.values_on(problem.grid())?;
    let mut best: Option<(f64, Vertex)> = None;
    let examined = for_each_vertex(problem, |v| {
        let value = v.wi * values[v.i] + if v.j != v.i { v.wj * values[v.j] } else { 0.0 };
        let replace = match best {
            None => true,
            Some((b, bv)) => direction.better(value, b) || (value == b && v.key() < bv.key()),
        };
        if replace {
            best = Some((value, v));
        }
    });
    // a validated problem always has at least one vertex
    let (best_value, vertex) = best.expect("feasible problem has a vertex");
    Ok(OracleReport { best_value, best_support: vertex.support(problem.grid()), candidates_examined: examined })
}

/// A seeded random feasible distribution: a random convex combination of
/// between 3 and `K` distinct polytope vertices.
pub fn random_feasible(problem: &MomentProblem, seed: u64) -> WeightedDistribution {
    let mut vertices = Vec::new();
    for_each_vertex(problem, |v| vertices.push(v));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = problem.len().max(3);
    let count = rng.random_range(3..=k).min(vertices.len());
    let chosen = sample(&mut rng, vertices.len(), count);
    let mix: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + f64::MIN_POSITIVE).collect();
    let total: f64 = mix.iter().sum();
    let grid = problem.grid();
    let mut d = WeightedDistribution::new();
    for (idx, m) in chosen.iter().zip(&mix) {
        d.merge(&vertices[idx].support(grid).scaled(m / total));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(lo: i32, hi: i32) -> Vec<f64> {
        (lo..=hi).map(f64::from).collect()
    }

    #[test]
    fn square_on_three_points() {
        let p = MomentProblem::new(range(0, 2), 1.0, 1.0).unwrap();
        let sq = Objective::power(2.0);
        let max = lp_extremal(&p, &sq, Direction::Max).unwrap();
        assert_eq!(max.best_value, 2.0);
        assert_eq!(max.best_support.weight_at(0.0), 0.5);
        assert_eq!(max.best_support.weight_at(2.0), 0.5);
        assert_eq!(max.candidates_examined, 3 + 1);
        let min = lp_extremal(&p, &sq, Direction::Min).unwrap();
        assert_eq!(min.best_value, 1.0);
        assert_eq!(min.best_support.len(), 1);
    }

    #[test]
    fn concave_root_on_squares() {
        let grid = vec![0.0, 1.0, 4.0, 9.0];
        let root = Objective::tabulate(&grid, f64::sqrt).unwrap();
        let p = MomentProblem::new(grid, 1.0, 4.0).unwrap();
        let max = lp_extremal(&p, &root, Direction::Max).unwrap();
        assert_eq!(max.best_value, 2.0);
        assert_eq!(max.best_support.weight_at(4.0), 1.0);
    }

    #[test]
    fn candidate_count_without_singleton() {
        let p = MomentProblem::new(range(0, 9), 0.7, 2.0).unwrap();
        let r = lp_extremal(&p, &Objective::power(3.0), Direction::Max).unwrap();
        assert_eq!(r.candidates_examined, 45);
    }

    #[test]
    fn sampler_is_feasible_and_deterministic() {
        let p = MomentProblem::new(vec![0.0, 0.5, 2.0, 3.5, 7.0], 0.6, 1.3).unwrap();
        for seed in 0..50 {
            let d = random_feasible(&p, seed);
            assert!((d.total() - 0.6).abs() < 1e-14);
            assert!((d.first_moment() - 1.3).abs() < 1e-14);
            assert!(d.is_on_grid(p.grid()));
            assert_eq!(d, random_feasible(&p, seed));
        }
        assert_ne!(random_feasible(&p, 1), random_feasible(&p, 2));
    }

    #[test]
    fn sampler_spreads_support() {
        let p = MomentProblem::new(range(0, 20), 1.0, 7.0).unwrap();
        let wide = (0..1000).filter(|&s| random_feasible(&p, s).len() >= 3).count();
        assert!(wide >= 900, "{wide}");
    }

    #[test]
    fn sampler_on_forced_point_mass() {
        let p = MomentProblem::new(range(0, 4), 1.0, 4.0).unwrap();
        let d = random_feasible(&p, 9);
        assert_eq!(d.len(), 1);
        assert_eq!(d.weight_at(4.0), 1.0);
    }
}
