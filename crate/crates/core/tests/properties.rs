mod common;

use common::rel_err;
use extremal_core::quantum::{mzi_gap_to_optimal, mzi_noon_gap, mzi_optimal_state, PathSymmetricState};
use extremal_core::*;
use proptest::prelude::*;

/// Grid, budget and a mean expressed as a fraction of the feasible range.
fn problem() -> impl Strategy<Value = MomentProblem> {
    (prop::collection::vec(0.05f64..3.0, 1..40), -10.0f64..10.0, 0.01f64..=1.0, 0.0f64..=1.0).prop_map(
        |(gaps, start, p_bar, t)| {
            let mut grid = vec![start];
            for g in gaps {
                grid.push(grid[grid.len() - 1] + g);
            }
            let (lo, hi) = (grid[0], grid[grid.len() - 1]);
            let ratio = (lo + t * (hi - lo)).clamp(lo, hi);
            MomentProblem::new(grid, p_bar, ratio * p_bar).unwrap()
        },
    )
}

/// Chord-slope increments for a convex table on `k` points.
fn convex_values(k: usize) -> impl Strategy<Value = (f64, f64, Vec<f64>)> {
    (-2.0f64..2.0, -5.0f64..5.0, prop::collection::vec(0.01f64..2.0, k))
}

fn table(grid: &[f64], (v0, s0, bumps): &(f64, f64, Vec<f64>), concave: bool) -> Objective {
    let mut s = *s0;
    let mut values = vec![*v0];
    for (w, b) in grid.windows(2).zip(bumps) {
        let last = values[values.len() - 1];
        values.push(last + s * (w[1] - w[0]));
        s += b;
    }
    if concave {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    Objective::tabulated(grid.to_vec(), values).unwrap()
}

fn problem_and_table() -> impl Strategy<Value = (MomentProblem, Objective, bool)> {
    (problem(), any::<bool>()).prop_flat_map(|(p, concave)| {
        let k = p.len();
        (Just(p), convex_values(k), Just(concave)).prop_map(|(p, vals, concave)| {
            let obj = table(p.grid(), &vals, concave);
            (p, obj, concave)
        })
    })
}

fn direction() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Max), Just(Direction::Min)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn solver_matches_oracle((p, obj, _) in problem_and_table(), dir in direction()) {
        let s = extremal_expectation(&p, &obj, dir).unwrap();
        let o = lp_extremal(&p, &obj, dir).unwrap();
        prop_assert!(rel_err(s.value, o.best_value) <= 1e-10, "solver {} oracle {}", s.value, o.best_value);
    }

    #[test]
    fn extremal_distributions_are_feasible((p, obj, _) in problem_and_table(), dir in direction()) {
        let s = extremal_expectation(&p, &obj, dir).unwrap();
        let d = &s.distribution;
        prop_assert!(d.len() <= 2);
        prop_assert!(d.is_on_grid(p.grid()));
        prop_assert!((d.total() - p.p_bar()).abs() <= 1e-12);
        prop_assert!(rel_err(d.first_moment(), p.n_bar()) <= 1e-12);
    }

    #[test]
    fn sandwich((p, obj, concave) in problem_and_table(), seed in any::<u64>()) {
        let e = random_feasible(&p, seed).expectation(&obj).unwrap();
        let e1 = interior_two_point(&p).expectation(&obj).unwrap();
        let e2 = endpoint_two_point(&p).expectation(&obj).unwrap();
        let tol = 1e-10 * e.abs().max(e1.abs()).max(e2.abs()).max(1.0);
        if concave {
            prop_assert!(e1 >= e - tol && e >= e2 - tol, "{e1} >= {e} >= {e2}");
        } else {
            prop_assert!(e1 <= e + tol && e <= e2 + tol, "{e1} <= {e} <= {e2}");
        }
    }

    #[test]
    fn affine_maps_preserve_argmax(
        (p, obj, _) in problem_and_table(),
        dir in direction(),
        c in 0.1f64..10.0,
        b in -10.0f64..10.0,
    ) {
        let moved = obj.affine_on(p.grid(), c, b).unwrap();
        prop_assert_eq!(classify_slope(&obj, p.grid()).unwrap(), classify_slope(&moved, p.grid()).unwrap());
        let r = extremal_expectation(&p, &obj, dir).unwrap();
        let m = extremal_expectation(&p, &moved, dir).unwrap();
        prop_assert_eq!(&r.distribution, &m.distribution);
        let want = c * r.value + b * p.p_bar();
        prop_assert!((m.value - want).abs() <= 1e-10 * want.abs().max(1.0), "{} vs {}", m.value, want);
    }

    #[test]
    fn random_feasible_is_feasible(p in problem(), seed in any::<u64>()) {
        let d = random_feasible(&p, seed);
        prop_assert!(d.is_on_grid(p.grid()));
        prop_assert!(d.iter().all(|(_, w)| w >= 0.0));
        prop_assert!((d.total() - p.p_bar()).abs() <= 1e-12);
        prop_assert!((d.first_moment() - p.n_bar()).abs() <= 1e-10 * p.n_bar().abs().max(1.0));
    }

    #[test]
    fn split_reassembles(p in problem(), seed in any::<u64>()) {
        prop_assume!(p.ratio() < p.grid()[p.len() - 1]);
        let d = random_feasible(&p, seed);
        let f = split_distribution(&d, &p).unwrap();
        prop_assert!(f.max_residual() <= 1e-12, "residual {}", f.max_residual());
        let budgets: f64 = f.groups.iter().map(|g| g.budget()).sum::<f64>() + f.pivot_group;
        prop_assert!((budgets - p.p_bar()).abs() <= 1e-12);
        let back = f.reassemble();
        for (x, w) in d.iter() {
            prop_assert!((back.weight_at(x) - w).abs() <= 1e-12);
        }
    }

    #[test]
    fn adjacent_fock_mean(n in 0.0f64..500.0) {
        let d = adjacent_fock_distribution(n).unwrap();
        prop_assert_eq!(d.total(), 1.0);
        prop_assert!((d.first_moment() - n).abs() <= 1e-12 * n.max(1.0));
        prop_assert!(d.len() <= 2);
    }

    #[test]
    fn noon_and_oi_bracket_random_states(
        levels in prop::collection::btree_map(0u32..60, 0.001f64..1.0, 1..8),
        extra in 0u32..30,
    ) {
        prop_assume!(levels.keys().any(|&n| n > 0));
        let total: f64 = levels.values().sum();
        let s = PathSymmetricState::from_levels(levels.iter().map(|(&n, &w)| (n, w / total))).unwrap();
        prop_assert!(mzi_noon_gap(&s) <= 1e-10);
        let cap = s.max_level().max(s.n_bar_total().ceil() as u32) + extra;
        prop_assert!(mzi_gap_to_optimal(&s, cap).unwrap() >= -1e-10);
    }

    #[test]
    fn oi_crb_falls_with_cap(n in 0.5f64..20.0, cap in 20u32..200) {
        let (_, a) = mzi_optimal_state(n, cap).unwrap();
        let (_, b) = mzi_optimal_state(n, cap + 1).unwrap();
        prop_assert!(b.crb < a.crb);
        prop_assert!(rel_err(a.n_bar, n) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn segmented_beats_random_allocations(
        values in prop::collection::vec(-1.0f64..1.0, 4..14),
        p_bar in 0.1f64..=1.0,
        t in 0.0f64..=1.0,
        dir in direction(),
        seeds in prop::collection::vec(any::<u64>(), 20),
    ) {
        let grid: Vec<f64> = (0..values.len()).map(|i| i as f64).collect();
        let obj = Objective::tabulated(grid.clone(), values).unwrap();
        let n_bar = t * grid[grid.len() - 1] * p_bar;
        let p = MomentProblem::new(grid.clone(), p_bar, n_bar).unwrap();
        let plan = segment_domain(&obj, grid[0], grid[grid.len() - 1], InflectionMode::Discrete(&grid)).unwrap();
        let r = allocate_optimize(&plan, p_bar, n_bar, dir, &AllocationOptions::default()).unwrap();
        prop_assert!((r.distribution.total() - p_bar).abs() <= 1e-12);
        prop_assert!((r.distribution.first_moment() - n_bar).abs() <= 1e-9);
        for seed in seeds {
            let other = random_feasible(&p, seed).expectation(&obj).unwrap();
            let tol = 1e-10 * other.abs().max(1.0);
            prop_assert!(!dir.better(other - dir.sign() * tol, r.value), "random {other} beats {}", r.value);
        }
    }
}
