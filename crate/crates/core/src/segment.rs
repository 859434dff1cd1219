//! Segmented extremal expectations for objectives whose average slope is not
//! monotone.
//!
//! The domain is cut at inflection points into intervals that are alternately
//! convex and concave. Inside each interval the closed-form rule applies, so
//! the whole problem reduces to choosing how much probability `p_i` and first
//! moment `n_i` each interval receives, subject to
//!
//! ```text
//! Σ p_i = p_bar,   Σ n_i = n_bar,   lo_i p_i <= n_i <= hi_i p_i
//! ```
//!
//! That outer problem is solved derivative-free: a coarse sweep over the free
//! allocation variables, compass refinement from the best sweep points, and,
//! on discrete supports, an exact two-point boundary step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{
    find_inflections, second_derivative, slope_profile, InflectionMode, Objective, Slope, SlopeClass, SLOPE_TOL,
};
use crate::problem::{locate_pivot, Direction, Pivot, WeightedDistribution};
use crate::solver::{endpoint_on, interior_on, pair_weights};

/// Relative slack on the interval-chain constraints.
const CHAIN_RTOL: f64 = 1e-12;

/// Allocations whose values differ by less than this are ties.
const TIE_RTOL: f64 = 1e-12;

/// Above this many free variables the compass only moves along axes.
const DIAGONAL_DIMS: usize = 8;

const SWEEP_SEED: u64 = 0x5eed_5eed;

/// A slope-monotone piece of the domain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub slope: Slope,
    /// Discrete support points inside `[lo, hi]`, if the problem lives on a grid.
    pub support: Option<Vec<f64>>,
}

impl Interval {
    /// Range a fragment can actually occupy: the outermost support points on
    /// a grid, `[lo, hi]` otherwise.
    pub fn bounds(&self) -> (f64, f64) {
        match &self.support {
            Some(s) => (s[0], s[s.len() - 1]),
            None => (self.lo, self.hi),
        }
    }

    pub fn class(&self) -> SlopeClass {
        match self.slope {
            Slope::Increasing => SlopeClass::IncreasingSlope,
            Slope::Decreasing => SlopeClass::DecreasingSlope,
        }
    }

    /// `true` if the adjacent-pair rule applies in this direction, `false`
    /// for the endpoint mixture.
    pub fn uses_interior(&self, direction: Direction) -> bool {
        matches!((self.slope, direction), (Slope::Decreasing, Direction::Max) | (Slope::Increasing, Direction::Min))
    }
}

/// Intervals of a segmented domain together with the objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    pub intervals: Vec<Interval>,
    pub objective: Objective,
}

impl SegmentPlan {
    /// Restrict every interval to the points of `grid` it contains. Intervals
    /// left without points are dropped.
    pub fn with_support(mut self, grid: &[f64]) -> Result<Self> {
        for iv in &mut self.intervals {
            let pts: Vec<f64> = grid.iter().copied().filter(|&x| x >= iv.lo && x <= iv.hi).collect();
            iv.support = Some(pts);
        }
        self.intervals.retain(|iv| iv.support.as_ref().is_some_and(|s| !s.is_empty()));
        if self.intervals.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(self)
    }

    /// Overall `(lo, hi)` a distribution on this plan can reach.
    pub fn bounds(&self) -> (f64, f64) {
        let lo = self.intervals[0].bounds().0;
        let hi = self.intervals[self.intervals.len() - 1].bounds().1;
        (lo, hi)
    }
}

/// Split `[lo, hi]` at the inflections of `obj`.
///
/// In discrete mode the intervals carry the grid points they contain and
/// share each breakpoint. In continuous mode they carry no support.
pub fn segment_domain(obj: &Objective, lo: f64, hi: f64, mode: InflectionMode<'_>) -> Result<SegmentPlan> {
    let breaks = find_inflections(obj, lo, hi, mode.clone())?;
    let first = match mode {
        InflectionMode::Discrete(grid) => {
            let sub: Vec<f64> = grid.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
            slope_profile(obj, &sub, SLOPE_TOL)?.first
        }
        InflectionMode::Continuous => {
            let end = breaks.first().copied().unwrap_or(hi);
            first_curvature(obj, lo, end)?
        }
    };
    let mut edges = vec![lo];
    edges.extend(breaks.iter().copied());
    edges.push(hi);
    let mut slope = first;
    let mut intervals = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        intervals.push(Interval { lo: w[0], hi: w[1], slope, support: None });
        slope = slope.flipped();
    }
    let plan = SegmentPlan { intervals, objective: obj.clone() };
    match mode {
        InflectionMode::Discrete(grid) => plan.with_support(grid),
        InflectionMode::Continuous => Ok(plan),
    }
}

/// Curvature label of `obj` on `(lo, hi)`, taken where the sampled second
/// derivative is largest in magnitude.
fn first_curvature(obj: &Objective, lo: f64, hi: f64) -> Result<Slope> {
    let mut best = 0.0f64;
    for i in 1..16 {
        let d = second_derivative(obj, lo + (hi - lo) * i as f64 / 16.0)?;
        if d.abs() > best.abs() {
            best = d;
        }
    }
    Ok(if best < 0.0 { Slope::Decreasing } else { Slope::Increasing })
}

/// How the adjacent-pair rule is valued inside the outer optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteriorMode {
    /// Expectation of the adjacent grid pair that realizes the fragment.
    /// Exact for discrete problems.
    #[default]
    GridPair,
    /// `p · H(n / p)` with `H` evaluated at the ratio itself; the fragment is
    /// still realized on the grid.
    Ratio,
}

/// Tuning for [`allocate_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationOptions {
    /// Sweep points per axis when there are two free variables.
    pub resolution: usize,
    /// Approximate total sweep size with more than two free variables.
    pub sweep_budget: usize,
    /// Compass refinement stops once the step falls below this.
    pub step_tolerance: f64,
    /// Number of sweep points refined.
    pub starts: usize,
    pub interior_mode: InteriorMode,
}

impl Default for AllocationOptions {
    fn default() -> Self {
        AllocationOptions {
            resolution: 200,
            sweep_budget: 20_000,
            step_tolerance: 1e-6,
            starts: 5,
            interior_mode: InteriorMode::GridPair,
        }
    }
}

/// Probability and first moment given to one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation {
    pub p: f64,
    pub n: f64,
}

/// Bookkeeping from the outer optimizer.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub free_variables: usize,
    pub evaluations: usize,
    pub sweep_points: usize,
    pub refinement_steps: usize,
    pub polish_rounds: usize,
    /// Interval whose allocation was eliminated by the equality constraints
    /// in the winning run.
    pub slack_interval: usize,
    pub notes: Vec<String>,
}

/// Output of [`allocate_optimize`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub allocations: Vec<Allocation>,
    pub fragments: Vec<WeightedDistribution>,
    pub distribution: WeightedDistribution,
    /// Expectation of the objective under `distribution`.
    pub value: f64,
    /// Value of the outer objective at the optimum. Equals `value` except in
    /// [`InteriorMode::Ratio`].
    pub model_value: f64,
    pub direction: Direction,
    pub interior_mode: InteriorMode,
    pub trace: OptimizerTrace,
}

/// A fragment produced by [`inner_extremal`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerResult {
    /// Expectation of the objective under `fragment`.
    pub value: f64,
    /// `p · H(n / p)` for the adjacent-pair rule, `value` for the endpoint rule.
    pub model_value: f64,
    pub fragment: WeightedDistribution,
}

/// Extremal fragment of one interval holding probability `p` and moment `n`.
pub fn inner_extremal(
    interval: &Interval,
    p: f64,
    n: f64,
    obj: &Objective,
    direction: Direction,
) -> Result<InnerResult> {
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!("interval probability {p} is negative")));
    }
    let (lo, hi) = interval.bounds();
    if !chain_ok(lo, hi, p, n) {
        return Err(Error::RatioOutsideInterval { ratio: n / p, lo, hi });
    }
    if p == 0.0 {
        return Ok(InnerResult { value: 0.0, model_value: 0.0, fragment: WeightedDistribution::new() });
    }
    let fragment = realize(interval, p, n, direction);
    let value = expectation_smooth(&fragment, obj)?;
    let model_value =
        if interval.uses_interior(direction) { p * obj.evaluate_smooth((n / p).clamp(lo, hi))? } else { value };
    Ok(InnerResult { value, model_value, fragment })
}

fn chain_ok(lo: f64, hi: f64, p: f64, n: f64) -> bool {
    let tol = CHAIN_RTOL * lo.abs().max(hi.abs()).max(1.0) * p.max(1.0);
    if p <= 0.0 {
        return n.abs() <= tol;
    }
    n >= lo * p - tol && n <= hi * p + tol
}

fn realize(interval: &Interval, p: f64, n: f64, direction: Direction) -> WeightedDistribution {
    if p <= 0.0 {
        return WeightedDistribution::new();
    }
    let (lo, hi) = interval.bounds();
    let n = n.clamp(lo * p, hi * p);
    if interval.uses_interior(direction) {
        match &interval.support {
            Some(grid) => interior_on(grid, p, n),
            None => WeightedDistribution::point_mass(n / p, p),
        }
    } else {
        endpoint_on(lo, hi, p, n)
    }
}

fn expectation_smooth(d: &WeightedDistribution, obj: &Objective) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in d.iter() {
        acc += w * obj.evaluate_smooth(x)?;
    }
    Ok(acc)
}

/// Per-interval data precomputed for fast evaluation.
struct Cell {
    lo: f64,
    hi: f64,
    interior: bool,
    f_lo: f64,
    f_hi: f64,
    grid: Option<(Vec<f64>, Vec<f64>)>,
}

struct Model<'a> {
    obj: &'a Objective,
    mode: InteriorMode,
    cells: Vec<Cell>,
    p_bar: f64,
    n_bar: f64,
    sign: f64,
}

impl<'a> Model<'a> {
    fn new(plan: &'a SegmentPlan, p_bar: f64, n_bar: f64, direction: Direction, mode: InteriorMode) -> Result<Self> {
        let obj = &plan.objective;
        let mut cells = Vec::with_capacity(plan.intervals.len());
        for iv in &plan.intervals {
            let (lo, hi) = iv.bounds();
            let grid = match &iv.support {
                Some(g) => Some((g.clone(), obj.values_on(g)?)),
                None => None,
            };
            cells.push(Cell {
                lo,
                hi,
                interior: iv.uses_interior(direction),
                f_lo: obj.evaluate_smooth(lo)?,
                f_hi: obj.evaluate_smooth(hi)?,
                grid,
            });
        }
        Ok(Model { obj, mode, cells, p_bar, n_bar, sign: direction.sign() })
    }

    /// Outer-objective contribution of one interval. `p > 0`, chain already checked.
    fn cell_value(&self, i: usize, p: f64, n: f64) -> Option<f64> {
        let c = &self.cells[i];
        if p <= 0.0 {
            return Some(0.0);
        }
        let n = n.clamp(c.lo * p, c.hi * p);
        if c.interior {
            match (&c.grid, self.mode) {
                (Some((xs, fs)), InteriorMode::GridPair) => Some(match locate_pivot(xs, p, n) {
                    Pivot::OnGrid(m) => p * fs[m],
                    Pivot::Between(m) => {
                        let (wa, wb) = pair_weights(xs[m], xs[m + 1], p, n);
                        wa * fs[m] + wb * fs[m + 1]
                    }
                }),
                _ => self.obj.evaluate_smooth(n / p).ok().map(|h| p * h),
            }
        } else if c.hi > c.lo {
            let (wa, wb) = pair_weights(c.lo, c.hi, p, n);
            Some(wa * c.f_lo + wb * c.f_hi)
        } else {
            Some(p * c.f_lo)
        }
    }

    /// Outer objective for a full allocation, or `None` if infeasible.
    fn total(&self, alloc: &[Allocation]) -> Option<f64> {
        let mut acc = 0.0;
        for (i, a) in alloc.iter().enumerate() {
            let c = &self.cells[i];
            if a.p < 0.0 || !chain_ok(c.lo, c.hi, a.p, a.n) {
                return None;
            }
            acc += self.cell_value(i, a.p, a.n)?;
        }
        Some(acc)
    }

    /// Map unit-cube coordinates to an allocation with `slack` absorbing the
    /// equality constraints.
    fn decode(&self, u: &[f64], slack: usize) -> Option<Vec<Allocation>> {
        let k = self.cells.len();
        let mut alloc = vec![Allocation { p: 0.0, n: 0.0 }; k];
        let (mut sp, mut sn) = (0.0, 0.0);
        let mut q = 0;
        for (i, a) in alloc.iter_mut().enumerate() {
            if i == slack {
                continue;
            }
            let c = &self.cells[i];
            let p = u[2 * q] * self.p_bar;
            let r = c.lo + u[2 * q + 1] * (c.hi - c.lo);
            *a = Allocation { p, n: p * r };
            sp += p;
            sn += p * r;
            q += 1;
        }
        let ps = self.p_bar - sp;
        let ns = self.n_bar - sn;
        let tol = CHAIN_RTOL * self.p_bar.max(1.0);
        if ps < -tol {
            return None;
        }
        alloc[slack] = Allocation { p: ps.max(0.0), n: ns };
        Some(alloc)
    }

    fn score(&self, u: &[f64], slack: usize) -> Option<(f64, Vec<Allocation>)> {
        let alloc = self.decode(u, slack)?;
        let v = self.total(&alloc)?;
        Some((self.sign * v, alloc))
    }
}

/// `true` if candidate `(a, alloc_a)` beats `(b, alloc_b)` as a maximizer of
/// the signed score. Near-ties prefer less mass in the last interval.
fn beats(a: f64, alloc_a: &[Allocation], b: f64, alloc_b: &[Allocation]) -> bool {
    let tol = TIE_RTOL * a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() > tol {
        return a > b;
    }
    let last = alloc_a.len() - 1;
    if alloc_a[last].p != alloc_b[last].p {
        return alloc_a[last].p < alloc_b[last].p;
    }
    let key = |al: &[Allocation]| al.iter().flat_map(|x| [x.p, x.n]).collect::<Vec<_>>();
    key(alloc_a).iter().zip(key(alloc_b).iter()).find(|(x, y)| x != y).is_some_and(|(x, y)| x < y)
}

/// Best allocation found so far.
struct Best {
    score: f64,
    alloc: Vec<Allocation>,
    slack: usize,
}

impl Best {
    fn offer(slot: &mut Option<Best>, score: f64, alloc: Vec<Allocation>, slack: usize) {
        let better = match slot {
            None => true,
            Some(b) => beats(score, &alloc, b.score, &b.alloc),
        };
        if better {
            *slot = Some(Best { score, alloc, slack });
        }
    }
}

/// Optimize the allocation of `(p_bar, n_bar)` across the plan's intervals.
pub fn allocate_optimize(
    plan: &SegmentPlan,
    p_bar: f64,
    n_bar: f64,
    direction: Direction,
    opts: &AllocationOptions,
) -> Result<AllocationResult> {
    if plan.intervals.is_empty() {
        return Err(Error::NoFeasibleAllocation(n_bar));
    }
    if !(p_bar > 0.0 && p_bar <= 1.0) {
        return Err(Error::BudgetOutOfRange(p_bar));
    }
    let (lo, hi) = plan.bounds();
    if !chain_ok(lo, hi, p_bar, n_bar) {
        return Err(Error::NoFeasibleAllocation(n_bar));
    }
    let model = Model::new(plan, p_bar, n_bar, direction, opts.interior_mode)?;
    let k = plan.intervals.len();
    let dims = 2 * (k - 1);
    let mut trace = OptimizerTrace { free_variables: dims, ..Default::default() };
    if k.is_multiple_of(2) || plan.intervals[0].slope != Slope::Decreasing {
        trace.notes.push(format!(
            "{k} intervals starting with {:?} slope; assembled with the general alternating rule",
            plan.intervals[0].slope
        ));
    }

    let mut best: Option<Best> = None;
    for slack in 0..k {
        if let Some(b) = optimize_with_slack(&model, slack, dims, opts, &mut trace) {
            Best::offer(&mut best, b.score, b.alloc, slack);
        }
    }
    if opts.interior_mode == InteriorMode::GridPair && plan.intervals.iter().all(|iv| iv.support.is_some()) {
        polish(&model, plan, &mut best, &mut trace);
    }
    let Some(best) = best else {
        return Err(Error::NoFeasibleAllocation(n_bar));
    };
    trace.slack_interval = best.slack;
    finish(plan, &model, best.alloc, direction, opts.interior_mode, trace)
}

fn optimize_with_slack(
    model: &Model<'_>,
    slack: usize,
    dims: usize,
    opts: &AllocationOptions,
    trace: &mut OptimizerTrace,
) -> Option<Best> {
    if dims == 0 {
        trace.evaluations += 1;
        let (s, alloc) = model.score(&[], slack)?;
        return Some(Best { score: s, alloc, slack });
    }
    let levels = if dims == 2 {
        opts.resolution.max(1) + 1
    } else {
        ((opts.sweep_budget as f64).powf(1.0 / dims as f64).floor() as usize).max(2)
    };
    let starts = opts.starts.max(1);

    // coarse sweep, keeping the best few points
    let mut top: Vec<(f64, Vec<f64>, Vec<Allocation>)> = Vec::with_capacity(starts + 1);
    let mut consider = |u: &[f64], trace: &mut OptimizerTrace| {
        trace.evaluations += 1;
        trace.sweep_points += 1;
        if let Some((s, alloc)) = model.score(u, slack) {
            let pos = top.iter().position(|(b, _, ba)| beats(s, &alloc, *b, ba)).unwrap_or(top.len());
            if pos < starts {
                top.insert(pos, (s, u.to_vec(), alloc));
                top.truncate(starts);
            }
        }
    };
    let full = (levels as f64).powi(dims as i32);
    if full <= opts.sweep_budget.max(1) as f64 || dims == 2 {
        let mut idx = vec![0usize; dims];
        let mut u = vec![0.0; dims];
        loop {
            for (x, &j) in u.iter_mut().zip(&idx) {
                *x = j as f64 / (levels - 1) as f64;
            }
            consider(&u, trace);
            // mixed-radix increment
            let mut d = 0;
            while d < dims {
                idx[d] += 1;
                if idx[d] < levels {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
    } else {
        // too many corners: seeded sample. Half the draws put mass on one or
        // two intervals besides the slack, where optima of the discrete
        // problem live; the rest draw probabilities uniformly from the simplex.
        let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED ^ slack as u64);
        let free = dims / 2;
        let mut u = vec![0.0; dims];
        let mut e = vec![0.0; free + 1];
        for draw in 0..opts.sweep_budget.max(1) {
            e.iter_mut().for_each(|x| *x = 0.0);
            if draw % 2 == 0 {
                for _ in 0..rng.random_range(1..=2usize) {
                    e[rng.random_range(0..free)] = -(1.0 - rng.random::<f64>()).ln();
                }
                e[free] = -(1.0 - rng.random::<f64>()).ln();
            } else {
                for x in e.iter_mut() {
                    *x = -(1.0 - rng.random::<f64>()).ln();
                }
            }
            let total: f64 = e.iter().sum();
            for q in 0..free {
                u[2 * q] = e[q] / total;
                u[2 * q + 1] = rng.random();
            }
            consider(&u, trace);
        }
    }

    let directions = compass_directions(dims);
    let mut best: Option<Best> = None;
    for (s0, u0, a0) in top {
        let step = 1.0 / (levels - 1) as f64;
        let (s, alloc) = compass(model, slack, &directions, s0, u0, a0, step, opts.step_tolerance, trace);
        Best::offer(&mut best, s, alloc, slack);
    }
    best
}

/// Unit moves along each axis, and along each pair of axes when there are
/// few of them.
fn compass_directions(dims: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for a in 0..dims {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; dims];
            d[a] = s;
            dirs.push(d);
        }
    }
    if dims > DIAGONAL_DIMS {
        return dirs;
    }
    for a in 0..dims {
        for b in a + 1..dims {
            for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut d = vec![0.0; dims];
                d[a] = sa;
                d[b] = sb;
                dirs.push(d);
            }
        }
    }
    dirs
}

#[allow(clippy::too_many_arguments)]
fn compass(
    model: &Model<'_>,
    slack: usize,
    directions: &[Vec<f64>],
    mut score: f64,
    mut u: Vec<f64>,
    mut alloc: Vec<Allocation>,
    mut step: f64,
    tol: f64,
    trace: &mut OptimizerTrace,
) -> (f64, Vec<Allocation>) {
    let mut trial = vec![0.0; u.len()];
    while step >= tol {
        let mut improved: Option<(f64, Vec<f64>, Vec<Allocation>)> = None;
        for d in directions {
            for ((t, &x), &dx) in trial.iter_mut().zip(&u).zip(d) {
                *t = (x + step * dx).clamp(0.0, 1.0);
            }
            if trial == u {
                continue;
            }
            trace.evaluations += 1;
            if let Some((s, a)) = model.score(&trial, slack) {
                let reference = improved.as_ref().map_or(score, |(b, _, _)| *b);
                if s > reference + TIE_RTOL * reference.abs().max(1.0) {
                    improved = Some((s, trial.clone(), a));
                }
            }
        }
        match improved {
            Some((s, t, a)) => {
                score = s;
                u = t;
                alloc = a;
                trace.refinement_steps += 1;
            }
            None => step *= 0.5,
        }
    }
    (score, alloc)
}

/// Exact boundary step on discrete supports. The optimum of the discrete
/// problem is carried by at most two grid points, so every two-point
/// distribution on the grid and the interval ends is tried, mapped back onto
/// intervals and kept if it scores better.
fn polish(model: &Model<'_>, plan: &SegmentPlan, best: &mut Option<Best>, trace: &mut OptimizerTrace) {
    trace.polish_rounds += 1;
    let candidates = polish_candidates(plan);
    for (a, &xa) in candidates.iter().enumerate() {
        for &xb in &candidates[a + 1..] {
            let exact_a = (xb * model.p_bar - model.n_bar) / (xb - xa);
            let exact_b = (model.n_bar - xa * model.p_bar) / (xb - xa);
            if exact_a < -1e-15 || exact_b < -1e-15 {
                continue;
            }
            let (wa, wb) = pair_weights(xa, xb, model.p_bar, model.n_bar);
            for alloc in place_pair(plan, (xa, wa), (xb, wb)) {
                trace.evaluations += 1;
                if let Some(v) = model.total(&alloc) {
                    let s = model.sign * v;
                    let slack = best.as_ref().map_or(0, |b| b.slack);
                    if best.as_ref().is_none_or(|b| s > b.score) {
                        Best::offer(best, s, alloc, slack);
                    }
                }
            }
        }
    }
}

fn polish_candidates(plan: &SegmentPlan) -> Vec<f64> {
    let mut pts = Vec::new();
    for iv in &plan.intervals {
        let (lo, hi) = iv.bounds();
        pts.push(lo);
        pts.push(hi);
        if let Some(grid) = &iv.support {
            pts.extend(grid.iter().copied());
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Every way of assigning the two weighted points to intervals containing them.
fn place_pair(plan: &SegmentPlan, a: (f64, f64), b: (f64, f64)) -> Vec<Vec<Allocation>> {
    let owners = |x: f64| -> Vec<usize> {
        plan.intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| {
                let (lo, hi) = iv.bounds();
                x >= lo && x <= hi
            })
            .map(|(i, _)| i)
            .collect()
    };
    let mut out = Vec::new();
    for ia in owners(a.0) {
        for ib in owners(b.0) {
            let mut alloc = vec![Allocation { p: 0.0, n: 0.0 }; plan.intervals.len()];
            alloc[ia].p += a.1;
            alloc[ia].n += a.0 * a.1;
            alloc[ib].p += b.1;
            alloc[ib].n += b.0 * b.1;
            out.push(alloc);
        }
    }
    out
}

fn finish(
    plan: &SegmentPlan,
    model: &Model<'_>,
    allocations: Vec<Allocation>,
    direction: Direction,
    interior_mode: InteriorMode,
    trace: OptimizerTrace,
) -> Result<AllocationResult> {
    let fragments: Vec<WeightedDistribution> =
        plan.intervals.iter().zip(&allocations).map(|(iv, a)| realize(iv, a.p, a.n, direction)).collect();
    let mut distribution = WeightedDistribution::new();
    for f in &fragments {
        distribution.merge(f);
    }
    let value = expectation_smooth(&distribution, &plan.objective)?;
    let model_value = model.total(&allocations).ok_or(Error::NoFeasibleAllocation(model.n_bar))?;
    Ok(AllocationResult { allocations, fragments, distribution, value, model_value, direction, interior_mode, trace })
}

/// Outer-objective value of an arbitrary allocation, or an error if it breaks
/// the chain constraints.
pub fn allocation_value(
    plan: &SegmentPlan,
    allocations: &[Allocation],
    direction: Direction,
    mode: InteriorMode,
) -> Result<f64> {
    if allocations.len() != plan.intervals.len() {
        return Err(Error::InvalidParameter(format!(
            "{} allocations for {} intervals",
            allocations.len(),
            plan.intervals.len()
        )));
    }
    let p: f64 = allocations.iter().map(|a| a.p).sum();
    let n: f64 = allocations.iter().map(|a| a.n).sum();
    let model = Model::new(plan, p.min(1.0), n, direction, mode)?;
    for (iv, a) in plan.intervals.iter().zip(allocations) {
        let (lo, hi) = iv.bounds();
        if a.p < 0.0 || !chain_ok(lo, hi, a.p, a.n) {
            return Err(Error::RatioOutsideInterval { ratio: a.n / a.p, lo, hi });
        }
    }
    model.total(allocations).ok_or(Error::NoFeasibleAllocation(n))
}

/// Concatenate the per-interval fragments.
pub fn assemble(result: &AllocationResult) -> WeightedDistribution {
    let mut d = WeightedDistribution::new();
    for f in &result.fragments {
        d.merge(f);
    }
    d
}
