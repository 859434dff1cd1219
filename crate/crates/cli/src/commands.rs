use std::path::{Path, PathBuf};

use extremal_core::quantum::{
    battery_optimal_state, lzjc_optimal, mzi_gap_to_optimal, mzi_noon_gap, mzi_optimal_state, mzi_qfi, BreakpointMode,
    LzjcModel, LzjcOptions, PathSymmetricState, QfiReport,
};
use extremal_core::{
    allocate_optimize, classify_slope, extremal_expectation, lp_extremal, segment_domain, Allocation,
    AllocationOptions, Branch, Direction, InflectionMode, InteriorMode, MomentProblem, Objective, OptimizerTrace,
    Slope, SlopeClass, WeightedDistribution,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::{Cell, Csv, OracleCheck, Report};
use crate::problem_file::{self, Loaded, ProblemFile};

/// What a command prints and how it ends.
pub struct Outcome {
    pub stdout: Option<String>,
    pub error: Option<CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { stdout: Some(text), error: None }
    }

    fn fail(e: CliError) -> Self {
        Outcome { stdout: None, error: Some(e) }
    }

    /// Print the report, then fail if the oracle disagreed.
    fn checked(text: String, check: Option<&OracleCheck>) -> Self {
        let error = check.and_then(|c| c.clone().into_result().err());
        Outcome { stdout: Some(text), error }
    }
}

fn run(f: impl FnOnce() -> Result<Outcome, CliError>) -> Outcome {
    f().unwrap_or_else(Outcome::fail)
}

#[derive(Serialize)]
struct Echo<'a> {
    #[serde(flatten)]
    file: &'a ProblemFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_expr: Option<&'a str>,
}

#[derive(Serialize)]
struct IntervalOut {
    lo: f64,
    hi: f64,
    slope: Slope,
}

#[derive(Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
enum SolveResult {
    ClosedForm {
        slope_class: SlopeClass,
        branch: Branch,
        direction: Direction,
        value: f64,
        distribution: WeightedDistribution,
    },
    Segmented {
        direction: Direction,
        value: f64,
        model_value: f64,
        interior_mode: InteriorMode,
        intervals: Vec<IntervalOut>,
        allocations: Vec<Allocation>,
        distribution: WeightedDistribution,
        trace: OptimizerTrace,
    },
}

impl SolveResult {
    fn value(&self) -> f64 {
        match self {
            SolveResult::ClosedForm { value, .. } | SolveResult::Segmented { value, .. } => *value,
        }
    }

    fn distribution(&self) -> &WeightedDistribution {
        match self {
            SolveResult::ClosedForm { distribution, .. } | SolveResult::Segmented { distribution, .. } => distribution,
        }
    }
}

/// Solve a loaded problem. Returns the result, an optional notice, and
/// whether an exact oracle match is expected.
fn solve_loaded(loaded: &Loaded, force_segment: bool) -> Result<(SolveResult, Option<String>, bool), CliError> {
    let Loaded { file, problem, objective } = loaded;
    let class = classify_slope(objective, problem.grid())?;
    if !force_segment && !class.is_mixed() {
        let r = extremal_expectation(problem, objective, file.direction)?;
        let out = SolveResult::ClosedForm {
            slope_class: class,
            branch: r.branch,
            direction: r.direction,
            value: r.value,
            distribution: r.distribution,
        };
        return Ok((out, None, true));
    }
    let notice = (!force_segment).then(|| "objective slope is mixed; solved with the segmented solver".to_string());
    let opts = &file.options;
    let grid = problem.grid();
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let plan = if grid.len() == 1 {
        // a single point cannot be split
        segment_domain(objective, lo, lo + 1.0, InflectionMode::Continuous)?.with_support(grid)?
    } else {
        match opts.breakpoint {
            BreakpointMode::Discrete => segment_domain(objective, lo, hi, InflectionMode::Discrete(grid))?,
            BreakpointMode::Continuous => {
                segment_domain(objective, lo, hi, InflectionMode::Continuous)?.with_support(grid)?
            }
        }
    };
    let alloc_opts = AllocationOptions {
        resolution: opts.resolution,
        step_tolerance: opts.step_tolerance,
        interior_mode: opts.interior_mode,
        ..AllocationOptions::default()
    };
    let r = allocate_optimize(&plan, problem.p_bar(), problem.n_bar(), file.direction, &alloc_opts)
        .map_err(CliError::from_core)?;
    let exact = opts.interior_mode == InteriorMode::GridPair && opts.breakpoint == BreakpointMode::Discrete;
    let out = SolveResult::Segmented {
        direction: r.direction,
        value: r.value,
        model_value: r.model_value,
        interior_mode: r.interior_mode,
        intervals: plan.intervals.iter().map(|iv| IntervalOut { lo: iv.lo, hi: iv.hi, slope: iv.slope }).collect(),
        allocations: r.allocations,
        distribution: r.distribution,
        trace: r.trace,
    };
    Ok((out, notice, exact))
}

fn oracle_check(loaded: &Loaded, value: f64, exact: bool) -> Result<OracleCheck, CliError> {
    let o = lp_extremal(&loaded.problem, &loaded.objective, loaded.file.direction)?;
    let tol = loaded.file.options.tolerance;
    Ok(if exact {
        OracleCheck::equal(o.best_value, value, tol)
    } else {
        OracleCheck::bound(o.best_value, value, loaded.file.direction.sign(), tol)
    })
}

pub fn solve(file: &Path, expr: Option<&str>, csv: Option<&Path>, verify: bool, force_segment: bool) -> Outcome {
    run(|| {
        let loaded = problem_file::load(problem_file::read(file)?, expr)?;
        let (result, notice, exact) = solve_loaded(&loaded, force_segment)?;
        let oracle = if verify && loaded.file.options.verify {
            Some(oracle_check(&loaded, result.value(), exact)?)
        } else {
            None
        };
        if let Some(path) = csv {
            Csv::distribution(result.distribution()).write(path)?;
        }
        let command = if force_segment { "segment" } else { "solve" };
        let echo = Echo { file: &loaded.file, objective_expr: expr };
        let mut report = Report::new(command, echo, result);
        report.notice = notice;
        report.oracle = oracle;
        Ok(Outcome::checked(report.render(), report.oracle.as_ref()))
    })
}

pub fn verify_file(file: &Path, expr: Option<&str>) -> Outcome {
    run(|| {
        let loaded = problem_file::load(problem_file::read(file)?, expr)?;
        let (result, notice, exact) = solve_loaded(&loaded, false)?;
        let check = oracle_check(&loaded, result.value(), exact)?;
        let echo = Echo { file: &loaded.file, objective_expr: expr };
        let mut report = Report::new("verify", echo, result);
        report.notice = notice;
        report.oracle = Some(check);
        Ok(Outcome::checked(report.render(), report.oracle.as_ref()))
    })
}

#[derive(Serialize)]
struct RandomInput {
    count: usize,
    seed: u64,
}

#[derive(Serialize)]
struct RandomCase {
    index: usize,
    grid_len: usize,
    p_bar: f64,
    n_bar: f64,
    objective: &'static str,
    direction: Direction,
    solver_value: f64,
    oracle_value: f64,
    relative_error: f64,
    agreement: bool,
}

#[derive(Serialize)]
struct RandomSummary {
    cases: Vec<RandomCase>,
    all_agree: bool,
}

/// Tolerance of the random verification sweep.
const RANDOM_TOL: f64 = 1e-10;

pub fn verify_random(count: usize, seed: u64) -> Outcome {
    run(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::with_capacity(count);
        for index in 0..count {
            let (problem, objective, label) = random_monotone_problem(&mut rng)?;
            let direction = if rng.random::<bool>() { Direction::Max } else { Direction::Min };
            let solved = extremal_expectation(&problem, &objective, direction)?;
            let oracle = lp_extremal(&problem, &objective, direction)?;
            let check = OracleCheck::equal(oracle.best_value, solved.value, RANDOM_TOL);
            cases.push(RandomCase {
                index,
                grid_len: problem.len(),
                p_bar: problem.p_bar(),
                n_bar: problem.n_bar(),
                objective: label,
                direction,
                solver_value: solved.value,
                oracle_value: oracle.best_value,
                relative_error: check.relative_error,
                agreement: check.agreement,
            });
        }
        let all_agree = cases.iter().all(|c| c.agreement);
        let report = Report::new("verify", RandomInput { count, seed }, RandomSummary { cases, all_agree });
        let error =
            (!all_agree).then(|| CliError::mismatch("solver and oracle disagree on at least one random problem"));
        Ok(Outcome { stdout: Some(report.render()), error })
    })
}

/// A random grid of 2 to 50 points, budget, feasible mean and a convex or
/// concave tabulated objective.
fn random_monotone_problem(rng: &mut ChaCha8Rng) -> Result<(MomentProblem, Objective, &'static str), CliError> {
    let k = rng.random_range(2..=50usize);
    let mut x = rng.random_range(-5.0..5.0);
    let mut grid = Vec::with_capacity(k);
    for _ in 0..k {
        grid.push(x);
        x += rng.random_range(0.1..2.0);
    }
    let p_bar = rng.random_range(0.05..=1.0);
    let ratio = rng.random_range(grid[0]..=grid[k - 1]);
    let problem = MomentProblem::new(grid.clone(), p_bar, ratio * p_bar)?;
    // increasing slopes give a convex table
    let mut slope = rng.random_range(-3.0..3.0);
    let mut values = vec![rng.random_range(-1.0..1.0)];
    for w in grid.windows(2) {
        let last = values[values.len() - 1];
        values.push(last + slope * (w[1] - w[0]));
        slope += rng.random_range(0.01..1.0);
    }
    let (label, values) =
        if rng.random::<bool>() { ("convex", values) } else { ("concave", values.into_iter().map(|v| -v).collect()) };
    Ok((problem, Objective::tabulated(grid, values)?, label))
}

/// Parse `lo:hi:step` into the points `lo, lo + step, ... <= hi`.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::input("--sweep", format!("expected lo:hi:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(CliError::input("--sweep", format!("{count} points is too many")));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    weights: Vec<(u32, f64)>,
}

#[derive(Serialize)]
struct MziInput {
    n_bar: Option<f64>,
    cap: u32,
    state: Option<String>,
    sweep: Option<String>,
}

#[derive(Serialize)]
struct CustomState {
    weights: WeightedDistribution,
    qfi: QfiReport,
    noon_gap: f64,
    gap_to_optimal: Option<f64>,
}

#[derive(Serialize)]
struct MziPoint {
    optimal_state: WeightedDistribution,
    optimal: QfiReport,
    noon: QfiReport,
}

#[derive(Serialize)]
struct MziSweepRow {
    n_bar_total: f64,
    crb_noon: f64,
    crb_oi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    crb_custom: Option<f64>,
}

#[derive(Serialize)]
struct MziResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<MziPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<MziSweepRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    custom: Option<CustomState>,
}

fn read_state(path: &Path) -> Result<PathSymmetricState, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input("--state", format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let file: StateFile = serde_path_to_error::deserialize(de)
        .map_err(|e| CliError::input(&format!("--state {}", e.path()), e.into_inner().to_string()))?;
    PathSymmetricState::from_levels(file.weights).map_err(|e| CliError::from_core(e).with_field("--state"))
}

fn noon_report(n_bar: f64) -> QfiReport {
    QfiReport::new(n_bar * n_bar, n_bar)
}

pub fn mzi(n_bar: Option<f64>, cap: u32, state: Option<&Path>, sweep: Option<&str>, csv: Option<&Path>) -> Outcome {
    run(|| {
        let custom = match state {
            Some(path) => {
                let s = read_state(path)?;
                let gap = match mzi_gap_to_optimal(&s, cap) {
                    Ok(g) => Some(g),
                    Err(extremal_core::Error::CapBelowSupport { .. } | extremal_core::Error::CapBelowMean { .. }) => {
                        None
                    }
                    Err(e) => return Err(e.into()),
                };
                Some(CustomState {
                    weights: s.fock_weights().clone(),
                    qfi: mzi_qfi(&s),
                    noon_gap: mzi_noon_gap(&s),
                    gap_to_optimal: gap,
                })
            }
            None => None,
        };
        let point = match n_bar {
            Some(n) => {
                let (s, r) = mzi_optimal_state(n, cap).map_err(|e| CliError::from_core(e).with_field("--nbar"))?;
                Some(MziPoint { optimal_state: s.fock_weights().clone(), optimal: r, noon: noon_report(n) })
            }
            None => None,
        };
        let rows = match sweep {
            Some(spec) => {
                let mut rows = Vec::new();
                for n in parse_sweep(spec)? {
                    let (_, r) = mzi_optimal_state(n, cap).map_err(|e| CliError::from_core(e).with_field("--sweep"))?;
                    rows.push(MziSweepRow {
                        n_bar_total: n,
                        crb_noon: noon_report(n).crb,
                        crb_oi: r.crb,
                        crb_custom: custom.as_ref().map(|c| c.qfi.crb),
                    });
                }
                Some(rows)
            }
            None => None,
        };
        if let Some(path) = csv {
            let table = match (&rows, &point) {
                (Some(rows), _) => {
                    let with_custom = custom.is_some();
                    let mut header = vec!["n_bar_total", "crb_noon", "crb_oi"];
                    if with_custom {
                        header.push("crb_custom");
                    }
                    let mut t = Csv::new(&header);
                    for r in rows {
                        let mut cells = vec![Cell::Num(r.n_bar_total), Cell::Num(r.crb_noon), Cell::Num(r.crb_oi)];
                        if let Some(c) = r.crb_custom {
                            cells.push(Cell::Num(c));
                        }
                        t.row(&cells);
                    }
                    t
                }
                (None, Some(p)) => Csv::distribution(&p.optimal_state),
                (None, None) => unreachable!("clap requires --nbar or --sweep"),
            };
            table.write(path)?;
        }
        let input =
            MziInput { n_bar, cap, state: state.map(|p| p.display().to_string()), sweep: sweep.map(str::to_string) };
        let report = Report::new("mzi", input, MziResult { point, sweep: rows, custom });
        Ok(Outcome::ok(report.render()))
    })
}

pub struct LzjcRequest {
    pub delta: f64,
    pub v: f64,
    pub n_bar: Option<f64>,
    pub sweep: Option<String>,
    pub continuous: bool,
    pub grid_pair: bool,
    pub truncation: u32,
    pub csv: Option<PathBuf>,
    pub verify: bool,
}

#[derive(Serialize)]
struct LzjcInput {
    delta: f64,
    v: f64,
    n_bar: Option<f64>,
    sweep: Option<String>,
    breakpoint: BreakpointMode,
    interior_mode: InteriorMode,
    truncation: u32,
}

#[derive(Serialize)]
struct LzjcPoint {
    f_max: f64,
    qfi: QfiReport,
    distribution: WeightedDistribution,
    breakpoints: Vec<f64>,
    allocations: Vec<Allocation>,
    model_value: f64,
    trace: OptimizerTrace,
}

#[derive(Serialize)]
struct LzjcRow {
    n_bar: f64,
    f_max: f64,
    crb: f64,
    beats_sql: bool,
    beats_heisenberg: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum LzjcResult {
    Point(LzjcPoint),
    Sweep { rows: Vec<LzjcRow> },
}

/// Oracle tolerance for the cavity problem.
const LZJC_TOL: f64 = 1e-9;

pub fn lzjc(req: LzjcRequest) -> Outcome {
    run(|| {
        let model = LzjcModel::with_truncation(req.v, req.delta, req.truncation)
            .map_err(|e| CliError::from_core(e).with_field("--v/--delta/--truncation"))?;
        let mut opts = LzjcOptions::default();
        if req.continuous {
            opts.breakpoint = BreakpointMode::Continuous;
        }
        if req.grid_pair {
            opts.allocation.interior_mode = InteriorMode::GridPair;
        }
        let exact =
            opts.allocation.interior_mode == InteriorMode::GridPair && opts.breakpoint == BreakpointMode::Discrete;
        let table = model.tabulated()?;
        let check = |n: f64, value: f64| -> Result<OracleCheck, CliError> {
            let problem = MomentProblem::new(model.grid(), 1.0, n)?;
            let o = lp_extremal(&problem, &table, Direction::Max)?;
            Ok(if exact {
                OracleCheck::equal(o.best_value, value, LZJC_TOL)
            } else {
                OracleCheck::bound(o.best_value, value, 1.0, LZJC_TOL)
            })
        };
        let input = LzjcInput {
            delta: req.delta,
            v: req.v,
            n_bar: req.n_bar,
            sweep: req.sweep.clone(),
            breakpoint: opts.breakpoint,
            interior_mode: opts.allocation.interior_mode,
            truncation: req.truncation,
        };

        if let Some(spec) = &req.sweep {
            let mut rows = Vec::new();
            for n in parse_sweep(spec)? {
                let r = lzjc_optimal(&model, n, &opts).map_err(|e| CliError::from_core(e).with_field("--sweep"))?;
                let oracle = if req.verify { Some(check(n, r.report.fisher_information)?) } else { None };
                rows.push(LzjcRow {
                    n_bar: n,
                    f_max: r.report.fisher_information,
                    crb: r.report.crb,
                    beats_sql: r.report.beats_sql,
                    beats_heisenberg: r.report.beats_heisenberg,
                    oracle,
                });
            }
            if let Some(path) = &req.csv {
                let mut t = Csv::new(&["n_bar", "f_max", "crb", "beats_sql", "beats_heisenberg"]);
                for r in &rows {
                    t.row(&[
                        Cell::Num(r.n_bar),
                        Cell::Num(r.f_max),
                        Cell::Num(r.crb),
                        Cell::Bool(r.beats_sql),
                        Cell::Bool(r.beats_heisenberg),
                    ]);
                }
                t.write(path)?;
            }
            let failed = rows.iter().filter_map(|r| r.oracle.as_ref()).find(|c| !c.agreement).cloned();
            let report = Report::new("lzjc", input, LzjcResult::Sweep { rows });
            return Ok(Outcome::checked(report.render(), failed.as_ref()));
        }

        let n = req.n_bar.expect("clap requires --nbar or --sweep");
        let r = lzjc_optimal(&model, n, &opts).map_err(|e| CliError::from_core(e).with_field("--nbar"))?;
        if let Some(path) = &req.csv {
            Csv::distribution(&r.distribution).write(path)?;
        }
        let oracle = if req.verify { Some(check(n, r.report.fisher_information)?) } else { None };
        let point = LzjcPoint {
            f_max: r.report.fisher_information,
            qfi: r.report,
            distribution: r.distribution,
            breakpoints: r.breakpoints,
            allocations: r.allocation.allocations,
            model_value: r.allocation.model_value,
            trace: r.allocation.trace,
        };
        let mut report = Report::new("lzjc", input, LzjcResult::Point(point));
        report.oracle = oracle;
        Ok(Outcome::checked(report.render(), report.oracle.as_ref()))
    })
}

#[derive(Serialize)]
struct BatteryInput {
    n_bar: f64,
}

#[derive(Serialize)]
struct BatteryResult {
    distribution: WeightedDistribution,
    p_bar: f64,
    mean: f64,
}

pub fn battery(n_bar: f64, csv: Option<&Path>) -> Outcome {
    run(|| {
        let d = battery_optimal_state(n_bar).map_err(|e| CliError::from_core(e).with_field("--nbar"))?;
        if let Some(path) = csv {
            Csv::distribution(&d).write(path)?;
        }
        let result = BatteryResult { p_bar: d.total(), mean: d.first_moment(), distribution: d };
        Ok(Outcome::ok(Report::new("battery", BatteryInput { n_bar }, result).render()))
    })
}
