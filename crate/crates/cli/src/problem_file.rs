//! JSON problem files.

use std::path::Path;

use extremal_core::quantum::BreakpointMode;
use extremal_core::{Direction, InteriorMode, MomentProblem, Objective};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub grid: GridSpec,
    #[serde(default = "one")]
    pub p_bar: f64,
    pub n_bar: f64,
    #[serde(default)]
    pub objective: Option<ObjectiveSpec>,
    #[serde(default = "max")]
    pub direction: Direction,
    #[serde(default)]
    pub options: Options,
}

fn one() -> f64 {
    1.0
}

fn max() -> Direction {
    Direction::Max
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Builtin(BuiltinSpec),
    /// Values aligned with the grid.
    Table(Vec<f64>),
    Expression(String),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum BuiltinSpec {
    Power { exponent: f64 },
    MziF { p0: f64 },
    LzjcF { v: f64, delta: f64 },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub verify: bool,
    /// Relative tolerance of the oracle cross-check.
    pub tolerance: f64,
    pub resolution: usize,
    pub step_tolerance: f64,
    pub interior_mode: InteriorMode,
    pub breakpoint: BreakpointMode,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            verify: true,
            tolerance: 1e-9,
            resolution: 200,
            step_tolerance: 1e-6,
            interior_mode: InteriorMode::GridPair,
            breakpoint: BreakpointMode::Discrete,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        match self {
            GridSpec::Points(p) => Ok(p.clone()),
            GridSpec::Range(r) => {
                if !(r.step > 0.0) || !(r.stop >= r.start) || !r.start.is_finite() || !r.stop.is_finite() {
                    return Err(CliError::input("grid", "range needs finite start <= stop and step > 0"));
                }
                let count = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                if count > 10_000_000 {
                    return Err(CliError::input("grid", format!("range has {count} points")));
                }
                Ok((0..count).map(|i| r.start + i as f64 * r.step).collect())
            }
        }
    }
}

impl ObjectiveSpec {
    pub fn build(&self, grid: &[f64]) -> Result<Objective, CliError> {
        let field = |e: extremal_core::Error, name: &str| CliError::from_core(e).with_field(name);
        match self {
            ObjectiveSpec::Builtin(BuiltinSpec::Power { exponent }) => Ok(Objective::power(*exponent)),
            ObjectiveSpec::Builtin(BuiltinSpec::MziF { p0 }) => {
                Objective::mzi(*p0).map_err(|e| field(e, "objective.builtin.p0"))
            }
            ObjectiveSpec::Builtin(BuiltinSpec::LzjcF { v, delta }) => {
                Objective::lzjc(*v, *delta).map_err(|e| field(e, "objective.builtin"))
            }
            ObjectiveSpec::Table(values) => {
                Objective::tabulated(grid.to_vec(), values.clone()).map_err(|e| field(e, "objective.table"))
            }
            ObjectiveSpec::Expression(text) => {
                Objective::expression(text).map_err(|e| field(e, "objective.expression"))
            }
        }
    }
}

/// A problem file resolved into core types.
pub struct Loaded {
    pub file: ProblemFile,
    pub problem: MomentProblem,
    pub objective: Objective,
}

pub fn read(path: &Path) -> Result<ProblemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input("problem file", format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::input(if path == "." { "problem file" } else { &path }, e.into_inner().to_string())
    })
}

/// Resolve a parsed file. `expr` overrides the file's objective.
pub fn load(file: ProblemFile, expr: Option<&str>) -> Result<Loaded, CliError> {
    let grid = file.grid.points()?;
    let problem = MomentProblem::new(grid, file.p_bar, file.n_bar).map_err(|e| {
        let name = match e {
            extremal_core::Error::BudgetOutOfRange(_) => "p_bar",
            extremal_core::Error::InfeasibleMean { .. } => "n_bar",
            _ => "grid",
        };
        CliError::from_core(e).with_field(name)
    })?;
    let objective = match (expr, &file.objective) {
        (Some(text), _) => {
            Objective::expression(text).map_err(|e| CliError::from_core(e).with_field("--objective-expr"))?
        }
        (None, Some(spec)) => spec.build(problem.grid())?,
        (None, None) => {
            return Err(CliError::input("objective", "missing; give one in the file or with --objective-expr"))
        }
    };
    let options = &file.options;
    if !(options.tolerance > 0.0) || !(options.step_tolerance > 0.0) || options.resolution == 0 {
        return Err(CliError::input("options", "tolerances and resolution must be positive"));
    }
    Ok(Loaded { file, problem, objective })
}
