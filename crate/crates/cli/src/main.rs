//! `extremal`: extremal expectations from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod error;
mod output;
mod problem_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "extremal", version, about = "Extremal expectations under fixed probability and first moment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file, falling through to the segmented solver for mixed-slope objectives.
    Solve(SolveArgs),
    /// Solve a problem file with the segmented solver.
    Segment(SolveArgs),
    /// Compare the solver with the vertex-enumeration oracle.
    Verify(VerifyArgs),
    /// Mach-Zehnder phase estimation with path-symmetric inputs.
    Mzi(MziArgs),
    /// Optimal cavity state for coupling estimation in the Landau-Zener-Jaynes-Cummings model.
    Lzjc(LzjcArgs),
    /// Optimal initial cavity state of a Tavis-Cummings battery.
    Battery(BatteryArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// JSON problem file.
    file: PathBuf,
    /// Objective expression in `x`, overriding the file's objective.
    #[arg(long)]
    objective_expr: Option<String>,
    /// Write the optimal distribution as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Skip the oracle cross-check.
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON problem file.
    #[arg(required_unless_present = "random", conflicts_with = "random")]
    file: Option<PathBuf>,
    /// Verify this many seeded random slope-monotone problems instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    objective_expr: Option<String>,
}

#[derive(Args)]
struct MziArgs {
    /// Total photon number.
    #[arg(long, required_unless_present = "sweep")]
    nbar: Option<f64>,
    /// Highest Fock level available.
    #[arg(long)]
    cap: u32,
    /// JSON file with a path-symmetric state to evaluate: {"weights": [[level, weight], ...]}.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Sweep the total photon number over lo:hi:step.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BreakpointArg {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, ValueEnum)]
enum InteriorArg {
    /// Value the concave part at the continuous ratio.
    Ratio,
    /// Value the concave part by its adjacent Fock pair (exact on Fock levels).
    GridPair,
}

#[derive(Args)]
struct LzjcArgs {
    /// Level splitting.
    #[arg(long, allow_negative_numbers = true)]
    delta: f64,
    /// Sweep speed.
    #[arg(long)]
    v: f64,
    /// Mean photon number.
    #[arg(long, required_unless_present = "sweep")]
    nbar: Option<f64>,
    /// Sweep the mean photon number over lo:hi:step.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = BreakpointArg::Discrete)]
    breakpoint: BreakpointArg,
    #[arg(long, value_enum, default_value_t = InteriorArg::Ratio)]
    interior: InteriorArg,
    /// Highest Fock level.
    #[arg(long, default_value_t = 100)]
    truncation: u32,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct BatteryArgs {
    /// Mean photon number.
    #[arg(long)]
    nbar: f64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => {
            commands::solve(&a.file, a.objective_expr.as_deref(), a.csv.as_deref(), !a.no_verify, false)
        }
        Command::Segment(a) => {
            commands::solve(&a.file, a.objective_expr.as_deref(), a.csv.as_deref(), !a.no_verify, true)
        }
        Command::Verify(a) => match (a.file, a.random) {
            (Some(file), _) => commands::verify_file(&file, a.objective_expr.as_deref()),
            (None, Some(n)) => commands::verify_random(n, a.seed),
            (None, None) => unreachable!("clap requires a file or --random"),
        },
        Command::Mzi(a) => commands::mzi(a.nbar, a.cap, a.state.as_deref(), a.sweep.as_deref(), a.csv.as_deref()),
        Command::Lzjc(a) => commands::lzjc(commands::LzjcRequest {
            delta: a.delta,
            v: a.v,
            n_bar: a.nbar,
            sweep: a.sweep,
            continuous: matches!(a.breakpoint, BreakpointArg::Continuous),
            grid_pair: matches!(a.interior, InteriorArg::GridPair),
            truncation: a.truncation,
            csv: a.csv,
            verify: !a.no_verify,
        }),
        Command::Battery(a) => commands::battery(a.nbar, a.csv.as_deref()),
    };
    if let Some(text) = &outcome.stdout {
        print!("{text}");
    }
    match outcome.error {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
