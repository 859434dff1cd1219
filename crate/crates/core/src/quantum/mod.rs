//! Metrology and energy-storage applications of the extremal solvers.

pub mod lzjc;
pub mod mzi;

use serde::Serialize;

use crate::error::Result;
use crate::problem::WeightedDistribution;
use crate::solver::adjacent_fock_distribution;

pub use lzjc::{
    lzjc_f, lzjc_optimal, lzjc_plan, lzjc_sweep, BreakpointMode, LzjcModel, LzjcOptimum, LzjcOptions, LzjcSweepRow,
};
pub use mzi::{mzi_gap_to_optimal, mzi_noon_gap, mzi_optimal_state, mzi_qfi, PathSymmetricState};

/// Quantum Fisher information of a state and how it compares with the
/// standard (`F = n`) and Heisenberg (`F = n²`) benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiReport {
    pub fisher_information: f64,
    /// Cramér-Rao bound `1 / F` on the estimator variance; infinite when `F = 0`.
    pub crb: f64,
    /// Mean photon number the benchmarks refer to.
    pub n_bar: f64,
    pub beats_sql: bool,
    pub beats_heisenberg: bool,
}

impl QfiReport {
    pub fn new(fisher_information: f64, n_bar: f64) -> Self {
        QfiReport {
            fisher_information,
            crb: 1.0 / fisher_information,
            n_bar,
            beats_sql: fisher_information > n_bar,
            beats_heisenberg: fisher_information > n_bar * n_bar,
        }
    }
}

/// Cavity state maximizing the stored energy and charging power of a
/// Tavis-Cummings battery at mean photon number `n_bar`: the number state
/// `|n_bar>` or the superposition of the two neighbouring number states.
/// Returns squared amplitudes.
pub fn battery_optimal_state(n_bar: f64) -> Result<WeightedDistribution> {
    adjacent_fock_distribution(n_bar)
}
