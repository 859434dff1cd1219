//! Estimation of the coupling `Δ` in the Landau-Zener-Jaynes-Cummings model.
//!
//! After the sweep the Fisher information is `Σ |C_n|² f(n)` with
//!
//! ```text
//! f(n) = 16 π² δ_n² e^{-2π δ_n} / (Δ² (1 - e^{-2π δ_n})),   δ_n = Δ² (n + 1) / (4 v)
//! ```
//!
//! `f` is concave up to its inflection and convex beyond, so the best cavity
//! state at a given mean photon number comes from the segmented solver.

use serde::{Deserialize, Serialize};

use super::QfiReport;
use crate::error::{Error, Result};
use crate::objective::{lzjc_value, InflectionMode, Objective};
use crate::problem::{Direction, WeightedDistribution};
use crate::segment::{
    allocate_optimize, segment_domain, AllocationOptions, AllocationResult, InteriorMode, SegmentPlan,
};

/// Sweep speed, coupling and Fock-space truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LzjcModel {
    pub v: f64,
    pub delta: f64,
    pub truncation: u32,
}

impl LzjcModel {
    /// Model truncated at 100 photons.
    pub fn new(v: f64, delta: f64) -> Result<Self> {
        Self::with_truncation(v, delta, 100)
    }

    pub fn with_truncation(v: f64, delta: f64, truncation: u32) -> Result<Self> {
        // validates v and delta
        Objective::lzjc(v, delta)?;
        if truncation < 1 {
            return Err(Error::InvalidParameter("truncation must be at least 1".into()));
        }
        Ok(LzjcModel { v, delta, truncation })
    }

    /// `δ_n`.
    pub fn small_delta(&self, n: f64) -> f64 {
        self.delta * self.delta * (n + 1.0) / (4.0 * self.v)
    }

    /// Fock levels `0..=truncation`.
    pub fn grid(&self) -> Vec<f64> {
        (0..=self.truncation).map(f64::from).collect()
    }

    /// `f` as an analytic objective in a continuous photon number.
    pub fn objective(&self) -> Objective {
        Objective::Builtin(crate::objective::Builtin::LzjcF { v: self.v, delta: self.delta })
    }

    /// `f` tabulated on the Fock levels.
    pub fn tabulated(&self) -> Result<Objective> {
        let grid = self.grid();
        let values = grid.iter().map(|&n| lzjc_value(n, self.v, self.delta)).collect::<Result<Vec<_>>>()?;
        Objective::tabulated(grid, values)
    }
}

/// `f(n)` for Fock level `n <= truncation`.
pub fn lzjc_f(n: u32, model: &LzjcModel) -> Result<f64> {
    if n > model.truncation {
        return Err(Error::OutOfDomain(f64::from(n)));
    }
    lzjc_value(f64::from(n), model.v, model.delta)
}

/// Where the domain is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakpointMode {
    /// Sign changes of second differences on the Fock levels.
    #[default]
    Discrete,
    /// Root of `f''` in a continuous photon number.
    Continuous,
}

/// Options for [`lzjc_optimal`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LzjcOptions {
    pub breakpoint: BreakpointMode,
    pub allocation: AllocationOptions,
}

impl Default for LzjcOptions {
    /// Discrete breakpoints, concave part valued at the continuous ratio.
    fn default() -> Self {
        LzjcOptions {
            breakpoint: BreakpointMode::Discrete,
            allocation: AllocationOptions { interior_mode: InteriorMode::Ratio, ..AllocationOptions::default() },
        }
    }
}

/// Optimal cavity state for a given mean photon number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LzjcOptimum {
    /// `|C_n|²`.
    pub distribution: WeightedDistribution,
    pub report: QfiReport,
    pub allocation: AllocationResult,
    /// Interval edges strictly inside `[0, truncation]`.
    pub breakpoints: Vec<f64>,
}

/// Segmentation of `[0, truncation]` used by [`lzjc_optimal`].
pub fn lzjc_plan(model: &LzjcModel, breakpoint: BreakpointMode) -> Result<SegmentPlan> {
    let grid = model.grid();
    let hi = f64::from(model.truncation);
    let f = model.objective();
    match breakpoint {
        BreakpointMode::Discrete => segment_domain(&f, 0.0, hi, InflectionMode::Discrete(&grid)),
        BreakpointMode::Continuous => segment_domain(&f, 0.0, hi, InflectionMode::Continuous)?.with_support(&grid),
    }
}

/// Maximize the Fisher information over cavity states with mean photon
/// number `n_bar`.
pub fn lzjc_optimal(model: &LzjcModel, n_bar: f64, opts: &LzjcOptions) -> Result<LzjcOptimum> {
    let hi = f64::from(model.truncation);
    if !(0.0..=hi).contains(&n_bar) {
        return Err(Error::InfeasibleMean { n_bar, lo: 0.0, hi });
    }
    let plan = lzjc_plan(model, opts.breakpoint)?;
    let breakpoints = plan.intervals.iter().skip(1).map(|iv| iv.lo).collect();
    let allocation = allocate_optimize(&plan, 1.0, n_bar, Direction::Max, &opts.allocation)?;
    let report = QfiReport::new(allocation.value, n_bar);
    Ok(LzjcOptimum { distribution: allocation.distribution.clone(), report, allocation, breakpoints })
}

/// One row of [`lzjc_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LzjcSweepRow {
    pub n_bar: f64,
    pub f_max: f64,
    pub beats_sql: bool,
    pub beats_heisenberg: bool,
}

/// [`lzjc_optimal`] at each mean photon number, in input order.
pub fn lzjc_sweep(model: &LzjcModel, n_bars: &[f64], opts: &LzjcOptions) -> Result<Vec<LzjcSweepRow>> {
    n_bars
        .iter()
        .map(|&n_bar| {
            let r = lzjc_optimal(model, n_bar, opts)?.report;
            Ok(LzjcSweepRow {
                n_bar,
                f_max: r.fisher_information,
                beats_sql: r.beats_sql,
                beats_heisenberg: r.beats_heisenberg,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_is_positive_with_decaying_tail() {
        let m = LzjcModel::new(1.0, 0.3).unwrap();
        let vals: Vec<f64> = (0..=100).map(|n| lzjc_f(n, &m).unwrap()).collect();
        assert!(vals.iter().all(|&v| v > 0.0));
        for n in 90..100u32 {
            // large δ: f ≈ 16 π² δ² e^{-2πδ} / Δ²
            let d = m.small_delta(f64::from(n));
            let asym = 16.0 * std::f64::consts::PI.powi(2) * d * d * (-2.0 * std::f64::consts::PI * d).exp() / 0.09;
            assert!((vals[n as usize] / asym - 1.0).abs() < 1e-3);
            assert!(vals[n as usize + 1] < vals[n as usize]);
        }
        assert!(lzjc_f(101, &m).is_err());
    }

    #[test]
    fn plan_breakpoints() {
        let m = LzjcModel::new(1.0, 0.3).unwrap();
        let p = lzjc_plan(&m, BreakpointMode::Discrete).unwrap();
        assert_eq!(p.intervals[1].lo, 20.0);
        let p = lzjc_plan(&m, BreakpointMode::Continuous).unwrap();
        assert!((p.intervals[1].lo - 20.83).abs() < 0.01);
        assert_eq!(p.intervals[0].bounds(), (0.0, 20.0));
        assert_eq!(p.intervals[1].bounds(), (21.0, 100.0));
    }

    #[test]
    fn boundary_photon_numbers() {
        let m = LzjcModel::new(1.0, 0.3).unwrap();
        let r = lzjc_optimal(&m, 0.0, &LzjcOptions::default()).unwrap();
        assert_eq!(r.distribution.points().len(), 1);
        assert!((r.report.fisher_information - lzjc_f(0, &m).unwrap()).abs() < 1e-12);
        let r = lzjc_optimal(&m, 100.0, &LzjcOptions::default()).unwrap();
        assert!((r.distribution.weight_at(100.0) - 1.0).abs() < 1e-12);
        assert!((r.report.fisher_information - lzjc_f(100, &m).unwrap()).abs() < 1e-12);
        assert!(lzjc_optimal(&m, 100.5, &LzjcOptions::default()).is_err());
    }
}
