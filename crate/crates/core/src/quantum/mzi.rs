//! Phase estimation in a Mach-Zehnder interferometer fed with a
//! path-symmetric state `C(|φ>|0> + |0>|φ>)`.
//!
//! With `p(n) = |<n|φ>|²`, the Fisher information is `Σ p(n) n² / (1 + p(0))`
//! and the total photon number is `Σ p(n) n / (1 + p(0))`. Because the
//! integrand depends on `p(0)` the slope theorems do not apply directly; the
//! NOON state and the vacuum-plus-cap state are instead shown extremal through
//! the sign of the gaps below.

use serde::Serialize;

use super::QfiReport;
use crate::error::{Error, Result};
use crate::problem::WeightedDistribution;

/// Tolerance on the normalization of Fock weights.
const NORM_TOL: f64 = 1e-12;

/// Squared Fock amplitudes of the single-arm state `|φ>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSymmetricState {
    fock_weights: WeightedDistribution,
}

impl PathSymmetricState {
    /// Validate weights on nonnegative integer levels summing to one.
    pub fn new(fock_weights: WeightedDistribution) -> Result<Self> {
        if fock_weights.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if let Some(p) = fock_weights.points().iter().find(|p| p.x < 0.0 || p.x.fract() != 0.0) {
            return Err(Error::OutOfDomain(p.x));
        }
        let total = fock_weights.total();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("Fock weights sum to {total}, not 1")));
        }
        Ok(PathSymmetricState { fock_weights })
    }

    pub fn from_levels<I: IntoIterator<Item = (u32, f64)>>(levels: I) -> Result<Self> {
        Self::new(WeightedDistribution::from_pairs(levels.into_iter().map(|(n, w)| (f64::from(n), w)))?)
    }

    /// Single Fock state `|n>` in each arm.
    pub fn noon(n: u32) -> Self {
        PathSymmetricState { fock_weights: WeightedDistribution::point_mass(f64::from(n), 1.0) }
    }

    pub fn fock_weights(&self) -> &WeightedDistribution {
        &self.fock_weights
    }

    /// `p(0)`.
    pub fn p0(&self) -> f64 {
        self.fock_weights.weight_at(0.0)
    }

    /// Total input photon number `Σ p(n) n / (1 + p(0))`.
    pub fn n_bar_total(&self) -> f64 {
        self.fock_weights.first_moment() / (1.0 + self.p0())
    }

    /// Highest occupied Fock level.
    pub fn max_level(&self) -> u32 {
        self.fock_weights.points().last().map_or(0, |p| p.x as u32)
    }
}

/// Fisher information of the phase for a path-symmetric input.
pub fn mzi_qfi(state: &PathSymmetricState) -> QfiReport {
    let scale = 1.0 + state.p0();
    let f: f64 = state.fock_weights.iter().map(|(n, w)| w * n * n).sum::<f64>() / scale;
    QfiReport::new(f, state.n_bar_total())
}

/// Optimal input with total photon number `n_bar` when levels are capped at
/// `cap`: vacuum with weight `(cap - n_bar) / (cap + n_bar)` and `|cap>` with
/// weight `2 n_bar / (cap + n_bar)`. Its Fisher information is `cap · n_bar`.
pub fn mzi_optimal_state(n_bar: f64, cap: u32) -> Result<(PathSymmetricState, QfiReport)> {
    if !(n_bar >= 0.0) || !n_bar.is_finite() {
        return Err(Error::NegativeMean(n_bar));
    }
    let k = f64::from(cap);
    if k < n_bar || cap == 0 {
        return Err(Error::CapBelowMean { cap, n_bar });
    }
    let vacuum = (k - n_bar) / (k + n_bar);
    let top = 2.0 * n_bar / (k + n_bar);
    let mut weights = WeightedDistribution::point_mass(0.0, vacuum);
    weights.merge(&WeightedDistribution::point_mass(k, top));
    let state = PathSymmetricState { fock_weights: weights };
    let report = mzi_qfi(&state);
    Ok((state, report))
}

/// `n² - F` for the state's own total photon number `n`. Never positive, since
/// the NOON state has the smallest Fisher information at a given `n`.
pub fn mzi_noon_gap(state: &PathSymmetricState) -> f64 {
    let n = state.n_bar_total();
    n * n - mzi_qfi(state).fisher_information
}

/// `cap · n - F = Σ p(m) m (cap - m) / (1 + p(0))`, the shortfall from the
/// optimal capped state. Never negative.
pub fn mzi_gap_to_optimal(state: &PathSymmetricState, cap: u32) -> Result<f64> {
    let max_level = state.max_level();
    if cap < max_level {
        return Err(Error::CapBelowSupport { cap, max_level });
    }
    let n_bar = state.n_bar_total();
    let k = f64::from(cap);
    if k < n_bar {
        return Err(Error::CapBelowMean { cap, n_bar });
    }
    let scale = 1.0 + state.p0();
    Ok(state.fock_weights.iter().map(|(n, w)| w * n / scale * (k - n)).sum())
}
