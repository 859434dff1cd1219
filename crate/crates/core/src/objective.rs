//! Objective functions `F(x)` and their average-slope structure.
//!
//! "Increasing average slope" is discrete convexity: every second divided
//! difference
//!
//! ```text
//! (F(x[i+2]) - F(x[i+1])) / (x[i+2] - x[i+1]) - (F(x[i+1]) - F(x[i])) / (x[i+1] - x[i])
//! ```
//!
//! is nonnegative up to [`SLOPE_TOL`]. "Decreasing" is the concave counterpart.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

/// Absolute tolerance on second divided differences.
pub const SLOPE_TOL: f64 = 1e-10;

/// Width at which continuous inflection bisection stops.
const INFLECTION_XTOL: f64 = 1e-8;

/// Number of scan cells used to bracket continuous inflections.
const INFLECTION_SCAN: usize = 2000;

/// Built-in objective catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Builtin {
    /// `x^exponent`
    Power { exponent: f64 },
    /// Mach-Zehnder integrand `n² / (1 + p0)`.
    MziF { p0: f64 },
    /// Landau-Zener-Jaynes-Cummings Fisher-information integrand in the photon number.
    LzjcF { v: f64, delta: f64 },
}

/// Tabulated values on strictly increasing support points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    xs: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::InvalidParameter(format!("table has {} points but {} values", xs.len(), values.len())));
        }
        if xs.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotonicGrid { index: i + 1 });
            }
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("table value {v} is not finite")));
        }
        Ok(Table { xs, values })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn lookup(&self, x: f64) -> Result<f64> {
        self.xs.binary_search_by(|p| p.total_cmp(&x)).map(|i| self.values[i]).map_err(|_| Error::OutOfDomain(x))
    }

    fn interpolate(&self, x: f64) -> Result<f64> {
        let n = self.xs.len();
        if !(x >= self.xs[0] && x <= self.xs[n - 1]) {
            return Err(Error::OutOfDomain(x));
        }
        let hi = self.xs.partition_point(|&p| p < x);
        if self.xs[hi] == x {
            return Ok(self.values[hi]);
        }
        let lo = hi - 1;
        let t = (x - self.xs[lo]) / (self.xs[hi] - self.xs[lo]);
        Ok(self.values[lo] * (1.0 - t) + self.values[hi] * t)
    }
}

/// The function whose expectation is optimized.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Tabulated(Table),
    Builtin(Builtin),
    Expression(Expr),
}

impl Objective {
    pub fn tabulated(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Table::new(xs, values).map(Objective::Tabulated)
    }

    /// Tabulate `f` on `xs`.
    pub fn tabulate(xs: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Objective::tabulated(xs.to_vec(), xs.iter().map(|&x| f(x)).collect())
    }

    pub fn power(exponent: f64) -> Self {
        Objective::Builtin(Builtin::Power { exponent })
    }

    pub fn mzi(p0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidParameter(format!("p0 = {p0} is not a probability")));
        }
        Ok(Objective::Builtin(Builtin::MziF { p0 }))
    }

    pub fn lzjc(v: f64, delta: f64) -> Result<Self> {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("sweep speed v = {v} must be positive")));
        }
        if delta == 0.0 || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("level splitting delta = {delta} must be nonzero")));
        }
        Ok(Objective::Builtin(Builtin::LzjcF { v, delta }))
    }

    pub fn expression(text: &str) -> Result<Self> {
        Ok(Objective::Expression(expr::parse(text)?))
    }

    /// Value at `x`. Tabulated objectives are defined only on their points.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let v = match self {
            Objective::Tabulated(t) => t.lookup(x)?,
            Objective::Builtin(b) => b.evaluate(x)?,
            Objective::Expression(e) => e.eval(x)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::ExpressionDomain(format!("objective is not finite at x = {x}")))
        }
    }

    /// Value at an arbitrary real `x`: analytic objectives evaluate directly,
    /// tabulated ones interpolate linearly between their points.
    pub fn evaluate_smooth(&self, x: f64) -> Result<f64> {
        match self {
            Objective::Tabulated(t) => t.interpolate(x),
            _ => self.evaluate(x),
        }
    }

    /// Values on every point of `grid`.
    pub fn values_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter().map(|&x| self.evaluate(x)).collect()
    }

    /// Positive affine transform `c·F + b`, tabulated on `grid`.
    pub fn affine_on(&self, grid: &[f64], c: f64, b: f64) -> Result<Objective> {
        let values = self.values_on(grid)?.into_iter().map(|v| c * v + b).collect();
        Objective::tabulated(grid.to_vec(), values)
    }
}

impl Builtin {
    fn evaluate(&self, x: f64) -> Result<f64> {
        match *self {
            Builtin::Power { exponent } => {
                let v = if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
                    x.powi(exponent as i32)
                } else {
                    x.powf(exponent)
                };
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::OutOfDomain(x))
                }
            }
            Builtin::MziF { p0 } => Ok(x * x / (1.0 + p0)),
            Builtin::LzjcF { v, delta } => lzjc_value(x, v, delta),
        }
    }
}

/// `16 π² δ² e^{-2πδ} / (Δ² (1 - e^{-2πδ}))` with `δ = Δ² (n + 1) / (4 v)`.
pub(crate) fn lzjc_value(n: f64, v: f64, delta: f64) -> Result<f64> {
    let d2 = delta * delta;
    let small_delta = d2 * (n + 1.0) / (4.0 * v);
    if !(small_delta > 0.0) {
        return Err(Error::OutOfDomain(n));
    }
    let a = 2.0 * PI * small_delta;
    Ok(16.0 * PI * PI * small_delta * small_delta * (-a).exp() / (d2 * -(-a).exp_m1()))
}

/// Curvature label of a slope-monotone region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Slope {
    /// Average slope grows with `x` (convex).
    Increasing,
    /// Average slope shrinks with `x` (concave).
    Decreasing,
}

impl Slope {
    pub fn flipped(self) -> Slope {
        match self {
            Slope::Increasing => Slope::Decreasing,
            Slope::Decreasing => Slope::Increasing,
        }
    }
}

/// Result of [`classify_slope`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeClass {
    IncreasingSlope,
    DecreasingSlope,
    Mixed { breakpoints: Vec<f64> },
}

impl SlopeClass {
    pub fn is_mixed(&self) -> bool {
        matches!(self, SlopeClass::Mixed { .. })
    }
}

/// Where inflections are searched for.
#[derive(Debug, Clone, PartialEq)]
pub enum InflectionMode<'a> {
    /// Sign changes of second divided differences on these grid points.
    Discrete(&'a [f64]),
    /// Roots of the central-difference second derivative.
    Continuous,
}

/// Slope labels along a grid: the label of the first region plus the grid
/// indices at which the label flips.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SlopeProfile {
    pub first: Slope,
    pub breakpoints: Vec<usize>,
}

/// Second divided differences on consecutive triples of `grid`.
pub(crate) fn second_differences(values: &[f64], grid: &[f64]) -> Vec<f64> {
    (0..grid.len().saturating_sub(2))
        .map(|j| {
            let right = (values[j + 2] - values[j + 1]) / (grid[j + 2] - grid[j + 1]);
            let left = (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
            right - left
        })
        .collect()
}

pub(crate) fn slope_profile(obj: &Objective, grid: &[f64], tol: f64) -> Result<SlopeProfile> {
    let values = obj.values_on(grid)?;
    let diffs = second_differences(&values, grid);
    let signs: Vec<i8> = diffs
        .iter()
        .map(|&d| {
            if d > tol {
                1
            } else if d < -tol {
                -1
            } else {
                0
            }
        })
        .collect();
    let Some(first_nonzero) = signs.iter().copied().find(|&s| s != 0) else {
        return Ok(SlopeProfile { first: Slope::Increasing, breakpoints: Vec::new() });
    };
    let to_slope = |s: i8| if s > 0 { Slope::Increasing } else { Slope::Decreasing };
    let mut current = first_nonzero;
    let mut breakpoints = Vec::new();
    for (j, &s) in signs.iter().enumerate() {
        // flat triples keep the label of their lower neighbour
        if s != 0 && s != current {
            // triple j - 1 is centred on grid[j]; that is the left point of the change
            breakpoints.push(j);
            current = s;
        }
    }
    Ok(SlopeProfile { first: to_slope(first_nonzero), breakpoints })
}

/// Classify the average-slope monotonicity of `obj` on `grid`.
///
/// Grids of length at most two are `IncreasingSlope` by convention, as is any
/// affine objective.
pub fn classify_slope(obj: &Objective, grid: &[f64]) -> Result<SlopeClass> {
    classify_slope_with_tol(obj, grid, SLOPE_TOL)
}

pub fn classify_slope_with_tol(obj: &Objective, grid: &[f64], tol: f64) -> Result<SlopeClass> {
    let profile = slope_profile(obj, grid, tol)?;
    Ok(if profile.breakpoints.is_empty() {
        match profile.first {
            Slope::Increasing => SlopeClass::IncreasingSlope,
            Slope::Decreasing => SlopeClass::DecreasingSlope,
        }
    } else {
        SlopeClass::Mixed { breakpoints: profile.breakpoints.iter().map(|&i| grid[i]).collect() }
    })
}

/// Central-difference second derivative with a step scaled to `x`.
pub(crate) fn second_derivative(obj: &Objective, x: f64) -> Result<f64> {
    let h = f64::EPSILON.powf(0.25) * x.abs().max(1.0);
    let (a, b, c) = (obj.evaluate_smooth(x - h)?, obj.evaluate_smooth(x)?, obj.evaluate_smooth(x + h)?);
    Ok((a - 2.0 * b + c) / (h * h))
}

/// Inflection points of `obj` strictly inside `(lo, hi)`.
pub fn find_inflections(obj: &Objective, lo: f64, hi: f64, mode: InflectionMode<'_>) -> Result<Vec<f64>> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty range [{lo}, {hi}]")));
    }
    match mode {
        InflectionMode::Discrete(grid) => {
            let sub: Vec<f64> = grid.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
            let profile = slope_profile(obj, &sub, SLOPE_TOL)?;
            Ok(profile.breakpoints.into_iter().map(|i| sub[i]).collect())
        }
        InflectionMode::Continuous => continuous_inflections(obj, lo, hi),
    }
}

fn continuous_inflections(obj: &Objective, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let width = hi - lo;
    let at = |i: usize| lo + width * i as f64 / INFLECTION_SCAN as f64;
    let mut roots = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for i in 1..INFLECTION_SCAN {
        let x = at(i);
        let d = second_derivative(obj, x)?;
        if d == 0.0 {
            continue;
        }
        if let Some((xl, dl)) = last {
            if dl.signum() != d.signum() {
                roots.push(bisect(obj, xl, x, dl)?);
            }
        }
        last = Some((x, d));
    }
    Ok(roots)
}

fn bisect(obj: &Objective, mut a: f64, mut b: f64, da: f64) -> Result<f64> {
    let sa = da.signum();
    while b - a > INFLECTION_XTOL {
        let mid = 0.5 * (a + b);
        let dm = second_derivative(obj, mid)?;
        if dm == 0.0 {
            return Ok(mid);
        }
        if dm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
