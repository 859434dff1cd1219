//! Report and CSV rendering.

use std::fmt::Write as _;
use std::path::Path;

use extremal_core::WeightedDistribution;
use serde::Serialize;

use crate::error::CliError;

/// Render `x` with 12 significant digits, trailing zeros trimmed, switching
/// to exponent form outside `[1e-5, 1e12)`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Comma-separated table with a header row and `\n` line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Num(x) => sig12(*x),
                Cell::Bool(b) => b.to_string(),
            })
            .collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn distribution(d: &WeightedDistribution) -> Self {
        let mut csv = Csv::new(&["support", "weight"]);
        for (x, w) in d.iter() {
            csv.row(&[Cell::Num(x), Cell::Num(w)]);
        }
        csv
    }

    #[cfg(test)]
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, &self.text).map_err(|e| CliError::input("--csv", format!("{}: {e}", path.display())))
    }
}

pub enum Cell {
    Num(f64),
    Bool(bool),
}

/// Top-level JSON document: tool identity, command, echoed input, payload.
#[derive(Serialize)]
pub struct Report<I: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: I,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub result: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
}

impl<I: Serialize, R: Serialize> Report<I, R> {
    pub fn new(command: &'static str, input: I, result: R) -> Self {
        Report {
            tool: "extremal",
            version: env!("CARGO_PKG_VERSION"),
            command,
            input,
            notice: None,
            result,
            oracle: None,
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// How a solver value compares with the vertex-enumeration oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    pub value: f64,
    pub solver_value: f64,
    pub relative_error: f64,
    /// `"equal"` demands agreement within `tolerance`; `"bound"` only demands
    /// that the solver value does not pass the oracle's extreme.
    pub mode: &'static str,
    pub tolerance: f64,
    pub agreement: bool,
}

impl OracleCheck {
    pub fn equal(oracle: f64, solver: f64, tolerance: f64) -> Self {
        let rel = rel_err(oracle, solver);
        OracleCheck {
            value: oracle,
            solver_value: solver,
            relative_error: rel,
            mode: "equal",
            tolerance,
            agreement: rel <= tolerance,
        }
    }

    /// `sign` is +1 for maximization, -1 for minimization.
    pub fn bound(oracle: f64, solver: f64, sign: f64, tolerance: f64) -> Self {
        let rel = rel_err(oracle, solver);
        let excess = sign * (solver - oracle) / oracle.abs().max(1.0);
        OracleCheck {
            value: oracle,
            solver_value: solver,
            relative_error: rel,
            mode: "bound",
            tolerance,
            agreement: excess <= tolerance,
        }
    }

    pub fn into_result(self) -> Result<Self, CliError> {
        if self.agreement {
            Ok(self)
        } else {
            Err(CliError::mismatch(format!(
                "solver value {} disagrees with oracle value {} (relative error {:e})",
                self.solver_value, self.value, self.relative_error
            )))
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(25.824174670653), "25.8241746707");
        assert_eq!(sig12(100.0), "100");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(1.0 / 400.0), "0.0025");
        assert_eq!(sig12(1.23456789e-7), "1.23456789e-7");
        assert_eq!(sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(sig12(0.0), "0");
    }

    #[test]
    fn csv_layout() {
        let d = WeightedDistribution::from_pairs([(2.0, 0.6), (3.0, 0.4)]).unwrap();
        assert_eq!(Csv::distribution(&d).as_str(), "support,weight\n2,0.6\n3,0.4\n");
    }

    #[test]
    fn oracle_checks() {
        assert!(OracleCheck::equal(2.0, 2.0 + 1e-12, 1e-9).agreement);
        assert!(!OracleCheck::equal(2.0, 2.1, 1e-9).agreement);
        assert!(OracleCheck::bound(25.83, 25.82, 1.0, 1e-9).agreement);
        assert!(!OracleCheck::bound(25.83, 25.84, 1.0, 1e-9).agreement);
        assert!(OracleCheck::bound(1.0, 1.5, -1.0, 1e-9).agreement);
    }
}
