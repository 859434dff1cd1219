use std::fmt;

use extremal_core::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Unreadable or invalid input. Exit 2.
    Input,
    /// Valid input describing an infeasible problem. Exit 3.
    Infeasible,
    /// Solver and oracle disagree. Exit 4.
    Mismatch,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: Kind,
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn input(field: &str, message: impl Into<String>) -> Self {
        CliError { kind: Kind::Input, field: Some(field.to_string()), message: message.into() }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Mismatch, field: None, message: message.into() }
    }

    pub fn from_core(e: Error) -> Self {
        let kind = match e {
            Error::InfeasibleMean { .. }
            | Error::NoFeasibleAllocation(_)
            | Error::CapBelowMean { .. }
            | Error::CapBelowSupport { .. } => Kind::Infeasible,
            _ => Kind::Input,
        };
        CliError { kind, field: None, message: e.to_string() }
    }

    pub fn with_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_string());
        self
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Input => 2,
            Kind::Infeasible => 3,
            Kind::Mismatch => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}
