//! Diagnostics shared by every stage of the chain.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Location {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

/// A stage diagnostic. `code` is stable across releases so scripts can match on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub severity: Severity,
    pub message: String,
    pub location: Option<Location>,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.to_string(),
            severity: Severity::Error,
            message: message.into(),
            location: None,
        }
    }

    pub fn warning(code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            code: code.to_string(),
            severity: Severity::Warning,
            message: message.into(),
            location: None,
        }
    }

    pub fn at(mut self, file: &str, line: u32, col: u32) -> Self {
        self.location = Some(Location {
            file: file.to_string(),
            line,
            col,
        });
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(loc) = &self.location {
            write!(f, "{}:{}:{}: ", loc.file, loc.line, loc.col)?;
        }
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}[{}]: {}", sev, self.code, self.message)
    }
}

/// Stable diagnostic codes.
pub mod codes {
    pub const SYNTAX: &str = "F001";
    pub const UNSUPPORTED: &str = "F002";
    pub const DUPLICATE_NAME: &str = "F003";
    pub const UNKNOWN_ITEM: &str = "F004";
    pub const UNKNOWN_WINDOW: &str = "F005";
    pub const UNDECLARED: &str = "K001";
    pub const KDM_INVARIANT: &str = "K002";
    pub const UNMAPPED_STEREOTYPE: &str = "P001";
    pub const DATA_BLOCK_TRIGGER: &str = "T001";
    pub const EMPTY_TRIGGER: &str = "T002";
    pub const UNRESOLVED_CODE: &str = "T003";
    pub const OO_MAPPING: &str = "O001";
    pub const UNINITIALIZED_READ: &str = "O002";
    pub const UNRESOLVED_REFERENCE: &str = "J001";
    pub const SKELETON_MISSING_MARKER: &str = "J002";
    pub const SKELETON_UNUSED_MARKER: &str = "J003";
    pub const SKELETON_DUPLICATE_MARKER: &str = "J004";
    pub const COVERAGE: &str = "M001";
    pub const IO: &str = "X001";
    pub const CONFIG: &str = "X002";
}
