use thiserror::Error;

use crate::diagnostics::{codes, Diagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("{line}:{col}: unsupported construct: {construct}")]
    Unsupported { line: u32, col: u32, construct: String },
    #[error("{line}:{col}: duplicate {what} `{name}`")]
    Duplicate {
        line: u32,
        col: u32,
        what: &'static str,
        name: String,
    },
    #[error("{line}:{col}: unknown item `{name}`")]
    UnknownItem { line: u32, col: u32, name: String },
    #[error("{line}:{col}: unknown window or block `{name}`")]
    UnknownWindow { line: u32, col: u32, name: String },
}

impl ParseError {
    pub fn syntax(line: u32, col: u32, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    pub fn unsupported(line: u32, col: u32, construct: impl Into<String>) -> Self {
        ParseError::Unsupported {
            line,
            col,
            construct: construct.into(),
        }
    }

    pub fn position(&self) -> (u32, u32) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::Unsupported { line, col, .. }
            | ParseError::Duplicate { line, col, .. }
            | ParseError::UnknownItem { line, col, .. }
            | ParseError::UnknownWindow { line, col, .. } => (*line, *col),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => codes::SYNTAX,
            ParseError::Unsupported { .. } => codes::UNSUPPORTED,
            ParseError::Duplicate { .. } => codes::DUPLICATE_NAME,
            ParseError::UnknownItem { .. } => codes::UNKNOWN_ITEM,
            ParseError::UnknownWindow { .. } => codes::UNKNOWN_WINDOW,
        }
    }

    pub fn to_diagnostic(&self, file: &str) -> Diagnostic {
        let (line, col) = self.position();
        let message = match self {
            ParseError::Syntax { message, .. } => message.clone(),
            ParseError::Unsupported { construct, .. } => format!("unsupported construct: {construct}"),
            ParseError::Duplicate { what, name, .. } => format!("duplicate {what} `{name}`"),
            ParseError::UnknownItem { name, .. } => format!("unknown item `{name}`"),
            ParseError::UnknownWindow { name, .. } => format!("unknown window or block `{name}`"),
        };
        Diagnostic::error(self.code(), message).at(file, line, col)
    }
}
