//! Front-end error types.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SyntaxError {
    #[error("lex error at {line}:{col}: {message}")]
    Lex { line: u32, col: u32, message: String },

    #[error("parse error at {line}:{col}: expected {expected}, found {found}")]
    Parse { line: u32, col: u32, expected: String, found: String },

    #[error("unsupported construct at {line}:{col}: {construct}")]
    Unsupported { line: u32, col: u32, construct: String },
}

impl SyntaxError {
    pub fn position(&self) -> (u32, u32) {
        match self {
            SyntaxError::Lex { line, col, .. }
            | SyntaxError::Parse { line, col, .. }
            | SyntaxError::Unsupported { line, col, .. } => (*line, *col),
        }
    }
}

/// Non-fatal report attached to a skipped method or member.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl From<&SyntaxError> for Diagnostic {
    fn from(err: &SyntaxError) -> Self {
        let (line, col) = err.position();
        Diagnostic { line, col, message: err.to_string() }
    }
}
