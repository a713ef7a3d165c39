use std::fmt;

use thiserror::Error;

use crate::validate::Diagnostic;

/// 1-based position of a construct in grammar source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    /// Length in characters.
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourceSpan {
            line,
            column,
            length,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grammar has no rules")]
    EmptyGrammar,

    #[error("{}duplicate rule `{name}`", span.map(|s| format!("{s}: ")).unwrap_or_default())]
    DuplicateRule {
        name: String,
        span: Option<SourceSpan>,
    },

    #[error("{span}: {message}")]
    Syntax { message: String, span: SourceSpan },

    #[error("unknown start symbol `{0}`")]
    UnknownStart(String),

    #[error("invalid grammar: {}", summarize(.0))]
    Invalid(Vec<Diagnostic>),
}

fn summarize(diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
