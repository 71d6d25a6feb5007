//! Text formats: architecture files, refinement scripts, run reports and DOT.

mod arch;
pub mod corpus;
mod dot;
pub mod expr;
mod lexer;
mod run;
mod script;

use std::fmt;

use thiserror::Error;

pub use arch::{TableDecl, canonical_text, load_architecture, parse_architecture, parse_architecture_with, print_architecture};
pub use dot::render_dot;
pub use run::{run_script, RunReport, StepOutcome, StepRecord, Verdict as RunVerdict};
pub use script::{parse_script, InvariantDecl, InvariantSpec, ScriptDocument, ScriptStep, StepBody};

/// A located message; lines and columns start at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

fn join(ds: &[Diagnostic]) -> String {
    let v: Vec<String> = ds.iter().map(|d| d.to_string()).collect();
    v.join("\n")
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("{}", join(.0))]
    Syntax(Vec<Diagnostic>),
    /// The file parses but describes an inconsistent architecture.
    #[error("{}", join(.0))]
    Inconsistent(Vec<Diagnostic>),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
}

impl FormatError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            FormatError::Syntax(d) | FormatError::Inconsistent(d) => d,
            FormatError::Io { .. } => &[],
        }
    }
}

impl From<Diagnostic> for FormatError {
    fn from(d: Diagnostic) -> Self {
        FormatError::Syntax(vec![d])
    }
}
