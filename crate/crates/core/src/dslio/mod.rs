//! The `.emod` model format and the operator-expression language.
//!
//! ```text
//! states: 1 2 3
//! sigma: powerset
//! prior: 1=1/2 2=1/4 3=1/4
//! agent alice:
//!   poss: 1 -> {1}; 2 -> {2 3}; 3 -> {2 3}
//!   type: bayes
//! event E = {2 3}
//! ```
//!
//! Agent bodies are the indented lines after `agent NAME:`. Additive types
//! take one row `STATE: KEY=p/q …` per state, keyed by state (or by atom
//! set); capacities take one row `STATE: {…}=p/q …` per state listing every
//! event of the algebra.

mod cursor;
mod expr;
mod model;

pub use expr::{eval_expr, parse_expr, Expr};
pub use model::{model_to_json, parse_model, serialize_doc, serialize_model, ModelDoc, ParseOptions, SerializeOptions};

use serde::Serialize;

use crate::report::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Syntax,
    UnknownState,
    UnknownAgent,
    UnknownEvent,
    Duplicate,
    Missing,
    PriorNotNormalized,
    IncompleteCapacity,
    RationalOutOfRange,
    /// The text is well formed but the model it describes is not.
    Invariant,
}

/// A located error. `line` and `col` are 1-based; `col` counts characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<CheckReport>,
}

impl DslError {
    pub fn new(line: usize, col: usize, kind: ErrorKind, message: impl Into<String>) -> DslError {
        DslError {
            line,
            col,
            kind,
            message: message.into(),
            report: None,
        }
    }

    pub fn is_invariant(&self) -> bool {
        self.kind == ErrorKind::Invariant
    }
}

pub type DslResult<T> = std::result::Result<T, DslError>;
