//! Serialization: the fact-style text format, a structured JSON document,
//! and a MiniZinc model emitter with a small semantic checker for it.

mod checker;
mod facts;
mod minizinc;
mod structured;

use thiserror::Error;

use crate::model::ModelError;

pub use checker::{check_minizinc, ModelPoint};
pub use facts::{emit_facts, emit_schedule_facts, parse_facts, parse_schedule_facts};
pub use minizinc::{export_minizinc, Objective};
pub use structured::{from_structured, to_structured, StructuredInstance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IoError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        IoError::Parse { line, message: message.into() }
    }
}
