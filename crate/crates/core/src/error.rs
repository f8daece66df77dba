use thiserror::Error;

use crate::archspec::{ArchError, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicatorError {
    #[error("spec is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("count overflows a 64-bit accumulator")]
    Overflow,
    #[error("batch size must be at least 1")]
    InvalidBatch,
    #[error("inconsistent stream shape at {0}")]
    Shape(String),
    #[error(transparent)]
    Arch(#[from] ArchError),
}
