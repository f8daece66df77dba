//! Static cost analysis for neural architectures.
//!
//! Architectures are described declaratively ([`archspec`]), turned into
//! analytical cost indicators ([`indicators`], [`latency`], [`footprint`])
//! and compared across model sets ([`analysis`]) to expose cases where one
//! indicator's ranking disagrees with another's.

pub mod analysis;
pub mod archlib;
pub mod archspec;
mod cost_tree;
mod error;
pub mod footprint;
pub mod indicators;
pub mod latency;

pub use cost_tree::{ADD_OPS, GELU_OPS, LAYERNORM_OPS, SOFTMAX_OPS};
pub use error::IndicatorError;
