//! Simulation library for grant-free random access through a reconfigurable
//! intelligent surface: channel model, training sweep, access policies with
//! SIC decoding, acknowledgments, frame timing and Monte Carlo sweeps.

// negated float comparisons below also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod ack;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiments;
pub mod math;
pub mod protocol;
pub mod training;

pub use error::{Error, Result};
