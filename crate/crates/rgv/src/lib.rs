//! Random Gilbert-Varshamov (RGV) channel codes over discrete memoryless
//! channels: exact recursive codebook construction at small blocklength,
//! error-exponent computation in primal (type-domain minimization) and dual
//! (Gallager-style maximization) forms, distance-function library, and Monte
//! Carlo / exact error-probability evaluation.
//!
//! The construction draws constant-composition codewords recursively, each
//! new word uniform over the surviving type-class sequences at distance
//! greater than `Δ` from every previous word. Its error exponent under a
//! maximum-metric decoder is a constrained minimization over joint
//! distributions; for additive metrics and distances an equivalent dual
//! maximization exists and both are implemented independently so each can
//! check the other.
//!
//! Everything is in nats.

pub mod codebook;
pub mod distance;
pub mod dual;
mod error;
pub mod exec;
pub mod metric;
mod opt;
pub mod primal;
pub mod prob;
pub mod simulate;
pub mod verify;

pub use error::{Error, Result};
pub use exec::ExecMode;
