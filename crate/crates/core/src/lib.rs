//! Gaussian phase-space model of reading out an atomic quantum memory with
//! two light beams in a single passage.
//!
//! - [`gaussian`]: states, symplectic maps and Gaussian channels
//! - [`temporal`]: sampled pulse shapes and mode projectors
//! - [`protocols`]: single- and two-cell read-out pipelines
//! - [`optimize`]: optimal couplings, gains and squeezing, closed form and numeric
//! - [`oracle`]: time-sliced brute-force cross-check

pub mod error;
pub mod gaussian;
pub mod optimize;
pub mod oracle;
pub mod protocols;
pub mod temporal;

pub use error::{Error, Result};
