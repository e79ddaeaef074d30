//! Counting prime constellations and estimating their distribution factors.
//!
//! The crate is organised bottom-up:
//!
//! - [`sieve`]: segmented sieve of Eratosthenes over arbitrary ranges.
//! - [`patterns`]: offset patterns, admissibility and the "basic" property.
//! - [`counter`]: exact, parallel, restartable constellation counts.
//! - [`analysis`]: Hardy-Littlewood constants, log-integral densities,
//!   prime distribution factor estimates and rational-factor search.
//! - [`verify`]: end-to-end verification and prediction reports.

pub mod analysis;
pub mod counter;
pub mod error;
pub mod literal;
mod parallel;
pub mod patterns;
pub mod sieve;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use patterns::OffsetPattern;
