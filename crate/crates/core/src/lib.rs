//! Numerical laboratory for `S(t) = (1/π) Im log ζ(1/2 + it)`.
//!
//! The crate computes S on the critical line with certified zero counts,
//! smooths it against test functions whose Fourier transforms have compact
//! support, compares the smoothed values with Dirichlet sums over primes,
//! and estimates tail probabilities and exponential moments by Monte Carlo.

pub mod dd;
pub mod error;
pub mod kernel;
pub mod quad;
pub mod report;
pub mod rng;
pub mod rszeta;
pub mod zerotable;
pub mod averaging;
pub mod primesum;
pub mod stats;
pub mod cli;

pub use error::{Error, Result};
