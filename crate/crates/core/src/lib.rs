//! Local differential privacy frequency oracles for multidimensional data,
//! together with the attacks that exploit them.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! parts: every randomized routine takes an explicit RNG handle, so the same
//! seed always reproduces the same report stream regardless of how callers
//! schedule work. Dataset loading, configuration and the command-line harness
//! live in the `mdldp` crate.
//!
//! Module map:
//!
//! - [`oracle`]: GRR, OLH, ω-SS, SUE and OUE with the shared unbiased estimator.
//! - [`budget`]: conversions between ε-LDP and (𝒰, α)-PIE budgets.
//! - [`multidim`]: SPL, SMP, RS+FD and RS+RFD collection of `d` attributes.
//! - [`adversary`]: plausible-deniability attacks, re-identification and
//!   sampled-attribute inference.
//! - [`data`]: in-memory datasets, frequency tables, priors and utility metrics.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod budget;
pub mod data;
mod error;
pub mod multidim;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use oracle::{AttributeDomain, Protocol, ProtocolParams, SanitizedReport};
