//! Core algorithms for a site-percolation laboratory on the triangular lattice.
//!
//! Everything in this crate is deterministic, allocation-only computation:
//! lattice geometry, counter-based sampling, connectivity, event evaluation,
//! Monte Carlo estimators, Wulff-shape geometry, and an exact-enumeration
//! oracle for small regions. IO, file formats, and thread pools live in the
//! companion `perclab` crate.
//!
//! The crate is `no_std` (with `alloc`); estimator campaigns parallelize
//! through the [`runner::BlockRunner`] trait so that a host crate can fan
//! work out over threads while results stay bit-identical to a serial run.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimators;
pub mod events;
pub mod lattice;
pub mod math;
pub mod oracle;
pub mod rng;
pub mod runner;
pub mod sampler;
pub mod wulff;

pub use error::Error;

/// Critical point of site percolation on the triangular lattice.
pub const P_CRITICAL: f64 = 0.5;
