//! Phase measurements on truncated Fock spaces.
//!
//! Builds phase POVMs as band-limited matrix densities or finite effect
//! sequences, verifies normalization, positivity and phase-shift covariance,
//! and analyses extremality: discrete POVMs, covariant kernels, and the
//! convex decompositions of the truncated canonical phase measurement.

pub mod cli;
pub mod exec;
pub mod extremality;
pub mod fock;
pub mod numerics;
pub mod povm;

pub use exec::Exec;
