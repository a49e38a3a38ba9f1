//! Average fidelity of qubit teleportation when both the shared resource and
//! the source of input states are noisy.
//!
//! The crate evaluates the singlet-fraction objective of the restricted
//! protocol class (maximally entangled measurement basis plus unitary
//! corrections), optimizes it jointly over basis and corrections, provides the
//! standard and source-agnostic baselines, and cross-checks everything against
//! an explicit three-qubit circuit simulation.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod optimizer;
pub mod oracle;
pub mod protocol;
pub mod qcore;
pub mod rng;

pub use error::{Error, Result};
pub use rng::Seed;
