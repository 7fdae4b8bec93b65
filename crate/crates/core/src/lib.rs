//! Numerical laboratory for continuous-variable entanglement purification by
//! total-photon-number measurement.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod loss;
pub mod purification;
pub mod qnd;
pub mod rng;
pub mod stats;
pub mod table;

pub use error::{Error, Result};
