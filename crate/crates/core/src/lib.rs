//! Exact statevector simulation and quantum machine-learning regressors for
//! predicting the surface roughness of FDM-printed specimens.
//!
//! The crate is organised bottom-up:
//!
//! * [`statevector`] simulates n-qubit registers gate by gate.
//! * [`dataset`] loads and prepares the print-parameter table.
//! * [`variational`] holds the two parametrized-circuit regressors (QNN and VQC)
//!   together with parameter-shift gradients and gradient-descent training.
//! * [`qforest`] is the forest regressor built on exhaustive split search.
//! * [`metrics`] computes MSE, MAE and explained variance.
//! * [`runner`] wires everything into reproducible batch runs used by the CLI.

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod qforest;
pub mod runner;
pub mod statevector;
pub mod variational;

pub use error::{Error, Result};
