//! Experiment harness for the spectral influence bounds: configuration,
//! Monte Carlo drivers, bound validation and report writers. The `hazard`
//! binary is a thin CLI over this library.

pub mod config;
pub mod experiment;
pub mod report;
