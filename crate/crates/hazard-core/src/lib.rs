//! Spectral upper bounds on influence in random graphs, with Monte Carlo
//! machinery to validate them.
//!
//! The crate is organized around the hazard matrix `H` of a random-graph
//! model (`h_ij = -ln(1 - p_ij)`) and the spectral radius of its symmetric
//! part, which separates subcritical, critical and supercritical behavior
//! of reachable-set sizes:
//!
//! - [`graph`]: random-graph model specs (homogeneous, rank-one weight,
//!   star, torus, explicit edge lists) and influencer schemes;
//! - [`hazard`]: hazard matrices and their symmetrized spectral radius;
//! - [`gamma`]: the implicit hazard-function equations and their solvers;
//! - [`bounds`]: influence upper bounds per influencer scheme, plus the
//!   epidemic (SIR) reductions and thresholds;
//! - [`percolation`]: giant-component and component-count bounds for bond
//!   and site percolation;
//! - [`sim`]: seeded samplers for graph realizations, percolation, SIR
//!   final sets and cascades, with exact small-instance oracles.

pub mod bounds;
pub mod error;
pub mod gamma;
pub mod graph;
pub mod hazard;
pub mod percolation;
pub mod sim;

pub use error::{Error, Result};
pub use gamma::{gamma, gamma0, gamma1, gamma_upper_estimates, GammaSolution};
pub use graph::{
    erdos_spec, from_edge_list, grid_spec, norros_reittu_spec, random_star_spec, star_spec,
    to_edge_list, GraphSpec, InfluencerScheme, WeightVector,
};
pub use hazard::{
    hazard_matrix, hazard_radius, masked_hazard_matrix, spec_hazard_radius, HazardMatrix,
    HazardSummary,
};
