//! Deterministic generator and exact analytics for the family of weighted
//! networks grown by repeated extended corona products with a unit edge,
//! followed by multiplicative reinforcement of the pre-existing edges.
//!
//! Every closed-form property has a measured or independently computed
//! counterpart so the two can be checked against each other.

pub mod analytics;
pub mod census;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod output;
pub mod params;
pub mod spectra;
pub mod verify;

pub use census::{census, expected_census, Census};
pub use error::{CoronaError, Result};
pub use graph::{
    evolve, extended_corona, generate, generate_each, reinforce_weights, VertexId,
    WeightedGraph,
};
pub use params::ModelParams;

/// Exact rational used for clustering coefficients.
pub type Rational = num_rational::Ratio<u128>;
