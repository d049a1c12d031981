//! Inhomogeneous random K-out graphs.
//!
//! Each of `n` nodes is assigned class `i` with probability `mu_i` and then
//! selects `K_i` distinct other nodes uniformly at random; two nodes are
//! adjacent when either selected the other. This crate samples such graphs,
//! measures their connectivity by deterministic parallel Monte Carlo, and
//! evaluates exact finite-`n` and asymptotic connectivity bounds.

pub mod analysis;
pub mod cli;
pub mod dsu;
pub mod dump;
pub mod experiment;
pub mod inequalities;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod output;
pub mod rng;
pub mod sampler;
pub mod theory;

pub use analysis::{census, count_isolated_pairs, ComponentCensus};
pub use experiment::{run, ExperimentConfig, ExperimentError, ExperimentResult};
pub use model::{k_avg, validate, ClassDistribution, KScaling, ModelError, ModelParams};
pub use oracle::{exact_connectivity, ExactResult, ExactValue, OracleError};
pub use rng::SeedSpec;
pub use sampler::{build_graph, sample_classes, sample_selections, KOutGraph};
pub use theory::{bound_report, BoundReport, TheoryError};
