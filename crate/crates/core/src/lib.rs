//! Likelihood estimation for samples of genetic types under the coalescent
//! with a general finite-alleles mutation model.
//!
//! [`simulator`] runs backward importance-sampling replicates, optionally
//! stopping early at a fixed number of lineages and adding a closed-form
//! correction term. [`estimator`] aggregates replicates and sweeps grids of
//! mutation rates and stopping sizes. [`oracle`] computes exact answers for
//! small samples by dynamic programming over configurations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod exec;
pub mod model;
pub mod oracle;
pub mod seed;
pub mod simulator;

pub use error::{Error, Result};
pub use estimator::{
    aggregate_log_likelihood, estimate, grid_sweep, linear_grid, relative_sd, Estimate,
    EstimateRequest, GridRequest, GridResult, GridRow,
};
pub use exec::Executor;
pub use model::{
    build_multilocus_model, sample_initial_data, simulate_coalescent_sample,
    stationary_distribution, Configuration, LocusSpec, ModelFile, MutationModel, SampleMethod,
    TransitionMatrix,
};
pub use oracle::{LevelDistribution, Likelihood, Oracle, OracleLimits};
pub use simulator::{run_replicate, ReplicateResult, SimulationSettings, WeightScheme};
