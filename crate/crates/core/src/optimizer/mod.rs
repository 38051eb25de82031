//! Power allocation and rotation optimization.

pub mod benchmark;
pub mod pso;
pub mod sca;
pub mod simplex;

use thiserror::Error;

use crate::beamforming::RateError;
use crate::channel::ChannelError;
use crate::geometry::GeometryError;

pub use benchmark::{run_benchmark, BenchmarkConfig, OptimizerReport, Scheme};
pub use pso::{run_swarm, FitnessValue, Particle, PenaltyMode, PsoConfig, SwarmOutcome};
pub use sca::{sca_power_allocation, ScaConfig, ScaInit, ScaOutcome};
pub use simplex::{minimize_on_simplex, project_capped_simplex, InnerSolverConfig, SimplexObjective};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("inner solver hit its {iterations}-iteration cap")]
    SubsolverNotConverged { last: Vec<f64>, iterations: usize },
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("no particle produced a finite fitness")]
    NoFeasibleFitness,
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
