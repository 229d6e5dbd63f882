//! Constrained continuous optimization instances, three evolutionary solvers
//! (ε-constrained DE, (1+1)-CMA-ES with constraint handling, multi-swarm PSO),
//! evolution of instances that are hard for one solver, and constraint
//! features that explain the differences.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below name the concrete instantiations.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod evolver;
pub mod features;
pub mod instance;
mod linalg;
pub mod problem;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use evolver::{
    crowding_distance, dominates, evolve_multi, evolve_single, nondominated_sort,
    select_discriminating, truncate, Direction, EvolverConfig, FitnessVector, InstanceGenome,
    Orientation, Template,
};
pub use features::{
    coefficient_stddev, feasibility_ratio, feature_vector, pairwise_angle, shortest_distance,
    FeatureVector, MonteCarloConfig,
};
pub use instance::{InstanceError, InstanceFile};
pub use problem::{
    sample_uniform, total_violation, transform_equality, Bounds, Constraint, ConstraintKind,
    Evaluation, Objective, Problem,
};
pub use scalar::{median, Scalar};
pub use solvers::{
    epsilon_compare, feasibility_compare, numerical_gradient, solve, solve_de, solve_es, solve_pso,
    SolveOutcome, SolverConfig, SolverKind,
};

pub type Problem64 = Problem<f64>;
pub type Problem32 = Problem<f32>;
pub type Constraint64 = Constraint<f64>;
pub type Constraint32 = Constraint<f32>;
pub type Bounds64 = Bounds<f64>;
pub type Bounds32 = Bounds<f32>;
pub type SolveOutcome64 = SolveOutcome<f64>;
pub type SolveOutcome32 = SolveOutcome<f32>;
pub type InstanceFile64 = InstanceFile<f64>;
pub type InstanceGenome64 = InstanceGenome<f64>;
pub type InstanceGenome32 = InstanceGenome<f32>;
