//! Three constrained solvers behind one budget-metered interface.
//!
//! Each run charges one function evaluation (FEN) per point evaluated, objective
//! and constraints together, and stops at the first point that is feasible with
//! objective value at most `target_gap`. Unsolved runs report `fen = max_fen`.

mod budget;
mod compare;
mod de;
mod es;
mod gradient;
mod pso;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use compare::{epsilon_compare, feasibility_compare, Fitness};
pub use de::solve_de;
pub use es::solve_es;
pub use gradient::numerical_gradient;
pub use pso::solve_pso;

pub(crate) use compare::{eps_cmp, feas_cmp};

use crate::error::{contract, Result};
use crate::problem::Problem;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    De,
    Es,
    Pso,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::De, SolverKind::Es, SolverKind::Pso];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::De => "de",
            SolverKind::Es => "es",
            SolverKind::Pso => "pso",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "de" => Ok(SolverKind::De),
            "es" => Ok(SolverKind::Es),
            "pso" => Ok(SolverKind::Pso),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

/// ε-constrained differential evolution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeParams {
    pub crossover_rate: f64,
    pub scale_factor: f64,
    /// Quantile of the initial population (by violation) that sets ε(0).
    pub epsilon_quantile: f64,
    /// Fraction of the generation budget after which ε is 0.
    pub epsilon_cutoff_fraction: f64,
    pub epsilon_exponent: f64,
    /// Probability of a gradient repair step on an infeasible trial point.
    pub gradient_repair_prob: f64,
    pub gradient_step: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        Self {
            crossover_rate: 0.5,
            scale_factor: 0.5,
            epsilon_quantile: 0.2,
            epsilon_cutoff_fraction: 0.2,
            epsilon_exponent: 5.0,
            gradient_repair_prob: 0.2,
            gradient_step: 1e-6,
        }
    }
}

/// (1+1)-ES parameters. `None` resolves to the dimension-dependent default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsParams {
    /// Smoothing constant of the constraint vectors, default `1/(n+2)`.
    pub constraint_smoothing: Option<f64>,
    /// Covariance shrink factor along violated directions, default `0.1/(n+2)`.
    pub constraint_shrink: Option<f64>,
    pub target_success_rate: f64,
    /// Step size damping, default `1 + n/2`.
    pub damping: Option<f64>,
    /// Initial step size relative to the mean box width.
    pub initial_step_fraction: f64,
}

impl Default for EsParams {
    fn default() -> Self {
        Self {
            constraint_smoothing: None,
            constraint_shrink: None,
            target_success_rate: 2.0 / 11.0,
            damping: None,
            initial_step_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub subswarm_size: usize,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { subswarm_size: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub kind: SolverKind,
    pub population_size: usize,
    pub max_fen: u64,
    /// Solved when feasible and `f(x) <= target_gap`.
    pub target_gap: f64,
    #[serde(default)]
    pub de: DeParams,
    #[serde(default)]
    pub es: EsParams,
    #[serde(default)]
    pub pso: PsoParams,
}

impl SolverConfig {
    /// Full-scale defaults: 300K evaluations, DE population 100, PSO swarm 64 in sub-swarms of 8.
    pub fn paper(kind: SolverKind) -> Self {
        let population_size = match kind {
            SolverKind::De => 100,
            SolverKind::Es => 1,
            SolverKind::Pso => 64,
        };
        Self {
            kind,
            population_size,
            max_fen: 300_000,
            target_gap: 1e-2,
            de: DeParams::default(),
            es: EsParams::default(),
            pso: PsoParams::default(),
        }
    }

    /// Reduced budget for minute-scale experiments.
    pub fn desk(kind: SolverKind) -> Self {
        let population_size = match kind {
            SolverKind::De => 40,
            SolverKind::Es => 1,
            SolverKind::Pso => 32,
        };
        Self {
            population_size,
            max_fen: 20_000,
            ..Self::paper(kind)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(contract("population_size must be positive"));
        }
        if self.max_fen < self.population_size as u64 {
            return Err(contract("max_fen must be >= population_size"));
        }
        if !(self.target_gap > 0.0) {
            return Err(contract("target_gap must be > 0"));
        }
        match self.kind {
            SolverKind::De => {
                let p = &self.de;
                if self.population_size < 4 {
                    return Err(contract("DE needs population_size >= 4"));
                }
                if !(0.0..=1.0).contains(&p.crossover_rate) {
                    return Err(contract("crossover_rate must lie in [0, 1]"));
                }
                if !(p.scale_factor > 0.0) {
                    return Err(contract("scale_factor must be > 0"));
                }
                if !(p.epsilon_quantile > 0.0 && p.epsilon_quantile < 1.0) {
                    return Err(contract("epsilon_quantile must lie in (0, 1)"));
                }
                if !(0.0..=1.0).contains(&p.epsilon_cutoff_fraction) {
                    return Err(contract("epsilon_cutoff_fraction must lie in [0, 1]"));
                }
                if !(0.0..=1.0).contains(&p.gradient_repair_prob) {
                    return Err(contract("gradient_repair_prob must lie in [0, 1]"));
                }
                if !(p.gradient_step > 0.0) {
                    return Err(contract("gradient_step must be > 0"));
                }
            }
            SolverKind::Es => {
                let p = &self.es;
                if !(p.target_success_rate > 0.0 && p.target_success_rate < 1.0) {
                    return Err(contract("target_success_rate must lie in (0, 1)"));
                }
                if !(p.initial_step_fraction > 0.0) {
                    return Err(contract("initial_step_fraction must be > 0"));
                }
                for v in [p.constraint_smoothing, p.constraint_shrink]
                    .into_iter()
                    .flatten()
                {
                    if !(v > 0.0 && v < 1.0) {
                        return Err(contract("ES smoothing constants must lie in (0, 1)"));
                    }
                }
                if p.damping.is_some_and(|d| !(d > 0.0)) {
                    return Err(contract("damping must be > 0"));
                }
            }
            SolverKind::Pso => {
                let ns = self.pso.subswarm_size;
                if ns == 0 || !self.population_size.is_multiple_of(ns) {
                    return Err(contract(format!(
                        "swarm size {} is not divisible by sub-swarm size {ns}",
                        self.population_size
                    )));
                }
            }
        }
        Ok(())
    }

    fn expect_kind(&self, kind: SolverKind) -> Result<()> {
        if self.kind != kind {
            return Err(contract(format!("config is for {}, not {kind}", self.kind)));
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SolveOutcome<T> {
    /// Evaluations consumed; `max_fen` when unsolved.
    pub fen: u64,
    pub solved: bool,
    pub best_x: Vec<T>,
    pub best_f: T,
    pub best_violation: T,
}

/// Runs the solver selected by `config.kind`.
pub fn solve<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveOutcome<T>> {
    match config.kind {
        SolverKind::De => solve_de(problem, config, seed),
        SolverKind::Es => solve_es(problem, config, seed),
        SolverKind::Pso => solve_pso(problem, config, seed),
    }
}
