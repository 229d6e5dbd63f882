use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::solvers::SolverConfig;

use super::{de_offspring, derive_seed, fen_fitness, EvolverConfig, InstanceGenome, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Harder,
    Easier,
}

impl Direction {
    /// True when fitness `a` is at least as good as `b`.
    fn not_worse(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Harder => a >= b,
            Direction::Easier => a <= b,
        }
    }
}

/// DE/rand/1/bin over genomes with the median FEN of `target` as fitness,
/// maximised for [`Direction::Harder`] and minimised for [`Direction::Easier`].
/// Returns the final population with fitness, best first.
pub fn evolve_single<T: Scalar>(
    template: &Template,
    target: &SolverConfig,
    direction: Direction,
    config: &EvolverConfig,
) -> Result<Vec<(InstanceGenome<T>, f64)>> {
    template.validate()?;
    target.validate()?;
    config.validate()?;
    let np = config.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[u64::MAX]));

    let genomes: Vec<InstanceGenome<T>> =
        (0..np).map(|_| template.random_genome(&mut rng)).collect();
    let mut fitness = evaluate_all(&genomes, target, config, 0)?;
    let mut pop = genomes;

    for generation in 1..=config.generations as u64 {
        let refs: Vec<&InstanceGenome<T>> = pop.iter().collect();
        let trials: Vec<InstanceGenome<T>> = (0..np)
            .map(|i| de_offspring(&refs, i, config, &mut rng))
            .collect();
        let trial_fitness = evaluate_all(&trials, target, config, generation)?;
        for (i, (trial, f)) in trials.into_iter().zip(trial_fitness).enumerate() {
            if direction.not_worse(f, fitness[i]) {
                pop[i] = trial;
                fitness[i] = f;
            }
        }
    }

    let mut ranked: Vec<(InstanceGenome<T>, f64)> = pop.into_iter().zip(fitness).collect();
    ranked.sort_by(|a, b| {
        let ord = a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal);
        match direction {
            Direction::Harder => ord.reverse(),
            Direction::Easier => ord,
        }
    });
    Ok(ranked)
}

fn evaluate_all<T: Scalar>(
    genomes: &[InstanceGenome<T>],
    solver: &SolverConfig,
    config: &EvolverConfig,
    generation: u64,
) -> Result<Vec<f64>> {
    genomes
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            fen_fitness(
                g,
                solver,
                config.repeats,
                derive_seed(config.seed, &[generation, i as u64]),
            )
        })
        .collect()
}
