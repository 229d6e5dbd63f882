//! DEMO: differential evolution for multi-objective optimisation.
//!
//! Offspring replace their parent when they dominate it, are dropped when the
//! parent dominates them, and are otherwise appended to the population, where
//! they can serve as donors for the rest of the generation. After each
//! generation the population is cut back with non-dominated sorting and
//! crowding distance.
//!
//! Objective 0 is the target solver's FEN (maximised); the remaining objectives
//! are the other solvers' FEN (minimised).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::scalar::Scalar;
use crate::solvers::SolverConfig;

use super::pareto::{dominates, nondominated_sort, truncate, FitnessVector, Orientation};
use super::{de_offspring, derive_seed, fen_fitness, EvolverConfig, InstanceGenome, Template};

pub fn evolve_multi<T: Scalar>(
    template: &Template,
    target: &SolverConfig,
    others: &[SolverConfig],
    config: &EvolverConfig,
) -> Result<Vec<(InstanceGenome<T>, FitnessVector)>> {
    if others.is_empty() {
        return Err(contract("DEMO needs at least one other solver"));
    }
    template.validate()?;
    config.validate()?;
    let solvers: Vec<&SolverConfig> = std::iter::once(target).chain(others).collect();
    for s in &solvers {
        s.validate()?;
    }
    let np = config.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, &[u64::MAX]));

    let evaluate = |g: &InstanceGenome<T>, generation: u64, index: u64| -> Result<FitnessVector> {
        let values = solvers
            .par_iter()
            .enumerate()
            .map(|(k, s)| {
                fen_fitness(
                    g,
                    s,
                    config.repeats,
                    derive_seed(config.seed, &[generation, index, k as u64]),
                )
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut orientation = vec![Orientation::Minimize; values.len()];
        orientation[0] = Orientation::Maximize;
        FitnessVector::new(values, orientation)
    };

    let genomes: Vec<InstanceGenome<T>> =
        (0..np).map(|_| template.random_genome(&mut rng)).collect();
    let fitness = genomes
        .par_iter()
        .enumerate()
        .map(|(i, g)| evaluate(g, 0, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let mut pop: Vec<(InstanceGenome<T>, FitnessVector)> =
        genomes.into_iter().zip(fitness).collect();

    for generation in 1..=config.generations as u64 {
        for i in 0..np {
            let refs: Vec<&InstanceGenome<T>> = pop.iter().map(|(g, _)| g).collect();
            let child = de_offspring(&refs, i, config, &mut rng);
            let fv = evaluate(&child, generation, i as u64)?;
            if dominates(&fv, &pop[i].1)? {
                pop[i] = (child, fv);
            } else if !dominates(&pop[i].1, &fv)? {
                pop.push((child, fv));
            }
        }
        if pop.len() > np {
            let fvs: Vec<FitnessVector> = pop.iter().map(|(_, f)| f.clone()).collect();
            let keep = truncate(&fvs, np)?;
            let mut slots: Vec<Option<_>> = pop.into_iter().map(Some).collect();
            pop = keep
                .into_iter()
                .map(|k| slots[k].take().expect("indices are unique"))
                .collect();
        }
        debug_assert_eq!(pop.len(), np);
    }

    let fvs: Vec<FitnessVector> = pop.iter().map(|(_, f)| f.clone()).collect();
    let first = nondominated_sort(&fvs)?.swap_remove(0);
    let mut slots: Vec<Option<_>> = pop.into_iter().map(Some).collect();
    Ok(first
        .into_iter()
        .map(|k| slots[k].take().expect("indices are unique"))
        .collect())
}

/// Index of the front member with the largest `FEN(target) - max FEN(other)`;
/// ties go to the larger target FEN, then to the lower index.
pub fn select_discriminating<T>(front: &[(InstanceGenome<T>, FitnessVector)]) -> Result<usize> {
    if front.is_empty() {
        return Err(contract("cannot select from an empty front"));
    }
    let key = |fv: &FitnessVector| {
        let target = fv.values[0];
        let others = fv.values[1..]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (target - others, target)
    };
    let mut best = 0;
    for i in 1..front.len() {
        let (gap, target) = key(&front[i].1);
        let (best_gap, best_target) = key(&front[best].1);
        if gap > best_gap || (gap == best_gap && target > best_target) {
            best = i;
        }
    }
    Ok(best)
}
