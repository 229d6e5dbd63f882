//! Multi-swarm PSO with Gaussian attraction coefficients.
//!
//! Every iteration the swarm is shuffled and cut into sub-swarms of
//! `subswarm_size`. Each particle moves by
//! `|N(0,1)| (pbest - x) + |N(0,1)| (lbest - x)` (drawn per component), where
//! `lbest` is the best personal best in its sub-swarm. Particles and bests are
//! ranked with the feasibility rules.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::problem::Problem;
use crate::scalar::Scalar;

use super::budget::{Meter, Stop};
use super::{feas_cmp, SolveOutcome, SolverConfig, SolverKind};

struct Particle<T> {
    x: Vec<T>,
    best_x: Vec<T>,
    best_fit: (T, T),
}

pub fn solve_pso<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveOutcome<T>> {
    config.expect_kind(SolverKind::Pso)?;
    let mut meter = Meter::new(problem, config.max_fen, config.target_gap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let _ = run(&mut meter, config, &mut rng);
    Ok(meter.finish())
}

fn run<T: Scalar>(
    meter: &mut Meter<'_, T>,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(), Stop> {
    let problem = meter.problem();
    let bounds = problem.bounds();
    let n = problem.dimension();
    let size = config.population_size;
    let sub = config.pso.subswarm_size;

    let mut swarm = Vec::with_capacity(size);
    for _ in 0..size {
        let x = bounds.sample(rng);
        let fit = meter.eval(&x)?;
        swarm.push(Particle {
            best_x: x.clone(),
            x,
            best_fit: fit,
        });
    }

    let mut order: Vec<usize> = (0..size).collect();
    let mut leader = vec![0usize; size];
    loop {
        order.shuffle(rng);
        for group in order.chunks(sub) {
            let best = group
                .iter()
                .copied()
                .min_by(|&a, &b| feas_cmp(swarm[a].best_fit, swarm[b].best_fit))
                .expect("sub-swarms are non-empty");
            for &i in group {
                leader[i] = best;
            }
        }
        for &i in &order {
            let lbest = swarm[leader[i]].best_x.clone();
            let p = &mut swarm[i];
            for d in 0..n {
                let r1 = T::standard_normal(rng).abs();
                let r2 = T::standard_normal(rng).abs();
                let v = r1 * (p.best_x[d] - p.x[d]) + r2 * (lbest[d] - p.x[d]);
                p.x[d] = (p.x[d] + v).max(bounds.lower()[d]).min(bounds.upper()[d]);
            }
            let fit = meter.eval(&p.x)?;
            if feas_cmp(fit, p.best_fit).is_le() {
                p.best_fit = fit;
                p.best_x.copy_from_slice(&p.x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Constraint, Objective};

    #[test]
    fn indivisible_swarm_is_a_contract_violation() {
        let p = Problem::<f64>::with_default_bounds(Objective::Sphere, 2, vec![]).unwrap();
        let mut cfg = SolverConfig::paper(SolverKind::Pso);
        cfg.population_size = 60;
        assert!(solve_pso(&p, &cfg, 1).is_err());
    }

    #[test]
    fn empty_feasible_set_uses_whole_budget() {
        let c = Constraint::linear(vec![1.0, 0.0], 10.0).unwrap();
        let p = Problem::with_default_bounds(Objective::Sphere, 2, vec![c]).unwrap();
        let mut cfg = SolverConfig::desk(SolverKind::Pso);
        cfg.max_fen = 2000;
        let out = solve_pso(&p, &cfg, 4).unwrap();
        assert!(!out.solved);
        assert_eq!(out.fen, 2000);
    }
}
