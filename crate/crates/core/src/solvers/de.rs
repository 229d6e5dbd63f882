//! ε-constrained DE/rand/1/bin with an optional gradient repair step.
//!
//! The ε level starts at the violation of the `epsilon_quantile` individual of
//! the initial population and decays as `ε0 (1 - t/Tc)^cp` until generation
//! `Tc`, after which it is 0 and selection reduces to the feasibility rules.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::problem::Problem;
use crate::scalar::Scalar;

use super::budget::{Meter, Stop};
use super::gradient::repair_step;
use super::{eps_cmp, SolveOutcome, SolverConfig, SolverKind};

struct Member<T> {
    x: Vec<T>,
    fit: (T, T),
}

pub fn solve_de<T: Scalar>(
    problem: &Problem<T>,
    config: &SolverConfig,
    seed: u64,
) -> Result<SolveOutcome<T>> {
    config.expect_kind(SolverKind::De)?;
    let mut meter = Meter::new(problem, config.max_fen, config.target_gap);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Both stop reasons end the run; the meter holds the outcome.
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
    let np = config.population_size;
    let p = &config.de;
    let cr = p.crossover_rate;
    let f = T::lit(p.scale_factor);
    let h = T::lit(p.gradient_step);

    let mut pop = Vec::with_capacity(np);
    for _ in 0..np {
        let x = bounds.sample(rng);
        let fit = meter.eval(&x)?;
        pop.push(Member { x, fit });
    }

    let mut by_violation: Vec<T> = pop.iter().map(|m| m.fit.1).collect();
    by_violation.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let eps0 = by_violation[((p.epsilon_quantile * np as f64) as usize).min(np - 1)];
    let generations = ((config.max_fen.saturating_sub(np as u64)) / np as u64).max(1) as f64;
    let cutoff = (p.epsilon_cutoff_fraction * generations).round();

    let mut trial = vec![T::zero(); n];
    for t in 0u64.. {
        let eps = if (t as f64) < cutoff {
            eps0 * T::lit((1.0 - t as f64 / cutoff).powf(p.epsilon_exponent))
        } else {
            T::zero()
        };
        let mut next: Vec<Option<Member<T>>> = (0..np).map(|_| None).collect();
        for i in 0..np {
            let donors = pick_donors(rng, np, i);
            let (a, b, c) = (&pop[donors[0]].x, &pop[donors[1]].x, &pop[donors[2]].x);
            let target = &pop[i].x;
            let forced = rng.random_range(0..n);
            for j in 0..n {
                trial[j] = if j == forced || rng.random::<f64>() < cr {
                    a[j] + f * (b[j] - c[j])
                } else {
                    target[j]
                };
                // Out-of-range components land halfway between the parent and the violated bound.
                let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
                if trial[j] < lo {
                    trial[j] = (target[j] + lo) / T::lit(2.0);
                } else if trial[j] > hi {
                    trial[j] = (target[j] + hi) / T::lit(2.0);
                }
            }
            let (fv, phi, g) = meter.eval_full(&trial)?;
            let mut cand = Member {
                x: trial.clone(),
                fit: (fv, phi),
            };
            if phi > T::zero() && rng.random::<f64>() < p.gradient_repair_prob {
                if let Some(y) = repair_step(meter, &trial, &g, h)? {
                    let fit = meter.eval(&y)?;
                    if eps_cmp(fit, cand.fit, eps).is_le() {
                        cand = Member { x: y, fit };
                    }
                }
            }
            if eps_cmp(cand.fit, pop[i].fit, eps).is_le() {
                next[i] = Some(cand);
            }
        }
        for (slot, replacement) in pop.iter_mut().zip(next) {
            if let Some(m) = replacement {
                *slot = m;
            }
        }
    }
    unreachable!("the meter ends every run")
}

/// Three distinct indices, all different from `exclude`.
fn pick_donors<R: Rng>(rng: &mut R, np: usize, exclude: usize) -> [usize; 3] {
    let picked = sample(rng, np - 1, 3);
    let mut out = [0; 3];
    for (o, k) in out.iter_mut().zip(picked.iter()) {
        *o = if k >= exclude { k + 1 } else { k };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Constraint, Objective};

    #[test]
    fn donors_are_distinct_and_exclude_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..6 {
            for _ in 0..50 {
                let d = pick_donors(&mut rng, 6, i);
                assert!(d.iter().all(|&k| k != i && k < 6));
                assert!(d[0] != d[1] && d[1] != d[2] && d[0] != d[2]);
            }
        }
    }

    #[test]
    fn initialization_only_budget_is_unsolved() {
        let p = Problem::<f64>::with_default_bounds(Objective::Sphere, 5, vec![]).unwrap();
        let mut c = SolverConfig::desk(SolverKind::De);
        c.max_fen = c.population_size as u64;
        let out = solve_de(&p, &c, 3).unwrap();
        assert!(!out.solved);
        assert_eq!(out.fen, c.max_fen);
    }

    #[test]
    fn empty_feasible_set_uses_whole_budget() {
        let c = Constraint::linear(vec![1.0, 0.0], 10.0).unwrap();
        let p = Problem::with_default_bounds(Objective::Sphere, 2, vec![c]).unwrap();
        let mut cfg = SolverConfig::desk(SolverKind::De);
        cfg.max_fen = 3000;
        let out = solve_de(&p, &cfg, 5).unwrap();
        assert!(!out.solved);
        assert_eq!(out.fen, 3000);
        // best violation approaches the box edge x1 = -5
        assert!(out.best_violation < 5.1);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let p = Problem::<f64>::with_default_bounds(Objective::Sphere, 2, vec![]).unwrap();
        assert!(solve_de(&p, &SolverConfig::desk(SolverKind::Es), 0).is_err());
    }
}
