//! Budget, soundness and determinism contracts shared by all solvers.

use copevolve::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn generated(
    objective: Objective,
    n: usize,
    kind: ConstraintKind,
    count: usize,
    seed: u64,
) -> Problem64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let constraints = (0..count)
        .map(|_| {
            let coeffs = (0..kind.coeff_len(n))
                .map(|_| rng.random_range(-5.0..5.0))
                .collect();
            Constraint::new(kind, coeffs, rng.random_range(-5.0 * n as f64..=0.0)).unwrap()
        })
        .collect();
    Problem::with_default_bounds(objective, n, constraints).unwrap()
}

fn small_budget(kind: SolverKind, max_fen: u64) -> SolverConfig {
    SolverConfig {
        max_fen,
        ..SolverConfig::desk(kind)
    }
}

fn check_outcome(p: &Problem64, c: &SolverConfig, o: &SolveOutcome64) -> Result<(), TestCaseError> {
    prop_assert!(o.fen >= 1 && o.fen <= c.max_fen);
    if o.solved {
        // re-evaluated independently of the solver's own bookkeeping
        let f = p.evaluate_objective(&o.best_x).unwrap();
        prop_assert!(p.bounds().contains(&o.best_x));
        prop_assert!(p.is_feasible(&o.best_x).unwrap());
        prop_assert!(f <= c.target_gap);
        prop_assert_eq!(f, o.best_f);
    } else {
        prop_assert_eq!(o.fen, c.max_fen);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn outcomes_respect_budget_and_are_sound(
        seed in 0u64..10_000,
        obj in 0usize..3,
        quadratic in any::<bool>(),
        count in 0usize..4,
        solver in 0usize..3,
        max_fen in 50u64..3000,
    ) {
        let kind = if quadratic { ConstraintKind::Quadratic } else { ConstraintKind::Linear };
        let p = generated(Objective::ALL[obj], 3, kind, count, seed);
        let c = small_budget(SolverKind::ALL[solver], max_fen.max(SolverConfig::desk(SolverKind::ALL[solver]).population_size as u64));
        let o = solve(&p, &c, seed).unwrap();
        check_outcome(&p, &c, &o)?;
        prop_assert_eq!(&o, &solve(&p, &c, seed).unwrap());
    }
}

#[test]
fn every_solver_handles_every_objective() {
    for obj in Objective::ALL {
        let p = generated(obj, 2, ConstraintKind::Linear, 1, 3);
        for kind in SolverKind::ALL {
            let o = solve(&p, &SolverConfig::desk(kind), 1).unwrap();
            assert!(o.solved, "{kind} failed on {obj}: {o:?}");
        }
    }
}

#[test]
fn empty_feasible_region_is_never_solved() {
    let c = Constraint::linear(vec![0.0, 0.0, 0.0], 1.0).unwrap();
    let p = Problem::with_default_bounds(Objective::Sphere, 3, vec![c]).unwrap();
    for kind in SolverKind::ALL {
        let cfg = small_budget(kind, 2000);
        let o = solve(&p, &cfg, 0).unwrap();
        assert!(!o.solved);
        assert_eq!(o.fen, 2000);
        assert!(o.best_violation > 0.0);
    }
}

#[test]
fn single_precision_solves_too() {
    let p = Problem::<f32>::with_default_bounds(
        Objective::Sphere,
        3,
        vec![Constraint::linear(vec![1.0, -2.0, 0.5], -1.0).unwrap()],
    )
    .unwrap();
    for kind in SolverKind::ALL {
        let o = solve(&p, &SolverConfig::desk(kind), 4).unwrap();
        assert!(o.solved, "{kind}: {o:?}");
        assert!(p.is_feasible(&o.best_x).unwrap());
    }
}

#[test]
fn distinct_seeds_explore_differently() {
    let p = generated(Objective::Ackley, 4, ConstraintKind::Linear, 2, 9);
    for kind in SolverKind::ALL {
        let c = SolverConfig::desk(kind);
        let fens: std::collections::BTreeSet<u64> =
            (0..8).map(|s| solve(&p, &c, s).unwrap().fen).collect();
        assert!(fens.len() > 1, "{kind} ignores its seed");
    }
}

#[test]
fn fitness_is_the_median_of_repeats() {
    let t = Template::new(Objective::Sphere, 3, ConstraintKind::Linear, 1);
    let g: InstanceGenome64 = t.random_genome(&mut ChaCha8Rng::seed_from_u64(1));
    let s = SolverConfig::desk(SolverKind::Pso);
    let p = g.decode().unwrap();
    let fens: Vec<f64> = (0..5)
        .map(|r| solve(&p, &s, evolver::derive_seed(77, &[r])).unwrap().fen as f64)
        .collect();
    assert_eq!(
        evolver::fen_fitness(&g, &s, 5, 77).unwrap(),
        median(&fens).unwrap()
    );
    assert_eq!(
        evolver::fen_fitness(&g, &s, 5, 77).unwrap(),
        evolver::fen_fitness(&g, &s, 5, 77).unwrap()
    );

    let blocked = InstanceGenome::new(t, vec![0.0, 0.0, 0.0, 0.0]).unwrap();
    let mut unsolvable = s.clone();
    unsolvable.target_gap = 1e-300;
    unsolvable.max_fen = 500;
    assert_eq!(
        evolver::fen_fitness(&blocked, &unsolvable, 3, 0).unwrap(),
        500.0
    );
    assert!(evolver::fen_fitness(&blocked, &s, 0, 0).is_err());
}
