//! Properties of the problem model, instance files and genomes.

use copevolve::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Map;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, n)
}

fn constraint(n: usize) -> impl Strategy<Value = Constraint64> {
    (
        any::<bool>(),
        prop::collection::vec(-5.0..5.0f64, 2 * n),
        -25.0..=0.0f64,
    )
        .prop_map(move |(lin, c, b)| {
            if lin {
                Constraint::linear(c[..n].to_vec(), b).unwrap()
            } else {
                Constraint::quadratic(c, b).unwrap()
            }
        })
}

fn objective() -> impl Strategy<Value = Objective> {
    prop::sample::select(Objective::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn linear_constraints_are_affine(a in point(4), b in -25.0..0.0f64, x in point(4), y in point(4), t in 0.0..1.0f64) {
        let c = Constraint::linear(a, b).unwrap();
        let z: Vec<f64> = x.iter().zip(&y).map(|(u, v)| t * u + (1.0 - t) * v).collect();
        let mixed = t * c.value(&x) + (1.0 - t) * c.value(&y);
        prop_assert!((c.value(&z) - mixed).abs() <= 1e-9 * (1.0 + mixed.abs()));
    }

    #[test]
    fn generated_instances_keep_the_optimum_feasible(obj in objective(), cs in prop::collection::vec(constraint(3), 0..5), x in point(3)) {
        let p = Problem::with_default_bounds(obj, 3, cs).unwrap();
        prop_assert!(p.is_generated_form(-5.0, 5.0));
        let at_origin = p.evaluate(&[0.0; 3]).unwrap();
        prop_assert!(at_origin.is_feasible());
        prop_assert!(at_origin.objective_value.abs() <= 1e-12);
        let e = p.evaluate(&x).unwrap();
        prop_assert!(e.objective_value >= 0.0);
        prop_assert!(e.total_violation >= 0.0);
        let sum: f64 = p.constraint_values(&x).unwrap().iter().map(|g| g.max(0.0)).sum();
        prop_assert!((e.total_violation - sum).abs() <= 1e-12 * (1.0 + sum));
    }

    #[test]
    fn instance_files_round_trip_exactly(obj in objective(), cs in prop::collection::vec(constraint(4), 0..4)) {
        let p = Problem::with_default_bounds(obj, 4, cs).unwrap();
        let mut meta = Map::new();
        meta.insert("seed".into(), 7.into());
        let text = InstanceFile::from_problem(&p, meta.clone()).to_json();
        let back = InstanceFile64::from_json(&text).unwrap();
        prop_assert_eq!(&back.meta, &meta);
        prop_assert_eq!(back.to_problem().unwrap(), p);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn genomes_round_trip_and_stay_in_their_box(seed in 0u64..10_000, count in 1usize..5, quadratic in any::<bool>(), noise in prop::collection::vec(-100.0..100.0f64, 60)) {
        let kind = if quadratic { ConstraintKind::Quadratic } else { ConstraintKind::Linear };
        let t = Template::new(Objective::Ackley, 3, kind, count);
        let g: InstanceGenome64 = t.random_genome(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(g.is_within_bounds());
        let p = g.decode().unwrap();
        prop_assert_eq!(&InstanceGenome::encode(&p, &t).unwrap(), &g);

        let genes = (0..t.gene_len()).map(|i| g.genes[i] + noise[i % noise.len()]).collect();
        let mut wild = InstanceGenome::new(t.clone(), genes).unwrap();
        wild.clamp();
        prop_assert!(wild.is_within_bounds());
        let decoded = wild.decode().unwrap();
        prop_assert!(decoded.constraints().iter().all(|c| c.offset() <= 0.0));
        prop_assert!(decoded.is_feasible(&[0.0; 3]).unwrap());
    }
}

#[test]
fn single_precision_model_matches_double() {
    let c64 = Constraint::quadratic(vec![1.0, -2.0, 0.5, 3.0], -1.0).unwrap();
    let c32 = Constraint::<f32>::quadratic(vec![1.0, -2.0, 0.5, 3.0], -1.0).unwrap();
    let x = [0.25, -0.75];
    assert!((c64.value(&x) - c32.value(&[0.25f32, -0.75]) as f64).abs() < 1e-6);
    for obj in Objective::ALL {
        let v64 = obj.value(&x);
        let v32 = obj.value(&[0.25f32, -0.75]) as f64;
        assert!(
            (v64 - v32).abs() <= 1e-5 * (1.0 + v64.abs()),
            "{obj}: {v64} vs {v32}"
        );
    }
}
