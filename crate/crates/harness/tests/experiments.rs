//! Library-level checks of cross-evaluation, the pipeline and the report.

use copevolve::evolver::derive_seed;
use copevolve::{
    Constraint, ConstraintKind, InstanceFile64, Objective, Problem, SolverConfig, SolverKind,
    Template,
};
use copevolve_harness::pipeline::{EntryStatus, ManifestEntry};
use copevolve_harness::{
    emit_report, evolve_hard_instance, run_cross_eval, run_hardness_pipeline, ExperimentConfig,
    InstanceSet, Manifest, Preset,
};

fn desk_solvers() -> Vec<SolverConfig> {
    SolverKind::ALL
        .iter()
        .map(|&k| SolverConfig::desk(k))
        .collect()
}

#[test]
fn easy_set_is_solved_by_everyone() {
    let set = InstanceSet {
        label: "free".into(),
        problems: vec![Problem::with_default_bounds(Objective::Sphere, 5, vec![]).unwrap()],
    };
    let table = run_cross_eval(&[set], &desk_solvers(), 30, 1).unwrap();
    assert_eq!(table.cells.len(), 3);
    for c in &table.cells {
        assert_eq!(c.success_rate, Some(1.0), "{c:?}");
        assert!(c.median_fen.unwrap() < 0.2 * 20_000.0, "{c:?}");
        assert_eq!(c.runs, 30);
    }
}

#[test]
fn infeasible_set_costs_the_whole_budget() {
    let blocked = Problem::with_default_bounds(
        Objective::Sphere,
        3,
        vec![Constraint::linear(vec![0.0; 3], 2.0).unwrap()],
    )
    .unwrap();
    let solvers: Vec<SolverConfig> = SolverKind::ALL
        .iter()
        .map(|&k| SolverConfig {
            max_fen: 1500,
            ..SolverConfig::desk(k)
        })
        .collect();
    let table = run_cross_eval(
        &[InstanceSet {
            label: "blocked".into(),
            problems: vec![blocked],
        }],
        &solvers,
        3,
        0,
    )
    .unwrap();
    for c in &table.cells {
        assert_eq!(
            (c.median_fen, c.success_rate),
            (Some(1500.0), Some(0.0)),
            "{c:?}"
        );
    }
}

#[test]
fn broken_solver_is_a_recorded_cell_failure() {
    let mut solvers = desk_solvers();
    solvers[2].population_size = 60; // not a multiple of the sub-swarm size
    let set = InstanceSet {
        label: "free".into(),
        problems: vec![Problem::with_default_bounds(Objective::Sphere, 2, vec![]).unwrap()],
    };
    let table = run_cross_eval(&[set], &solvers, 2, 0).unwrap();
    let broken = table.cell("free", SolverKind::Pso).unwrap();
    assert!(broken.error.is_some() && broken.median_fen.is_none());
    assert!(table.cell("free", SolverKind::De).unwrap().error.is_none());
    assert!(String::from_utf8(table.to_csv().unwrap())
        .unwrap()
        .contains("free,pso,null,null,2,"));
    assert!(run_cross_eval(&[], &solvers, 2, 0).is_err());
}

fn tiny_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::preset(Preset::Desk);
    c.pipeline.objectives = vec![Objective::Rosenbrock];
    c.pipeline.kinds = vec![ConstraintKind::Linear];
    c.pipeline.counts = vec![1, 3];
    c.pipeline.targets = vec![SolverKind::De, SolverKind::Pso];
    c.evolver.generations = 2;
    c.evolver.population_size = 5;
    c
}

#[test]
fn manifest_covers_the_grid_and_files_parse() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_config();
    let manifest = run_hardness_pipeline(&config, 3, dir.path()).unwrap();
    assert_eq!(manifest.entries.len(), 4);
    assert_eq!(manifest, Manifest::load(dir.path()).unwrap());
    for e in &manifest.entries {
        assert_eq!(e.status, EntryStatus::Ok, "{e:?}");
        let text = std::fs::read_to_string(dir.path().join(e.instance.as_ref().unwrap())).unwrap();
        let file = InstanceFile64::from_json(&text).unwrap();
        assert_eq!(file.to_json(), text);
        let p = file.to_problem().unwrap();
        assert_eq!(
            (p.objective(), p.constraints().len()),
            (Objective::Rosenbrock, e.n_constraints)
        );
        assert!(p.is_generated_form(-5.0, 5.0));
        assert_eq!(e.validation_fen.as_ref().unwrap().len(), 3);
    }
}

#[test]
fn invalid_solver_config_is_rejected_before_any_cell_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = tiny_config();
    config.solvers.pso.population_size = 8;
    config.solvers.pso.pso.subswarm_size = 3;
    let err = run_hardness_pipeline(&config, 1, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 1, "{err}");
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn report_skips_failed_entries_and_keeps_headers() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = tiny_config();
    config.pipeline.targets.clear();
    let mut manifest = run_hardness_pipeline(&config, 1, dir.path()).unwrap();
    assert!(manifest.entries.is_empty());
    emit_report(dir.path()).unwrap();
    let ratio = std::fs::read_to_string(dir.path().join("report/feasibility_ratio.csv")).unwrap();
    assert_eq!(
        ratio, "group,target_solver,n_constraints,value\n",
        "headers only without instances"
    );

    manifest.entries.push(ManifestEntry {
        id: "broken".into(),
        objective: Objective::Sphere,
        kind: ConstraintKind::Linear,
        n_constraints: 1,
        target_solver: SolverKind::De,
        evolver_seed: 0,
        status: EntryStatus::Failed,
        error: Some("boom".into()),
        instance: None,
        validation_fen: None,
    });
    std::fs::write(
        dir.path().join("manifest.json"),
        serde_json::to_string(&manifest).unwrap(),
    )
    .unwrap();
    assert_eq!(emit_report(dir.path()).unwrap().instances, 0);
}

#[test]
fn report_has_one_row_per_feature_value() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = tiny_config();
    config.pipeline.counts = vec![3];
    config.pipeline.targets = vec![SolverKind::Es];
    run_hardness_pipeline(&config, 8, dir.path()).unwrap();
    let summary = emit_report(dir.path()).unwrap();
    assert_eq!(summary.instances, 1);
    let rows = |f: &str| {
        std::fs::read_to_string(dir.path().join("report").join(f))
            .unwrap()
            .lines()
            .count()
            - 1
    };
    assert_eq!(rows("stddev.csv"), 3);
    assert_eq!(rows("stddev_linear_terms.csv"), 0);
    assert_eq!(rows("angle.csv"), 3);
    assert_eq!(rows("distance.csv"), 3);
    assert_eq!(rows("feasibility_ratio.csv"), 1);
    assert_eq!(rows("angle_summary.csv"), 1);
}

/// A DE-hard instance puts its largest cross-evaluation FEN in the DE column
/// in most independent repetitions.
#[test]
fn de_hard_sets_peak_in_the_de_column() {
    let config = ExperimentConfig::preset(Preset::Desk);
    let template = Template::new(Objective::Sphere, 5, ConstraintKind::Linear, 1);
    let solvers = desk_solvers();
    let mut peaks = 0;
    for rep in 0..10u64 {
        let hard = evolve_hard_instance(
            &config,
            &template,
            SolverKind::De,
            derive_seed(99, &[rep]),
            derive_seed(98, &[rep]),
        )
        .unwrap();
        let set = InstanceSet {
            label: "de-hard".into(),
            problems: vec![hard.problem],
        };
        let table = run_cross_eval(&[set], &solvers, 10, rep).unwrap();
        let fen = |k| table.cell("de-hard", k).unwrap().median_fen.unwrap();
        if SolverKind::ALL
            .iter()
            .all(|&k| fen(SolverKind::De) >= fen(k))
        {
            peaks += 1;
        }
    }
    assert!(peaks >= 7, "DE column peaked in {peaks}/10 repetitions");
}
