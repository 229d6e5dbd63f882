//! Hard-for-one instance generation over a grid of objectives, constraint
//! kinds, constraint counts and target solvers.

use std::collections::BTreeMap;
use std::path::Path;

use copevolve::evolver::derive_seed;
use copevolve::{
    evolve_multi, evolve_single, median, select_discriminating, solve, ConstraintKind, Direction,
    EvolverConfig, InstanceFile, InstanceGenome64, Objective, Problem64, SolverConfig, SolverKind,
    Template,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::feature_table::{feature_csv, FeatureRow};
use crate::io::{cell, csv_bytes, write_atomic};

/// Stream tags keeping evolver, validation and feature seeds apart.
const EVOLVE_TAG: u64 = 1;
const VALIDATE_TAG: u64 = 2;
const FEATURE_TAG: u64 = 3;

/// An evolved instance together with the evidence for its hardness.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstance {
    pub genome: InstanceGenome64,
    pub problem: Problem64,
    /// Fitness of the selected front member as seen by the evolver.
    pub front_fitness: Vec<f64>,
    pub front_size: usize,
    /// Median FEN per solver over fresh validation seeds, in [`SolverKind::ALL`] order.
    pub validation: Vec<(SolverKind, f64)>,
}

impl HardInstance {
    pub fn validation_fen(&self, kind: SolverKind) -> f64 {
        self.validation
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|v| v.1)
            .expect("every solver is validated")
    }

    /// `FEN(target) / max FEN(other)` on the validation runs.
    pub fn discrimination_ratio(&self, target: SolverKind) -> f64 {
        let others = self
            .validation
            .iter()
            .filter(|(k, _)| *k != target)
            .map(|v| v.1)
            .fold(f64::NEG_INFINITY, f64::max);
        self.validation_fen(target) / others
    }
}

/// Median FEN of `solver` on `problem` over `runs` seeds derived from `seed`.
pub fn median_fen(
    problem: &Problem64,
    solver: &SolverConfig,
    runs: usize,
    seed: u64,
) -> Result<f64> {
    let fens = (0..runs)
        .into_par_iter()
        .map(|r| solve(problem, solver, derive_seed(seed, &[r as u64])).map(|o| o.fen as f64))
        .collect::<copevolve::Result<Vec<f64>>>()?;
    median(&fens).ok_or_else(|| HarnessError::Usage("need at least one validation run".into()))
}

/// Runs DEMO for `target` against the other configured solvers, selects the
/// most discriminating front member and validates it on fresh seeds.
pub fn evolve_hard_instance(
    config: &ExperimentConfig,
    template: &Template,
    target: SolverKind,
    evolver_seed: u64,
    validation_seed: u64,
) -> Result<HardInstance> {
    let evolver: EvolverConfig = config.evolver.with_seed(evolver_seed);
    let front = evolve_multi::<f64>(
        template,
        config.solvers.get(target),
        &config.solvers.others(target),
        &evolver,
    )?;
    let pick = select_discriminating(&front)?;
    let (genome, fitness) = front[pick].clone();
    let problem = genome.decode()?;
    let validation = SolverKind::ALL
        .iter()
        .map(|&k| {
            median_fen(
                &problem,
                config.solvers.get(k),
                config.pipeline.validation_seeds,
                validation_seed,
            )
            .map(|f| (k, f))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HardInstance {
        genome,
        problem,
        front_fitness: fitness.values,
        front_size: front.len(),
        validation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub objective: Objective,
    pub kind: ConstraintKind,
    pub n_constraints: usize,
    pub target_solver: SolverKind,
    pub evolver_seed: u64,
    pub status: EntryStatus,
    pub error: Option<String>,
    /// Instance file path relative to the results directory.
    pub instance: Option<String>,
    pub validation_fen: Option<BTreeMap<SolverKind, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub preset: String,
    pub seed: u64,
    pub dimension: usize,
    pub radius_fraction: f64,
    pub samples: usize,
    pub feature_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub const FILE: &'static str = "manifest.json";

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(Self::FILE);
        if !path.is_file() {
            return Err(HarnessError::Data(format!(
                "missing manifest {}",
                path.display()
            )));
        }
        let text = crate::io::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| HarnessError::data(path.display(), e))
    }
}

struct Cell {
    objective: Objective,
    kind: ConstraintKind,
    count: usize,
    target: SolverKind,
}

impl Cell {
    fn id(&self) -> String {
        format!(
            "{}-{}-{}c-{}-hard",
            self.objective,
            self.kind.name(),
            self.count,
            self.target
        )
    }

    fn seed_parts(&self) -> [u64; 4] {
        let obj = Objective::ALL
            .iter()
            .position(|&o| o == self.objective)
            .expect("known objective") as u64;
        let kind = matches!(self.kind, ConstraintKind::Quadratic) as u64;
        let target = SolverKind::ALL
            .iter()
            .position(|&k| k == self.target)
            .expect("known solver") as u64;
        [obj, kind, self.count as u64, target]
    }
}

struct CellOutput {
    entry: ManifestEntry,
    file: Option<(String, String)>,
    features: Option<FeatureRow>,
}

/// Runs every cell of `config.pipeline`, writing instance files, validation
/// FENs, the feature table and a manifest into `out_dir`. A failing cell is
/// recorded in the manifest and the remaining cells still run.
pub fn run_hardness_pipeline(
    config: &ExperimentConfig,
    seed: u64,
    out_dir: &Path,
) -> Result<Manifest> {
    config.validate()?;
    let p = &config.pipeline;
    let mut cells = Vec::new();
    for &objective in &p.objectives {
        for &kind in &p.kinds {
            for &count in &p.counts {
                for &target in &p.targets {
                    cells.push(Cell {
                        objective,
                        kind,
                        count,
                        target,
                    });
                }
            }
        }
    }
    let feature_seed = derive_seed(seed, &[FEATURE_TAG]);
    let mc = config.features.with_seed(feature_seed);
    let outputs: Vec<CellOutput> = cells
        .par_iter()
        .map(|c| run_cell(config, c, seed, &mc))
        .collect();

    let mut validation_rows = Vec::new();
    let mut feature_rows = Vec::new();
    let mut entries = Vec::new();
    for out in outputs {
        if let Some((rel, text)) = &out.file {
            write_atomic(&out_dir.join(rel), text.as_bytes())?;
        }
        if let Some(v) = &out.entry.validation_fen {
            let mut row = vec![out.entry.id.clone(), out.entry.target_solver.to_string()];
            row.extend(SolverKind::ALL.iter().map(|k| cell(v.get(k).copied())));
            validation_rows.push(row);
        }
        feature_rows.extend(out.features);
        entries.push(out.entry);
    }
    write_atomic(
        &out_dir.join("validation.csv"),
        &csv_bytes(
            &["instance_id", "target_solver", "de", "es", "pso"],
            &validation_rows,
        )?,
    )?;
    write_atomic(&out_dir.join("features.csv"), &feature_csv(&feature_rows)?)?;
    let manifest = Manifest {
        preset: config.preset.name().to_string(),
        seed,
        dimension: p.dimension,
        radius_fraction: mc.radius_fraction,
        samples: mc.samples,
        feature_seed,
        entries,
    };
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| HarnessError::Internal(e.to_string()))?
        + "\n";
    write_atomic(&out_dir.join(Manifest::FILE), text.as_bytes())?;
    Ok(manifest)
}

fn run_cell(
    config: &ExperimentConfig,
    cell: &Cell,
    seed: u64,
    mc: &copevolve::MonteCarloConfig,
) -> CellOutput {
    let parts = cell.seed_parts();
    let evolver_seed = derive_seed(seed, &[&[EVOLVE_TAG][..], &parts[..]].concat());
    let validation_seed = derive_seed(seed, &[&[VALIDATE_TAG][..], &parts[..]].concat());
    let id = cell.id();
    let mut entry = ManifestEntry {
        id: id.clone(),
        objective: cell.objective,
        kind: cell.kind,
        n_constraints: cell.count,
        target_solver: cell.target,
        evolver_seed,
        status: EntryStatus::Failed,
        error: None,
        instance: None,
        validation_fen: None,
    };
    let template = Template::new(
        cell.objective,
        config.pipeline.dimension,
        cell.kind,
        cell.count,
    );
    let result = evolve_hard_instance(
        config,
        &template,
        cell.target,
        evolver_seed,
        validation_seed,
    )
    .and_then(|hard| {
        let validation: BTreeMap<SolverKind, f64> = hard.validation.iter().copied().collect();
        let mut meta = Map::new();
        meta.insert("target_solver".into(), json!(cell.target));
        meta.insert("hardness".into(), json!("hard-for-target"));
        meta.insert("evolver_seed".into(), json!(evolver_seed));
        meta.insert("seed".into(), json!(seed));
        meta.insert("preset".into(), json!(config.preset.name()));
        meta.insert("front_fitness".into(), json!(hard.front_fitness));
        meta.insert("validation_fen".into(), json!(validation));
        let text = InstanceFile::from_problem(&hard.problem, meta).to_json();
        let features = FeatureRow::compute(&id, &hard.problem, mc)?;
        Ok((text, validation, features))
    });
    match result {
        Ok((text, validation, features)) => {
            let rel = format!("instances/{id}.json");
            entry.status = EntryStatus::Ok;
            entry.instance = Some(rel.clone());
            entry.validation_fen = Some(validation);
            CellOutput {
                entry,
                file: Some((rel, text)),
                features: Some(features),
            }
        }
        Err(e) => {
            entry.error = Some(e.to_string());
            CellOutput {
                entry,
                file: None,
                features: None,
            }
        }
    }
}

/// Single-objective evolution: writes the best genome of the final population
/// as an instance file and returns its fitness.
pub fn run_single(
    config: &ExperimentConfig,
    template: &Template,
    target: SolverKind,
    direction: Direction,
    seed: u64,
    out_file: &Path,
) -> Result<f64> {
    let population = evolve_single::<f64>(
        template,
        config.solvers.get(target),
        direction,
        &config.evolver.with_seed(seed),
    )?;
    let (best, fitness) = population
        .into_iter()
        .next()
        .ok_or_else(|| HarnessError::Internal("empty population".into()))?;
    let hardness = match direction {
        Direction::Harder => "single-objective-hard",
        Direction::Easier => "easy",
    };
    let mut meta = Map::new();
    meta.insert("target_solver".into(), json!(target));
    meta.insert("hardness".into(), json!(hardness));
    meta.insert("evolver_seed".into(), json!(seed));
    meta.insert("seed".into(), json!(seed));
    meta.insert("preset".into(), json!(config.preset.name()));
    meta.insert("fitness".into(), Value::from(fitness));
    write_atomic(
        out_file,
        InstanceFile::from_problem(&best.decode()?, meta)
            .to_json()
            .as_bytes(),
    )?;
    Ok(fitness)
}
