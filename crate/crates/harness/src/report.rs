//! Plot-ready long-format feature files and summary tables built from a
//! pipeline results directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use copevolve::{
    feature_vector, ConstraintKind, FeatureVector, InstanceFile64, MonteCarloConfig, Objective,
    SolverKind,
};

use crate::error::{HarnessError, Result};
use crate::io::{cell, csv_bytes, read_to_string, write_atomic};
use crate::pipeline::{EntryStatus, Manifest};

pub const LONG_HEADER: [&str; 4] = ["group", "target_solver", "n_constraints", "value"];

/// Long-format files, one per feature, written to `<dir>/report/`.
pub const FEATURE_FILES: [&str; 5] = [
    "stddev",
    "stddev_linear_terms",
    "angle",
    "distance",
    "feasibility_ratio",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSummary {
    pub files: Vec<PathBuf>,
    pub instances: usize,
}

struct Loaded {
    objective: Objective,
    kind: ConstraintKind,
    n_constraints: usize,
    target: SolverKind,
    features: FeatureVector,
}

pub fn emit_report(dir: &Path) -> Result<ReportSummary> {
    let manifest = Manifest::load(dir)?;
    let mc = MonteCarloConfig {
        radius_fraction: manifest.radius_fraction,
        samples: manifest.samples,
        seed: manifest.feature_seed,
    };
    let mut loaded = Vec::new();
    for entry in manifest
        .entries
        .iter()
        .filter(|e| e.status == EntryStatus::Ok)
    {
        let rel = entry.instance.as_ref().ok_or_else(|| {
            HarnessError::Data(format!("manifest entry {} has no instance path", entry.id))
        })?;
        let path = dir.join(rel);
        let file = InstanceFile64::from_json(&read_to_string(&path)?)
            .map_err(|e| HarnessError::data(path.display(), e))?;
        loaded.push(Loaded {
            objective: entry.objective,
            kind: entry.kind,
            n_constraints: entry.n_constraints,
            target: entry.target_solver,
            features: feature_vector(&file.to_problem()?, &mc)?,
        });
    }

    let mut long: BTreeMap<&str, Vec<Vec<String>>> =
        FEATURE_FILES.iter().map(|&f| (f, Vec::new())).collect();
    for l in &loaded {
        let group = format!("{}-{}", l.objective, l.kind.name());
        let mut push = |feature: &str, value: f64| {
            long.get_mut(feature).expect("known feature").push(vec![
                group.clone(),
                l.target.to_string(),
                l.n_constraints.to_string(),
                value.to_string(),
            ]);
        };
        for s in &l.features.per_constraint_stddev {
            push("stddev", s.primary);
            if let Some(v) = s.linear_term {
                push("stddev_linear_terms", v);
            }
        }
        for a in l
            .features
            .pairwise_angles_deg
            .iter()
            .filter_map(|a| a.degrees)
        {
            push("angle", a);
        }
        for d in l.features.shortest_distances.iter().flatten() {
            push("distance", *d);
        }
        push("feasibility_ratio", l.features.feasibility_ratio);
    }

    let out = dir.join("report");
    let mut files = Vec::new();
    for name in FEATURE_FILES {
        let path = out.join(format!("{name}.csv"));
        write_atomic(&path, &csv_bytes(&LONG_HEADER, &long[name])?)?;
        files.push(path);
    }

    let targets = ["de_hard", "es_hard", "pso_hard"];
    // Feasibility ratio: mean per (objective, kind, count) and target.
    let mut feas: BTreeMap<(String, &str, usize), BTreeMap<SolverKind, Vec<f64>>> = BTreeMap::new();
    // Mean pairwise angle of linear instances per (objective, count) and target.
    let mut angle: BTreeMap<(String, usize), BTreeMap<SolverKind, Vec<f64>>> = BTreeMap::new();
    for l in &loaded {
        feas.entry((l.objective.to_string(), l.kind.name(), l.n_constraints))
            .or_default()
            .entry(l.target)
            .or_default()
            .push(l.features.feasibility_ratio);
        let angles: Vec<f64> = l
            .features
            .pairwise_angles_deg
            .iter()
            .filter_map(|a| a.degrees)
            .collect();
        if l.kind == ConstraintKind::Linear && !angles.is_empty() {
            angle
                .entry((l.objective.to_string(), l.n_constraints))
                .or_default()
                .entry(l.target)
                .or_default()
                .push(angles.iter().sum::<f64>() / angles.len() as f64);
        }
    }
    let mean_of = |m: &BTreeMap<SolverKind, Vec<f64>>, k: SolverKind| {
        m.get(&k).map(|v| v.iter().sum::<f64>() / v.len() as f64)
    };

    let rows: Vec<Vec<String>> = feas
        .iter()
        .map(|((obj, kind, n), m)| {
            let mut row = vec![obj.clone(), kind.to_string(), n.to_string()];
            row.extend(SolverKind::ALL.iter().map(|&k| cell(mean_of(m, k))));
            row
        })
        .collect();
    let header = [&["objective", "kind", "n_constraints"][..], &targets[..]].concat();
    let path = out.join("feasibility_summary.csv");
    write_atomic(&path, &csv_bytes(&header, &rows)?)?;
    files.push(path);

    let rows: Vec<Vec<String>> = angle
        .iter()
        .map(|((obj, n), m)| {
            let mut row = vec![obj.clone(), n.to_string()];
            row.extend(SolverKind::ALL.iter().map(|&k| cell(mean_of(m, k))));
            row
        })
        .collect();
    let header = [&["objective", "n_constraints"][..], &targets[..]].concat();
    let path = out.join("angle_summary.csv");
    write_atomic(&path, &csv_bytes(&header, &rows)?)?;
    files.push(path);

    Ok(ReportSummary {
        files,
        instances: loaded.len(),
    })
}
