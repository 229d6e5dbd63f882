//! Experiment configuration: a named preset, optionally overlaid by a JSON
//! config file and by `--set key=value` overrides on dotted paths.

use std::path::Path;
use std::str::FromStr;

use copevolve::{
    ConstraintKind, EvolverConfig, MonteCarloConfig, Objective, SolverConfig, SolverKind,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Small dimension and budgets; runs in minutes on one core.
    Desk,
    /// Full-scale settings: n = 30, 300K evaluations, 5000 evolver generations.
    Paper,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        }
    }
}

impl FromStr for Preset {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(HarnessError::Usage(format!(
                "unknown preset '{other}' (expected desk or paper)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSet {
    pub de: SolverConfig,
    pub es: SolverConfig,
    pub pso: SolverConfig,
}

impl SolverSet {
    pub fn for_preset(preset: Preset) -> Self {
        let make = match preset {
            Preset::Desk => SolverConfig::desk,
            Preset::Paper => SolverConfig::paper,
        };
        Self {
            de: make(SolverKind::De),
            es: make(SolverKind::Es),
            pso: make(SolverKind::Pso),
        }
    }

    pub fn get(&self, kind: SolverKind) -> &SolverConfig {
        match kind {
            SolverKind::De => &self.de,
            SolverKind::Es => &self.es,
            SolverKind::Pso => &self.pso,
        }
    }

    /// Configurations of every solver except `target`, in canonical order.
    pub fn others(&self, target: SolverKind) -> Vec<SolverConfig> {
        SolverKind::ALL
            .iter()
            .filter(|&&k| k != target)
            .map(|&k| self.get(k).clone())
            .collect()
    }
}

/// Evolver parameters; the seed of each run is derived from the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolverSettings {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub scale_factor: f64,
    pub repeats: usize,
}

impl EvolverSettings {
    pub fn with_seed(&self, seed: u64) -> EvolverConfig {
        EvolverConfig {
            population_size: self.population_size,
            generations: self.generations,
            crossover_rate: self.crossover_rate,
            scale_factor: self.scale_factor,
            repeats: self.repeats,
            seed,
        }
    }
}

impl From<EvolverConfig> for EvolverSettings {
    fn from(c: EvolverConfig) -> Self {
        Self {
            population_size: c.population_size,
            generations: c.generations,
            crossover_rate: c.crossover_rate,
            scale_factor: c.scale_factor,
            repeats: c.repeats,
        }
    }
}

/// Monte Carlo settings of the feasibility-ratio feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSettings {
    pub radius_fraction: f64,
    pub samples: usize,
}

impl FeatureSettings {
    pub fn with_seed(&self, seed: u64) -> MonteCarloConfig {
        MonteCarloConfig {
            radius_fraction: self.radius_fraction,
            samples: self.samples,
            seed,
        }
    }
}

/// The grid of hard-instance cells and how each selected instance is validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSettings {
    pub dimension: usize,
    pub objectives: Vec<Objective>,
    pub kinds: Vec<ConstraintKind>,
    pub counts: Vec<usize>,
    pub targets: Vec<SolverKind>,
    /// Fresh solver runs per solver when validating a selected instance.
    pub validation_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub solvers: SolverSet,
    pub evolver: EvolverSettings,
    pub features: FeatureSettings,
    pub pipeline: PipelineSettings,
    /// Runs per (instance, solver) pair in cross-evaluation.
    pub cross_eval_repeats: usize,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let defaults = MonteCarloConfig::default();
        let (dimension, evolver, validation_seeds, cross_eval_repeats) = match preset {
            Preset::Desk => (5, EvolverConfig::desk(0), 10, 10),
            Preset::Paper => (30, EvolverConfig::paper(0), 30, 30),
        };
        Self {
            preset,
            solvers: SolverSet::for_preset(preset),
            evolver: evolver.into(),
            features: FeatureSettings {
                radius_fraction: defaults.radius_fraction,
                samples: defaults.samples,
            },
            pipeline: PipelineSettings {
                dimension,
                objectives: Objective::ALL.to_vec(),
                kinds: vec![ConstraintKind::Linear, ConstraintKind::Quadratic],
                counts: (1..=5).collect(),
                targets: SolverKind::ALL.to_vec(),
                validation_seeds,
            },
            cross_eval_repeats,
        }
    }

    /// Preset defaults, overlaid by `file` (if any), then by `overrides`.
    /// The preset comes from `preset`, else from the file's `preset` key, else desk.
    pub fn load(preset: Option<Preset>, file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let file_value = match file {
            Some(path) => {
                let text = crate::io::read_to_string(path)?;
                let v: Value = serde_json::from_str(&text)
                    .map_err(|e| HarnessError::data(path.display(), e))?;
                if !v.is_object() {
                    return Err(HarnessError::Data(format!(
                        "{}: config must be a JSON object",
                        path.display()
                    )));
                }
                Some(v)
            }
            None => None,
        };
        let from_file = file_value.as_ref().and_then(|v| v.get("preset")).map(|p| {
            p.as_str()
                .ok_or_else(|| HarnessError::Data("config key 'preset' must be a string".into()))
                .and_then(Preset::from_str)
        });
        let preset = match (preset, from_file) {
            (Some(p), _) => p,
            (None, Some(p)) => p?,
            (None, None) => Preset::Desk,
        };
        let mut value = serde_json::to_value(Self::preset(preset))
            .map_err(|e| HarnessError::Internal(e.to_string()))?;
        if let Some(overlay) = file_value {
            merge(&mut value, overlay, "").map_err(HarnessError::Data)?;
        }
        // An explicit preset wins over the file's key.
        value["preset"] = Value::String(preset.name().into());
        for item in overrides {
            apply_override(&mut value, item)?;
        }
        let config: Self = serde_json::from_value(value)
            .map_err(|e| HarnessError::Usage(format!("invalid configuration: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for kind in SolverKind::ALL {
            let s = self.solvers.get(kind);
            if s.kind != kind {
                return Err(HarnessError::Usage(format!(
                    "solvers.{kind}.kind must be {kind}"
                )));
            }
            s.validate()
                .map_err(|e| HarnessError::Usage(format!("solvers.{kind}: {e}")))?;
        }
        self.evolver
            .with_seed(0)
            .validate()
            .map_err(|e| HarnessError::Usage(format!("evolver: {e}")))?;
        if !(self.features.radius_fraction > 0.0 && self.features.radius_fraction <= 1.0)
            || self.features.samples == 0
        {
            return Err(HarnessError::Usage(
                "features need radius_fraction in (0, 1] and samples >= 1".into(),
            ));
        }
        let p = &self.pipeline;
        if p.dimension == 0 || p.validation_seeds == 0 || self.cross_eval_repeats == 0 {
            return Err(HarnessError::Usage(
                "dimension, validation_seeds and cross_eval_repeats must be >= 1".into(),
            ));
        }
        if p.counts.contains(&0) {
            return Err(HarnessError::Usage(
                "pipeline.counts entries must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Recursively overlays `overlay` onto `base`; every overlay key must already exist.
fn merge(base: &mut Value, overlay: Value, path: &str) -> std::result::Result<(), String> {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                let child = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v, &child)?,
                    None => return Err(format!("unknown config key '{child}'")),
                }
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

/// Applies one `dotted.path=value` override. The value is parsed as JSON when
/// possible (numbers, booleans, arrays) and taken as a string otherwise.
pub fn apply_override(value: &mut Value, item: &str) -> Result<()> {
    let (path, raw) = item.split_once('=').ok_or_else(|| {
        HarnessError::Usage(format!("override '{item}' is not of the form key=value"))
    })?;
    let parsed = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut slot = value;
    for key in path.split('.') {
        slot = slot
            .as_object_mut()
            .and_then(|o| o.get_mut(key))
            .ok_or_else(|| HarnessError::Usage(format!("unknown config key '{path}'")))?;
    }
    *slot = parsed;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_differ_in_scale() {
        let desk = ExperimentConfig::preset(Preset::Desk);
        let paper = ExperimentConfig::preset(Preset::Paper);
        assert_eq!(desk.pipeline.dimension, 5);
        assert_eq!(paper.pipeline.dimension, 30);
        assert_eq!(desk.solvers.de.max_fen, 20_000);
        assert_eq!(paper.solvers.de.max_fen, 300_000);
        assert_eq!(desk.evolver.population_size, 20);
        assert_eq!(paper.evolver.generations, 5000);
        desk.validate().unwrap();
        paper.validate().unwrap();
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let sets = [
            "evolver.generations=3".to_string(),
            "pipeline.objectives=[\"sphere\"]".into(),
            "solvers.pso.pso.subswarm_size=4".into(),
        ];
        let c = ExperimentConfig::load(None, None, &sets).unwrap();
        assert_eq!(c.evolver.generations, 3);
        assert_eq!(c.pipeline.objectives, vec![Objective::Sphere]);
        assert_eq!(c.solvers.pso.pso.subswarm_size, 4);
    }

    #[test]
    fn bad_overrides_are_usage_errors() {
        for bad in [
            "evolver.generation=3",
            "nonsense",
            "evolver.generations=many",
            "solvers.de.kind=es",
        ] {
            let err = ExperimentConfig::load(None, None, &[bad.to_string()]).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{bad}: {err}");
        }
    }

    #[test]
    fn file_overlay_and_preset_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(
            &path,
            r#"{"preset": "paper", "evolver": {"generations": 7}}"#,
        )
        .unwrap();
        let c = ExperimentConfig::load(None, Some(&path), &[]).unwrap();
        assert_eq!(
            (c.preset, c.evolver.generations, c.pipeline.dimension),
            (Preset::Paper, 7, 30)
        );
        let c = ExperimentConfig::load(
            Some(Preset::Desk),
            Some(&path),
            &["evolver.generations=9".into()],
        )
        .unwrap();
        assert_eq!(
            (c.preset, c.evolver.generations, c.pipeline.dimension),
            (Preset::Desk, 9, 5)
        );

        std::fs::write(&path, r#"{"evolver": {"generatoins": 7}}"#).unwrap();
        assert_eq!(
            ExperimentConfig::load(None, Some(&path), &[])
                .unwrap_err()
                .exit_code(),
            2
        );
        assert_eq!(
            ExperimentConfig::load(None, Some(&dir.path().join("missing.json")), &[])
                .unwrap_err()
                .exit_code(),
            2
        );
    }
}
