//! One-row-per-instance feature summary.

use copevolve::{feature_vector, FeatureVector, MonteCarloConfig, Problem64};

use crate::error::Result;
use crate::io::{cell, csv_bytes};

pub const FEATURE_CSV_HEADER: [&str; 15] = [
    "instance_id",
    "objective",
    "kind",
    "n_constraints",
    "stddev_mean",
    "stddev_min",
    "stddev_max",
    "angle_mean",
    "angle_min",
    "distance_mean",
    "distance_min",
    "feasibility_ratio",
    "radius_fraction",
    "samples",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub instance_id: String,
    pub objective: String,
    /// `linear`, `quadratic`, `mixed`, or `none` without constraints.
    pub kind: String,
    pub features: FeatureVector,
    pub mc: MonteCarloConfig,
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn min(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::min)
}

fn max(values: &[f64]) -> Option<f64> {
    values.iter().copied().reduce(f64::max)
}

impl FeatureRow {
    pub fn compute(instance_id: &str, problem: &Problem64, mc: &MonteCarloConfig) -> Result<Self> {
        let mut kinds: Vec<&str> = problem
            .constraints()
            .iter()
            .map(|c| c.kind().name())
            .collect();
        kinds.dedup();
        let kind = match kinds.as_slice() {
            [] => "none".to_string(),
            [one] => one.to_string(),
            _ => "mixed".to_string(),
        };
        Ok(Self {
            instance_id: instance_id.to_string(),
            objective: problem.objective().name().to_string(),
            kind,
            features: feature_vector(problem, mc)?,
            mc: *mc,
        })
    }

    pub fn record(&self) -> Vec<String> {
        let f = &self.features;
        let stddev: Vec<f64> = f.per_constraint_stddev.iter().map(|s| s.primary).collect();
        let angles: Vec<f64> = f
            .pairwise_angles_deg
            .iter()
            .filter_map(|a| a.degrees)
            .collect();
        let distances: Vec<f64> = f.shortest_distances.iter().filter_map(|d| *d).collect();
        vec![
            self.instance_id.clone(),
            self.objective.clone(),
            self.kind.clone(),
            f.constraint_count.to_string(),
            cell(mean(&stddev)),
            cell(min(&stddev)),
            cell(max(&stddev)),
            cell(mean(&angles)),
            cell(min(&angles)),
            cell(mean(&distances)),
            cell(min(&distances)),
            f.feasibility_ratio.to_string(),
            self.mc.radius_fraction.to_string(),
            self.mc.samples.to_string(),
            self.mc.seed.to_string(),
        ]
    }
}

pub fn feature_csv(rows: &[FeatureRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &FEATURE_CSV_HEADER,
        &rows.iter().map(FeatureRow::record).collect::<Vec<_>>(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use copevolve::{Constraint, Objective, Problem};

    #[test]
    fn rows_follow_the_schema() {
        let p = Problem::with_default_bounds(
            Objective::Sphere,
            2,
            vec![
                Constraint::linear(vec![1.0, 0.0], -1.0).unwrap(),
                Constraint::linear(vec![0.0, 2.0], -1.0).unwrap(),
            ],
        )
        .unwrap();
        let row = FeatureRow::compute("x", &p, &MonteCarloConfig::default()).unwrap();
        let rec = row.record();
        assert_eq!(rec.len(), FEATURE_CSV_HEADER.len());
        assert_eq!(&rec[..4], ["x", "sphere", "linear", "2"]);
        assert_eq!(rec[7], "90");
        assert_eq!(rec[10], "0.5");
        assert_eq!(rec[11], "1");
    }

    #[test]
    fn undefined_values_are_null() {
        let p = Problem::with_default_bounds(Objective::Ackley, 3, vec![]).unwrap();
        let rec = FeatureRow::compute("empty", &p, &MonteCarloConfig::default())
            .unwrap()
            .record();
        assert_eq!(rec[2], "none");
        assert!(rec[4..11].iter().all(|v| v == "null"));
        let q = Problem::with_default_bounds(
            Objective::Sphere,
            1,
            vec![Constraint::quadratic(vec![-1.0, 0.0], -1.0).unwrap()],
        )
        .unwrap();
        let rec = FeatureRow::compute("q", &q, &MonteCarloConfig::default())
            .unwrap()
            .record();
        assert_eq!((rec[7].as_str(), rec[9].as_str()), ("null", "null"));
    }
}
