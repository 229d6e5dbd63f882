//! Cross-evaluation: every solver on every labelled instance set.

use copevolve::evolver::derive_seed;
use copevolve::{median, solve, Problem64, SolverConfig, SolverKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::io::{cell, csv_bytes};

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSet {
    pub label: String,
    pub problems: Vec<Problem64>,
}

/// One (set, solver) entry: statistics over instances × repeats, or the
/// reason the cell could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossEvalCell {
    pub set: String,
    pub solver: SolverKind,
    pub median_fen: Option<f64>,
    pub success_rate: Option<f64>,
    pub runs: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossEvalTable {
    /// Row-major: sets in input order, solvers in input order within each set.
    pub cells: Vec<CrossEvalCell>,
}

impl CrossEvalTable {
    pub fn cell(&self, set: &str, solver: SolverKind) -> Option<&CrossEvalCell> {
        self.cells
            .iter()
            .find(|c| c.set == set && c.solver == solver)
    }

    pub const CSV_HEADER: [&'static str; 6] = [
        "set",
        "solver",
        "median_fen",
        "success_rate",
        "runs",
        "error",
    ];

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let rows: Vec<Vec<String>> = self
            .cells
            .iter()
            .map(|c| {
                vec![
                    c.set.clone(),
                    c.solver.name().to_string(),
                    cell(c.median_fen),
                    cell(c.success_rate),
                    c.runs.to_string(),
                    c.error.clone().unwrap_or_else(|| "null".into()),
                ]
            })
            .collect();
        csv_bytes(&Self::CSV_HEADER, &rows)
    }
}

/// Runs each solver `repeats` times on every instance of every set. Run `r` on
/// instance `i` of set `s` uses the same seed for every solver.
pub fn run_cross_eval(
    sets: &[InstanceSet],
    solvers: &[SolverConfig],
    repeats: usize,
    seed: u64,
) -> Result<CrossEvalTable> {
    if sets.is_empty() || solvers.is_empty() || sets.iter().any(|s| s.problems.is_empty()) {
        return Err(HarnessError::Usage(
            "cross-evaluation needs non-empty instance sets and solvers".into(),
        ));
    }
    if repeats == 0 {
        return Err(HarnessError::Usage(
            "cross-evaluation needs repeats >= 1".into(),
        ));
    }
    let jobs: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|s| (0..solvers.len()).map(move |k| (s, k)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(s, k)| evaluate_cell(&sets[s], s, &solvers[k], repeats, seed))
        .collect();
    Ok(CrossEvalTable { cells })
}

fn evaluate_cell(
    set: &InstanceSet,
    set_index: usize,
    solver: &SolverConfig,
    repeats: usize,
    seed: u64,
) -> CrossEvalCell {
    let runs = set.problems.len() * repeats;
    let outcomes: std::result::Result<Vec<(f64, bool)>, String> = set
        .problems
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..repeats).map(move |r| (i, p, r)))
        .map(|(i, p, r)| {
            let run_seed = derive_seed(seed, &[set_index as u64, i as u64, r as u64]);
            solve(p, solver, run_seed)
                .map(|o| (o.fen as f64, o.solved))
                .map_err(|e| format!("instance {i}: {e}"))
        })
        .collect();
    match outcomes {
        Ok(o) => {
            let fens: Vec<f64> = o.iter().map(|x| x.0).collect();
            let solved = o.iter().filter(|x| x.1).count();
            CrossEvalCell {
                set: set.label.clone(),
                solver: solver.kind,
                median_fen: median(&fens),
                success_rate: Some(solved as f64 / runs as f64),
                runs,
                error: None,
            }
        }
        Err(e) => CrossEvalCell {
            set: set.label.clone(),
            solver: solver.kind,
            median_fen: None,
            success_rate: None,
            runs,
            error: Some(e),
        },
    }
}
