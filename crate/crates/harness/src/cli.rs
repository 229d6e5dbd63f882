//! Command-line interface of the `copevolve` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use copevolve::evolver::derive_seed;
use copevolve::{
    solve, ConstraintKind, Direction, InstanceFile64, Objective, Problem64, SolverKind, Template,
};

use crate::config::{ExperimentConfig, Preset};
use crate::cross_eval::{run_cross_eval, InstanceSet};
use crate::error::{HarnessError, Result};
use crate::feature_table::{feature_csv, FeatureRow};
use crate::io::{read_to_string, write_atomic};
use crate::pipeline::{run_hardness_pipeline, run_single, EntryStatus};
use crate::report::emit_report;

#[derive(Debug, Parser)]
#[command(
    name = "copevolve",
    version,
    about = "Evolve constrained optimization instances that separate solvers"
)]
pub struct Cli {
    /// JSON config file overlaid on the preset.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named preset (desk or paper); defaults to the config file's preset, else desk.
    #[arg(long, global = true, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Override one config value, e.g. `--set evolver.generations=50`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver on an instance file; prints one JSON outcome per run.
    Solve(SolveArgs),
    /// Evolve an instance that is hard (or easy) for one solver.
    EvolveSingle(EvolveSingleArgs),
    /// Evolve hard-for-one instances over the configured grid.
    EvolveMulti(EvolveMultiArgs),
    /// Run every solver on labelled instance directories.
    CrossEval(CrossEvalArgs),
    /// Compute the feature table of instance files.
    Features(FeaturesArgs),
    /// Build long-format feature files and summary tables from a results directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_parser = SolverKind::from_str)]
    pub solver: SolverKind,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Harder,
    Easier,
}

#[derive(Debug, Args)]
pub struct EvolveSingleArgs {
    #[arg(long, value_parser = Objective::from_str)]
    pub objective: Objective,
    #[arg(long, value_parser = ConstraintKind::from_str)]
    pub kind: ConstraintKind,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, value_parser = SolverKind::from_str)]
    pub target: SolverKind,
    #[arg(long, value_enum)]
    pub direction: DirectionArg,
    #[arg(long)]
    pub seed: u64,
    /// Output instance file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvolveMultiArgs {
    #[arg(long)]
    pub seed: u64,
    /// Results directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CrossEvalArgs {
    /// `LABEL=DIR`: every `*.json` instance file in DIR forms the set LABEL.
    #[arg(long = "group", required = true, value_name = "LABEL=DIR")]
    pub groups: Vec<String>,
    #[arg(long)]
    pub seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(long = "instance", required = true)]
    pub instances: Vec<PathBuf>,
    /// Seed of the feasibility-ratio sampling.
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub dir: PathBuf,
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn load_instance(path: &Path) -> Result<Problem64> {
    let file = InstanceFile64::from_json(&read_to_string(path)?)
        .map_err(|e| HarnessError::data(path.display(), e))?;
    Ok(file.to_problem()?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, bytes),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| HarnessError::data("stdout", e)),
    }
}

/// Applies `COPEVOLVE_THREADS` (0 or unset: all cores) to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let threads = match std::env::var("COPEVOLVE_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            HarnessError::Usage(format!("COPEVOLVE_THREADS must be a number, got '{v}'"))
        })?,
        Err(_) => 0,
    };
    if threads > 0 {
        // Only the first configuration in a process takes effect.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let config = || ExperimentConfig::load(cli.preset, cli.config.as_deref(), &cli.overrides);
    match cli.command {
        Command::Solve(a) => {
            let config = config()?;
            let problem = load_instance(&a.instance)?;
            let solver = config.solvers.get(a.solver);
            let mut out = String::new();
            for r in 0..a.runs {
                let seed = if a.runs == 1 {
                    a.seed
                } else {
                    derive_seed(a.seed, &[r as u64])
                };
                let outcome = solve(&problem, solver, seed)?;
                let line =
                    serde_json::json!({ "solver": a.solver, "seed": seed, "outcome": outcome });
                out.push_str(&line.to_string());
                out.push('\n');
            }
            emit(None, out.as_bytes())
        }
        Command::EvolveSingle(a) => {
            let config = config()?;
            let template = Template::new(a.objective, config.pipeline.dimension, a.kind, a.count);
            let direction = match a.direction {
                DirectionArg::Harder => Direction::Harder,
                DirectionArg::Easier => Direction::Easier,
            };
            let fitness = run_single(&config, &template, a.target, direction, a.seed, &a.out)?;
            println!("{}: fitness {fitness}", a.out.display());
            Ok(())
        }
        Command::EvolveMulti(a) => {
            let config = config()?;
            let manifest = run_hardness_pipeline(&config, a.seed, &a.out)?;
            let failed = manifest
                .entries
                .iter()
                .filter(|e| e.status == EntryStatus::Failed)
                .count();
            println!(
                "{} cells, {failed} failed; manifest in {}",
                manifest.entries.len(),
                a.out.display()
            );
            Ok(())
        }
        Command::CrossEval(a) => {
            let config = config()?;
            let mut sets = Vec::new();
            for g in &a.groups {
                let (label, dir) = g.split_once('=').ok_or_else(|| {
                    HarnessError::Usage(format!("group '{g}' is not of the form LABEL=DIR"))
                })?;
                sets.push(InstanceSet {
                    label: label.to_string(),
                    problems: load_dir(Path::new(dir))?,
                });
            }
            let solvers: Vec<_> = SolverKind::ALL
                .iter()
                .map(|&k| config.solvers.get(k).clone())
                .collect();
            let table = run_cross_eval(&sets, &solvers, config.cross_eval_repeats, a.seed)?;
            emit(a.out.as_deref(), &table.to_csv()?)
        }
        Command::Features(a) => {
            let config = config()?;
            let mc = config.features.with_seed(a.seed);
            let rows = a
                .instances
                .iter()
                .map(|p| {
                    let id = p.file_stem().map_or_else(
                        || p.display().to_string(),
                        |s| s.to_string_lossy().into_owned(),
                    );
                    FeatureRow::compute(&id, &load_instance(p)?, &mc)
                })
                .collect::<Result<Vec<_>>>()?;
            emit(a.out.as_deref(), &feature_csv(&rows)?)
        }
        Command::Report(a) => {
            let summary = emit_report(&a.dir)?;
            println!(
                "{} instances, {} files in {}",
                summary.instances,
                summary.files.len(),
                a.dir.join("report").display()
            );
            Ok(())
        }
    }
}

/// Instance files of a directory in file-name order.
fn load_dir(dir: &Path) -> Result<Vec<Problem64>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| HarnessError::data(dir.display(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(HarnessError::Data(format!(
            "{}: no instance files",
            dir.display()
        )));
    }
    paths.iter().map(|p| load_instance(p)).collect()
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("copevolve: {e}");
            e.exit_code()
        }
    }
}
