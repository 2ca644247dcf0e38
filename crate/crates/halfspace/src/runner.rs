//! Parallel execution of a benchmark grid and the results directory layout.

use std::path::Path;

use halfspace_core::bench::{run_cell, summarize, CellResult, ExperimentSpec, MetricsRow};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::report::{self, ACCURACY_CSV, CELLS_CSV, CONVERGENCE_CSV, REPORT_MD, SENSITIVITY_CSV};

pub const MANIFEST: &str = "manifest.toml";

#[derive(Clone, Debug)]
pub struct BenchOutcome {
    pub cells: Vec<CellResult>,
    pub rows: Vec<MetricsRow>,
}

/// Runs every (rate, seed) cell of `spec`. Output order does not depend on
/// thread scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<BenchOutcome, CliError> {
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let jobs: Vec<(f64, usize)> =
        spec.grid_rates().into_iter().flat_map(|r| (0..spec.seeds).map(move |s| (r, s))).collect();
    let per_cell: Vec<Vec<CellResult>> =
        jobs.par_iter().map(|&(rate, seed)| run_cell(spec, rate, seed)).collect::<Result<_, _>>()?;
    let cells: Vec<CellResult> = per_cell.into_iter().flatten().collect();
    if cells.iter().any(|c| !c.accuracy.is_finite()) {
        return Err(CliError::Numerical("non-finite accuracy".into()));
    }
    let rows = summarize(spec, &cells)?;
    Ok(BenchOutcome { cells, rows })
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(path, e))
}

/// Runs the benchmark in `cfg` and writes the CSV tables, the markdown report
/// and a manifest that reproduces the run into `cfg.out_path()`.
pub fn run_bench(cfg: &RunConfig) -> Result<BenchOutcome, CliError> {
    let spec = &cfg.experiment;
    spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let dir = cfg.out_path();
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let manifest = RunConfig { command: Command::Bench, ..cfg.clone() };
    write(&dir, MANIFEST, &manifest.to_toml()?)?;

    let outcome = run_experiment(spec)?;
    write(&dir, ACCURACY_CSV, &report::accuracy_csv(&spec.methods, &outcome.rows))?;
    write(&dir, SENSITIVITY_CSV, &report::sensitivity_csv(&spec.methods, &outcome.rows))?;
    write(&dir, CONVERGENCE_CSV, &report::convergence_csv(&spec.methods, &outcome.rows))?;
    write(&dir, CELLS_CSV, &report::cells_csv(&outcome.cells))?;
    write(&dir, REPORT_MD, &report::render_dir(&dir)?)?;
    Ok(outcome)
}
