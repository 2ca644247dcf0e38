//! Command-line front end.
//!
//! ```text
//! halfspace train  --data train.csv [--policy skip] [--out model.json]
//! halfspace detect --data train.csv [--nu 0.1] [--out detector.json]
//! halfspace bench  [--rates 0.1,0.3] [--methods proposed,logistic] [--out results]
//! halfspace report [--out results]
//! ```
//!
//! Every command also accepts `--config run.toml`; flags given on the command
//! line override the file.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use halfspace_core::bench::{accuracy, fit_baseline, Classifier, Method, NoiseMode};
use halfspace_core::noise::{default_gamma, noise_profile, PerClassDetector, SmoOptions};
use halfspace_core::{adaptive_fit, NoisePolicy, NoiseProfile, Optimizer, TrainedModel};

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::io::{load_dataset, write_json, CsvOptions};
use crate::report::{render_dir, REPORT_MD};
use crate::runner::run_bench;

#[derive(Debug, Parser)]
#[command(name = "halfspace", version, about = "Noise-robust halfspace learning")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Fit a model on a CSV dataset and write it as JSON.
    Train(Flags),
    /// Fit the per-class noise detectors and write them as JSON.
    Detect(Flags),
    /// Run the synthetic noise benchmark and write CSV tables.
    Bench(Flags),
    /// Render the markdown report of a results directory.
    Report(Flags),
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input CSV: features then a -1/+1 (or 0/1) label per row.
    #[arg(long)]
    data: Option<PathBuf>,
    /// The input CSV has a header line.
    #[arg(long)]
    header: bool,
    /// Output file (train, detect) or directory (bench, report).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Learner for train: proposed, logistic or linear_svm.
    #[arg(long)]
    method: Option<Method>,
    /// Comma-separated noise rates, increasing, each in [0, 1).
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Comma-separated: proposed, linear_svm, logistic, decision_tree.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    methods: Option<Vec<Method>>,
    /// Number of seeds per noise rate.
    #[arg(long)]
    seeds: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Noise injection: random_flip, boundary_flip or feature_corrupt.
    #[arg(long)]
    mode: Option<NoiseMode>,
    /// Generated points per benchmark cell.
    #[arg(long)]
    n: Option<usize>,
    /// Feature dimension of generated data.
    #[arg(long)]
    d: Option<usize>,
    /// skip, downweight or off.
    #[arg(long)]
    policy: Option<NoisePolicy>,
    /// adam or sgd.
    #[arg(long)]
    optimizer: Option<Optimizer>,
    /// Weight of the noise term in the reported objective.
    #[arg(long)]
    lambda: Option<f64>,
    /// Elastic-net strength.
    #[arg(long)]
    alpha: Option<f64>,
    /// L1 share of the elastic net, in [0, 1].
    #[arg(long)]
    rho: Option<f64>,
    /// Learning rate.
    #[arg(long)]
    eta: Option<f64>,
    /// One-class SVM ν: expected outlier fraction.
    #[arg(long)]
    nu: Option<f64>,
    /// RBF kernel width; defaults to 1/(d·feature variance).
    #[arg(long)]
    gamma: Option<f64>,
    /// Noise-rate threshold for skipping or down-weighting.
    #[arg(long)]
    tau: Option<f64>,
    /// Iteration cap.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Relative objective change that counts as converged.
    #[arg(long)]
    tol: Option<f64>,
}

impl Flags {
    fn into_config(self, command: Command) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.command = command;
        if self.data.is_some() {
            cfg.data = self.data;
        }
        cfg.header |= self.header;
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.method.is_some() {
            cfg.method = self.method;
        }
        let spec = &mut cfg.experiment;
        if let Some(v) = self.rates {
            spec.rates = v;
        }
        if let Some(v) = self.methods {
            spec.methods = v;
        }
        if let Some(v) = self.seeds {
            spec.seeds = v;
        }
        if let Some(v) = self.seed {
            spec.master_seed = v;
            spec.train.seed = v;
        }
        if let Some(v) = self.mode {
            spec.mode = v;
        }
        if let Some(v) = self.n {
            spec.n = v;
        }
        if let Some(v) = self.d {
            spec.d = v;
        }
        if let Some(v) = self.policy {
            spec.train.policy = v;
        }
        if let Some(v) = self.optimizer {
            spec.train.optimizer = v;
        }
        if let Some(v) = self.nu {
            // The benchmark derives ν from the injected rate unless one is fixed.
            spec.nu = Some(v);
            spec.train.hp.nu = v;
        }
        let hp = &mut spec.train.hp;
        if let Some(v) = self.lambda {
            hp.lambda = v;
        }
        if let Some(v) = self.alpha {
            hp.alpha = v;
        }
        if let Some(v) = self.rho {
            hp.rho = v;
        }
        if let Some(v) = self.eta {
            hp.eta = v;
        }
        if self.gamma.is_some() {
            hp.gamma = self.gamma;
        }
        if let Some(v) = self.tau {
            hp.tau = v;
        }
        if let Some(v) = self.max_iterations {
            hp.max_iterations = v;
        }
        if let Some(v) = self.tol {
            hp.tol = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let text = e.render().to_string();
            let text = text.trim_end().strip_prefix("error: ").unwrap_or(text.trim_end());
            return Err(CliError::Config(text.to_owned()));
        }
    };
    match cli.command {
        Cmd::Train(f) => train(&f.into_config(Command::Train)?),
        Cmd::Detect(f) => detect(&f.into_config(Command::Detect)?),
        Cmd::Bench(f) => bench(&f.into_config(Command::Bench)?),
        Cmd::Report(f) => report(&f.into_config(Command::Report)?),
    }
}

fn load_input(cfg: &RunConfig) -> Result<halfspace_core::Dataset, CliError> {
    let path = cfg.data.as_ref().ok_or_else(|| CliError::Config("field `data`: an input CSV is required".into()))?;
    Ok(load_dataset(path, CsvOptions { header: cfg.header })?)
}

/// Fits the model `cfg` asks for on `data`.
pub fn fit_model(data: &halfspace_core::Dataset, cfg: &RunConfig) -> Result<TrainedModel, CliError> {
    let train = &cfg.experiment.train;
    let fitted = match cfg.train_method().baseline() {
        None => adaptive_fit(data, train)?,
        Some(baseline) => {
            let fit = fit_baseline(data, baseline, &train.hp, train.optimizer)?;
            let (Classifier::Linear(model), Some(convergence)) = (fit.classifier, fit.convergence) else {
                return Err(CliError::Config("field `method`: train needs a linear method".into()));
            };
            TrainedModel {
                model,
                convergence,
                noise: NoiseProfile::zeros(data.len()),
                skipped_count: 0,
                detector: None,
            }
        }
    };
    if fitted.convergence.diverged || !fitted.model.is_finite() {
        return Err(CliError::Numerical(format!(
            "training diverged after {} iterations",
            fitted.convergence.iterations_used
        )));
    }
    Ok(fitted)
}

fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let data = load_input(cfg)?;
    let fitted = fit_model(&data, cfg)?;
    let out = cfg.out_path();
    write_json(&fitted, &out).map_err(|e| CliError::io(&out, e))?;
    println!(
        "accuracy={:.6} iterations={} converged={} skipped={}",
        accuracy(&fitted.model, &data)?,
        fitted.convergence.iterations_used,
        fitted.convergence.converged,
        fitted.skipped_count,
    );
    Ok(())
}

fn detect(cfg: &RunConfig) -> Result<(), CliError> {
    let data = load_input(cfg)?;
    let hp = &cfg.experiment.train.hp;
    let gamma = hp.gamma.unwrap_or_else(|| default_gamma(&data));
    let detector = PerClassDetector::fit_with(
        &data,
        hp.nu,
        gamma,
        &cfg.experiment.train.detector_source,
        SmoOptions::default(),
    )?;
    let profile = noise_profile(&detector, &data)?;
    let out = cfg.out_path();
    write_json(&detector, &out).map_err(|e| CliError::io(&out, e))?;
    let flagged = profile.rates().iter().filter(|r| **r > hp.tau).count();
    println!(
        "support_positive={} support_negative={} mean_rate={:.6} above_tau={}",
        detector.positive.alphas.len(),
        detector.negative.alphas.len(),
        profile.mean(),
        flagged,
    );
    Ok(())
}

fn bench(cfg: &RunConfig) -> Result<(), CliError> {
    let outcome = run_bench(cfg)?;
    println!(
        "cells={} rows={} out={}",
        outcome.cells.len(),
        outcome.rows.len(),
        cfg.out_path().display()
    );
    Ok(())
}

fn report(cfg: &RunConfig) -> Result<(), CliError> {
    let dir = cfg.out_path();
    let text = render_dir(&dir)?;
    let path = dir.join(REPORT_MD);
    std::fs::write(&path, &text).map_err(|e| CliError::io(&path, e))?;
    print!("{text}");
    Ok(())
}
