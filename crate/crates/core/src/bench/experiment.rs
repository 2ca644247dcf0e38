//! One experiment cell is (noise rate, seed): generate a halfspace, hold out
//! a clean test split, corrupt the training split, fit every method and
//! score it on the clean test split.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::baseline::fit_baseline;
use super::metrics::{accuracy, mean, median, noise_sensitivity, sample_std, MetricsRow};
use super::synth::{gen_halfspace, inject_noise, NoiseMode, NoiseSpec};
use super::Method;
use crate::error::{Error, Result};
use crate::optim::Optimizer;
use crate::train::{adaptive_fit, TrainConfig};

/// Smallest ν used when it is derived from the injected noise rate.
pub const MIN_AUTO_NU: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub n: usize,
    pub d: usize,
    pub margin: f64,
    /// Share of each generated set held out, uncorrupted, for scoring.
    pub test_fraction: f64,
    pub mode: NoiseMode,
    pub rates: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: usize,
    pub master_seed: u64,
    /// Configuration of the proposed learner; its `hp` also drives the baselines.
    pub train: TrainConfig,
    /// Fixed ν for the detector. `None` uses the injected rate (at least
    /// [`MIN_AUTO_NU`]).
    pub nu: Option<f64>,
    pub baseline_optimizer: Optimizer,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            n: 2000,
            d: 10,
            margin: 0.0,
            test_fraction: 0.2,
            mode: NoiseMode::FeatureCorrupt,
            rates: (1..=9).map(|i| i as f64 / 10.0).collect(),
            methods: Method::ALL.to_vec(),
            seeds: 10,
            master_seed: 0,
            train: TrainConfig::default(),
            nu: None,
            baseline_optimizer: Optimizer::Sgd,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason| Err(Error::InvalidParam { name, reason });
        if self.rates.is_empty() {
            return invalid("rates", "must not be empty");
        }
        if self.rates.iter().any(|r| !(0.0..1.0).contains(r)) {
            return invalid("rates", "must lie in [0, 1)");
        }
        if self.rates.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("rates", "must be sorted and distinct");
        }
        if self.methods.is_empty() {
            return invalid("methods", "must not be empty");
        }
        if (1..self.methods.len()).any(|i| self.methods[..i].contains(&self.methods[i])) {
            return invalid("methods", "must not repeat");
        }
        if self.seeds == 0 {
            return invalid("seeds", "must be at least 1");
        }
        if self.d == 0 {
            return invalid("d", "must be at least 1");
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return invalid("test_fraction", "must lie in (0, 1)");
        }
        let n_test = self.test_size();
        if n_test == 0 || n_test + 2 > self.n {
            return invalid("n", "too small for the train/test split");
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu <= 1.0) {
                return invalid("nu", "must lie in (0, 1]");
            }
        }
        self.train.hp.validate()
    }

    pub fn test_size(&self) -> usize {
        libm::round(self.n as f64 * self.test_fraction) as usize
    }

    /// Rates actually run: the requested ones, preceded by the clean anchor
    /// when 0 is not among them.
    pub fn grid_rates(&self) -> Vec<f64> {
        let mut grid = Vec::with_capacity(self.rates.len() + 1);
        if self.rates.first().is_none_or(|r| *r > 0.0) {
            grid.push(0.0);
        }
        grid.extend_from_slice(&self.rates);
        grid
    }

    pub fn nu_for(&self, rate: f64) -> f64 {
        self.nu.unwrap_or(rate.max(MIN_AUTO_NU))
    }
}

/// Deterministic sub-seed for cell coordinates `(stream, word)`.
pub fn derive_seed(master: u64, stream: u64, word: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(word) * 2);
    rng.next_u64()
}

fn rate_key(rate: f64) -> u64 {
    libm::round(rate * 1e6) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub noise_rate: f64,
    pub seed_index: usize,
    pub method: Method,
    pub accuracy: f64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
}

/// Runs every method of `spec` on one (rate, seed) cell.
pub fn run_cell(spec: &ExperimentSpec, rate: f64, seed_index: usize) -> Result<Vec<CellResult>> {
    let stream = seed_index as u64;
    let (data, truth) = gen_halfspace(spec.n, spec.d, spec.margin, derive_seed(spec.master_seed, stream, 0))?;
    let (train, test) = data.split_at(spec.n - spec.test_size())?;
    let noise = NoiseSpec {
        rate,
        mode: spec.mode,
        seed: derive_seed(spec.master_seed, stream, 1 + rate_key(rate)),
    };
    let (noisy, _) = inject_noise(&train, &noise, &truth)?;

    spec.methods
        .iter()
        .map(|&method| {
            let (acc, record) = match method.baseline() {
                None => {
                    let mut cfg = spec.train.clone();
                    cfg.hp.nu = spec.nu_for(rate);
                    let fitted = adaptive_fit(&noisy, &cfg)?;
                    (accuracy(&fitted.model, &test)?, Some(fitted.convergence))
                }
                Some(baseline) => {
                    let fitted = fit_baseline(&noisy, baseline, &spec.train.hp, spec.baseline_optimizer)?;
                    (accuracy(&fitted.classifier, &test)?, fitted.convergence)
                }
            };
            Ok(CellResult {
                noise_rate: rate,
                seed_index,
                method,
                accuracy: acc,
                iterations: record.as_ref().map(|r| r.iterations_used),
                converged: record.as_ref().map(|r| r.converged),
            })
        })
        .collect()
}

/// Aggregates cell results (covering [`ExperimentSpec::grid_rates`]) into one
/// row per requested rate.
pub fn summarize(spec: &ExperimentSpec, cells: &[CellResult]) -> Result<Vec<MetricsRow>> {
    let grid = spec.grid_rates();
    let pick = |rate: f64, method: Method| -> Vec<&CellResult> {
        cells.iter().filter(|c| c.noise_rate == rate && c.method == method).collect()
    };

    let mut mean_acc: BTreeMap<Method, Vec<(f64, f64)>> = BTreeMap::new();
    for &method in &spec.methods {
        let series = grid
            .iter()
            .map(|&rate| {
                let accs: Vec<f64> = pick(rate, method).iter().map(|c| c.accuracy).collect();
                if accs.is_empty() {
                    return Err(Error::TooFewRows { needed: 1, found: 0 });
                }
                Ok((rate, mean(&accs)))
            })
            .collect::<Result<Vec<_>>>()?;
        mean_acc.insert(method, series);
    }
    let mut sensitivity: BTreeMap<Method, Vec<(f64, f64)>> = BTreeMap::new();
    for (method, series) in &mean_acc {
        let values = if series.len() >= 2 { noise_sensitivity(series)? } else { Vec::new() };
        sensitivity.insert(*method, values);
    }

    let rows = spec
        .rates
        .iter()
        .map(|&rate| {
            let mut row = MetricsRow {
                noise_rate: rate,
                accuracy_by_method: BTreeMap::new(),
                accuracy_std_by_method: BTreeMap::new(),
                sensitivity_by_method: BTreeMap::new(),
                iterations_by_method: BTreeMap::new(),
            };
            for &method in &spec.methods {
                let chosen = pick(rate, method);
                let accs: Vec<f64> = chosen.iter().map(|c| c.accuracy).collect();
                row.accuracy_by_method.insert(method, mean(&accs));
                row.accuracy_std_by_method.insert(method, sample_std(&accs));
                if let Some(&(_, s)) = sensitivity[&method].iter().find(|(r, _)| *r == rate) {
                    row.sensitivity_by_method.insert(method, s);
                }
                let iters: Vec<f64> = chosen.iter().filter_map(|c| c.iterations).map(|i| i as f64).collect();
                if !iters.is_empty() {
                    row.iterations_by_method.insert(method, median(&iters));
                }
            }
            row
        })
        .collect();
    Ok(rows)
}
