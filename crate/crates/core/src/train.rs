//! Adaptive training loop: score every example with the per-class detector,
//! turn scores into weights, then minimise the weighted composite objective.
//!
//! The detector is fit once, before optimisation; it does not depend on the
//! model parameters. `refit_each_iteration` re-fits it before every
//! iteration anyway, for experiments that want the literal per-iteration
//! assessment.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, HyperParams, LinearModel, NoiseProfile};
use crate::error::{Error, Result};
use crate::loss::{ElasticNetLogistic, Gradient};
use crate::noise::{default_gamma, noise_profile, DetectorSource, PerClassDetector, SmoOptions};
use crate::optim::{run_minibatch, run_until_converged, ConvergenceRecord, Objective, Optimizer};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoisePolicy {
    /// Drop examples whose rate exceeds τ.
    Skip,
    /// Scale each example's loss by `1 − rate`.
    #[default]
    Downweight,
    /// Ignore the detector entirely.
    Off,
}

impl NoisePolicy {
    pub fn name(self) -> &'static str {
        match self {
            NoisePolicy::Skip => "skip",
            NoisePolicy::Downweight => "downweight",
            NoisePolicy::Off => "off",
        }
    }
}

impl core::str::FromStr for NoisePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip" => Ok(NoisePolicy::Skip),
            "downweight" => Ok(NoisePolicy::Downweight),
            "off" => Ok(NoisePolicy::Off),
            _ => Err(Error::InvalidParam {
                name: "policy",
                reason: "expected `skip`, `downweight` or `off`",
            }),
        }
    }
}

/// Weight in `[0, 1]` given to an example with noise rate `rate`.
pub fn effective_weight(rate: f64, policy: NoisePolicy, tau: f64) -> f64 {
    match policy {
        NoisePolicy::Off => 1.0,
        NoisePolicy::Downweight => 1.0 - rate,
        NoisePolicy::Skip => {
            if rate > tau {
                0.0
            } else {
                1.0
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hp: HyperParams,
    pub optimizer: Optimizer,
    pub policy: NoisePolicy,
    /// Only consumed by mini-batch shuffling; full-batch runs are seed-free.
    pub seed: u64,
    pub detector_source: DetectorSource,
    pub refit_each_iteration: bool,
    /// `None` runs full-batch iterations.
    pub batch_size: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hp: HyperParams::default(),
            optimizer: Optimizer::Adam,
            policy: NoisePolicy::default(),
            seed: 0,
            detector_source: DetectorSource::AllData,
            refit_each_iteration: false,
            batch_size: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub model: LinearModel,
    pub convergence: ConvergenceRecord,
    #[serde(rename = "rates")]
    pub noise: NoiseProfile,
    pub skipped_count: usize,
    #[serde(skip)]
    pub detector: Option<PerClassDetector>,
}

struct DetectorContext<'a> {
    hp: &'a HyperParams,
    policy: NoisePolicy,
    source: &'a DetectorSource,
}

impl DetectorContext<'_> {
    fn score(&self, data: &Dataset) -> Result<(PerClassDetector, NoiseProfile, Vec<f64>)> {
        let gamma = self.hp.gamma.unwrap_or_else(|| default_gamma(data));
        let detector =
            PerClassDetector::fit_with(data, self.hp.nu, gamma, self.source, SmoOptions::default())?;
        let profile = noise_profile(&detector, data)?;
        let weights = profile
            .rates()
            .iter()
            .map(|&r| effective_weight(r, self.policy, self.hp.tau))
            .collect();
        Ok((detector, profile, weights))
    }
}

/// Weighted composite objective that owns its noise profile and weights, so
/// they can be replaced between iterations.
struct AdaptiveObjective<'a> {
    data: &'a Dataset,
    hp: &'a HyperParams,
    noise: NoiseProfile,
    weights: Option<Vec<f64>>,
    refit: Option<DetectorContext<'a>>,
    refit_error: Option<Error>,
}

impl AdaptiveObjective<'_> {
    fn inner(&self) -> ElasticNetLogistic<'_> {
        // Validated once up front in `fit_weighted`.
        let base = ElasticNetLogistic::new(self.data, &self.noise, self.hp)
            .expect("noise profile length checked at construction");
        match &self.weights {
            Some(w) => base.with_weights(w).expect("weights checked at construction"),
            None => base,
        }
    }
}

impl Objective for AdaptiveObjective<'_> {
    fn num_examples(&self) -> usize {
        self.data.len()
    }

    fn value(&mut self, model: &LinearModel) -> f64 {
        self.inner().evaluate(model).total
    }

    fn gradient(&mut self, model: &LinearModel) -> Gradient {
        self.inner().full_gradient(model)
    }

    fn batch_gradient(&mut self, model: &LinearModel, indices: &[usize]) -> Gradient {
        self.inner().batch_gradient(model, indices)
    }

    fn start_iteration(&mut self, iteration: usize) {
        if iteration == 0 || self.refit_error.is_some() {
            return;
        }
        let Some(ctx) = &self.refit else { return };
        match ctx.score(self.data) {
            Ok((_, profile, weights)) => {
                if weights.iter().sum::<f64>() > 0.0 {
                    self.noise = profile;
                    self.weights = Some(weights);
                } else {
                    self.refit_error = Some(Error::Unlearnable);
                }
            }
            Err(e) => self.refit_error = Some(e),
        }
    }
}

/// Minimises the (optionally weighted) composite objective from a zero
/// start. Shared by [`adaptive_fit`] and the logistic baseline.
pub fn fit_weighted(
    data: &Dataset,
    noise: NoiseProfile,
    weights: Option<Vec<f64>>,
    cfg: &TrainConfig,
) -> Result<(LinearModel, ConvergenceRecord)> {
    fit_weighted_inner(data, noise, weights, cfg, None)
}

fn fit_weighted_inner<'a>(
    data: &'a Dataset,
    noise: NoiseProfile,
    weights: Option<Vec<f64>>,
    cfg: &'a TrainConfig,
    refit: Option<DetectorContext<'a>>,
) -> Result<(LinearModel, ConvergenceRecord)> {
    cfg.hp.validate()?;
    {
        let base = ElasticNetLogistic::new(data, &noise, &cfg.hp)?;
        if let Some(w) = &weights {
            base.with_weights(w)?;
        }
    }
    let mut objective = AdaptiveObjective {
        data,
        hp: &cfg.hp,
        noise,
        weights,
        refit,
        refit_error: None,
    };
    let initial = LinearModel::zeros(data.dim());
    let result = match cfg.batch_size {
        None => run_until_converged(&mut objective, initial, cfg.optimizer, &cfg.hp)?,
        Some(batch) => run_minibatch(&mut objective, initial, cfg.optimizer, &cfg.hp, batch, cfg.seed)?,
    };
    if let Some(e) = objective.refit_error {
        return Err(e);
    }
    Ok(result)
}

/// Fits the noise-robust halfspace learner on `data`.
pub fn adaptive_fit(data: &Dataset, cfg: &TrainConfig) -> Result<TrainedModel> {
    cfg.hp.validate()?;
    if cfg.policy == NoisePolicy::Off {
        let noise = NoiseProfile::zeros(data.len());
        let (model, convergence) = fit_weighted(data, noise.clone(), None, cfg)?;
        return Ok(TrainedModel {
            model,
            convergence,
            noise,
            skipped_count: 0,
            detector: None,
        });
    }

    let ctx = DetectorContext {
        hp: &cfg.hp,
        policy: cfg.policy,
        source: &cfg.detector_source,
    };
    let (detector, noise, weights) = ctx.score(data)?;
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::Unlearnable);
    }
    let skipped_count = if cfg.policy == NoisePolicy::Skip {
        weights.iter().filter(|w| **w == 0.0).count()
    } else {
        0
    };
    let refit = cfg.refit_each_iteration.then_some(ctx);
    let (model, convergence) = fit_weighted_inner(data, noise.clone(), Some(weights), cfg, refit)?;
    Ok(TrainedModel {
        model,
        convergence,
        noise,
        skipped_count,
        detector: Some(detector),
    })
}
