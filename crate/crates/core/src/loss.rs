//! Logistic base loss, the noise-augmented elastic-net objective and its
//! analytic gradient.
//!
//! The objective is
//!
//! ```text
//! L(w, b) = data_term + λ·mean(rates) + α·((1−ρ)/2·‖w‖² + ρ·‖w‖₁)
//! ```
//!
//! where `data_term` is the (optionally weighted) mean logistic loss. The
//! noise term does not depend on the parameters, so it never reaches the
//! gradient. The bias is not penalised.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::{dot, Dataset, HyperParams, LabeledExample, LinearModel, NoiseProfile};
use crate::error::{Error, Result};
use crate::optim::Objective;

/// Gradient with respect to `(w, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Gradient {
    pub fn zeros(dim: usize) -> Self {
        Self { w: vec![0.0; dim], b: 0.0 }
    }

    /// ∞-norm over every coordinate, bias included.
    pub fn max_abs(&self) -> f64 {
        self.w.iter().fold(libm::fabs(self.b), |acc, g| acc.max(libm::fabs(*g)))
    }

    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.w.iter().all(|g| g.is_finite())
    }
}

/// Decomposed objective value. `total` is always the plain sum of the
/// three terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub total: f64,
    pub data_term: f64,
    pub noise_term: f64,
    pub penalty_term: f64,
}

impl ObjectiveValue {
    fn new(data_term: f64, noise_term: f64, penalty_term: f64) -> Self {
        Self {
            total: data_term + noise_term + penalty_term,
            data_term,
            noise_term,
            penalty_term,
        }
    }
}

/// `ln(1 + exp(−margin))`, evaluated without overflow.
#[inline]
pub fn logistic_loss(margin: f64) -> f64 {
    if margin > 0.0 {
        libm::log1p(libm::exp(-margin))
    } else {
        -margin + libm::log1p(libm::exp(margin))
    }
}

/// `σ(−margin) = 1 / (1 + exp(margin))`; the negated derivative of
/// [`logistic_loss`].
#[inline]
pub fn logistic_weight(margin: f64) -> f64 {
    if margin >= 0.0 {
        let e = libm::exp(-margin);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + libm::exp(margin))
    }
}

/// Logistic loss of one example.
pub fn base_loss(model: &LinearModel, example: &LabeledExample) -> Result<f64> {
    let score = model.score(&example.x)?;
    Ok(logistic_loss(example.y.as_f64() * score))
}

/// `α·((1−ρ)/2·‖w‖² + ρ·‖w‖₁)`.
pub fn elastic_net_penalty(w: &[f64], alpha: f64, rho: f64) -> f64 {
    let sq: f64 = w.iter().map(|v| v * v).sum();
    let l1: f64 = w.iter().map(|v| libm::fabs(*v)).sum();
    alpha * ((1.0 - rho) / 2.0 * sq + rho * l1)
}

/// Subgradient sign with `sign(0) = 0`.
#[inline]
fn l1_sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Adds `α(1−ρ)·w + αρ·sign(w)` to `grad_w`.
pub fn add_elastic_net_gradient(grad_w: &mut [f64], w: &[f64], alpha: f64, rho: f64) {
    let ridge = alpha * (1.0 - rho);
    let lasso = alpha * rho;
    for (g, &wi) in grad_w.iter_mut().zip(w) {
        *g += ridge * wi + lasso * l1_sign(wi);
    }
}

/// The composite objective bound to a dataset and a frozen noise profile.
///
/// With per-example weights ω the data term becomes `Σ ωᵢ ℓᵢ / Σ ωᵢ`;
/// examples with zero weight are never touched.
#[derive(Clone, Debug)]
pub struct ElasticNetLogistic<'a> {
    data: &'a Dataset,
    weights: Option<&'a [f64]>,
    weight_sum: f64,
    noise_term: f64,
    alpha: f64,
    rho: f64,
}

impl<'a> ElasticNetLogistic<'a> {
    pub fn new(data: &'a Dataset, noise: &NoiseProfile, hp: &HyperParams) -> Result<Self> {
        if noise.len() != data.len() {
            return Err(Error::LengthMismatch {
                expected: data.len(),
                found: noise.len(),
            });
        }
        Ok(Self {
            data,
            weights: None,
            weight_sum: data.len() as f64,
            noise_term: hp.lambda * noise.mean(),
            alpha: hp.alpha,
            rho: hp.rho,
        })
    }

    /// Applies per-example weights in `[0, 1]`. Fails when they sum to zero.
    pub fn with_weights(mut self, weights: &'a [f64]) -> Result<Self> {
        if weights.len() != self.data.len() {
            return Err(Error::LengthMismatch {
                expected: self.data.len(),
                found: weights.len(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::Unlearnable);
        }
        self.weights = Some(weights);
        self.weight_sum = sum;
        Ok(self)
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[i])
    }

    fn check_dim(&self, model: &LinearModel) -> Result<()> {
        if model.dim() != self.data.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.data.dim(),
                found: model.dim(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, model: &LinearModel) -> ObjectiveValue {
        let mut acc = 0.0;
        for (i, ex) in self.data.iter().enumerate() {
            let weight = self.weight(i);
            if weight == 0.0 {
                continue;
            }
            let margin = ex.y.as_f64() * (dot(&model.w, &ex.x) + model.b);
            acc += if self.weights.is_some() {
                weight * logistic_loss(margin)
            } else {
                logistic_loss(margin)
            };
        }
        ObjectiveValue::new(
            acc / self.weight_sum,
            self.noise_term,
            elastic_net_penalty(&model.w, self.alpha, self.rho),
        )
    }

    fn gradient_over<I: Iterator<Item = usize>>(&self, model: &LinearModel, indices: I) -> Gradient {
        let mut grad = Gradient::zeros(model.dim());
        let mut total_weight = 0.0;
        let examples = self.data.examples();
        for i in indices {
            let weight = self.weight(i);
            if weight == 0.0 {
                continue;
            }
            let ex = &examples[i];
            let y = ex.y.as_f64();
            let margin = y * (dot(&model.w, &ex.x) + model.b);
            let coef = if self.weights.is_some() {
                -weight * y * logistic_weight(margin)
            } else {
                -y * logistic_weight(margin)
            };
            for (g, xj) in grad.w.iter_mut().zip(&ex.x) {
                *g += coef * xj;
            }
            grad.b += coef;
            total_weight += weight;
        }
        if total_weight > 0.0 {
            for g in &mut grad.w {
                *g /= total_weight;
            }
            grad.b /= total_weight;
        }
        add_elastic_net_gradient(&mut grad.w, &model.w, self.alpha, self.rho);
        grad
    }

    pub fn full_gradient(&self, model: &LinearModel) -> Gradient {
        self.gradient_over(model, 0..self.data.len())
    }
}

impl Objective for ElasticNetLogistic<'_> {
    fn num_examples(&self) -> usize {
        self.data.len()
    }

    fn value(&mut self, model: &LinearModel) -> f64 {
        self.evaluate(model).total
    }

    fn gradient(&mut self, model: &LinearModel) -> Gradient {
        self.full_gradient(model)
    }

    fn batch_gradient(&mut self, model: &LinearModel, indices: &[usize]) -> Gradient {
        self.gradient_over(model, indices.iter().copied())
    }
}

/// Unweighted composite objective, decomposed into its three terms.
pub fn composite_objective(
    model: &LinearModel,
    data: &Dataset,
    noise: &NoiseProfile,
    hp: &HyperParams,
) -> Result<ObjectiveValue> {
    let objective = ElasticNetLogistic::new(data, noise, hp)?;
    objective.check_dim(model)?;
    Ok(objective.evaluate(model))
}

/// Gradient of [`composite_objective`]. Independent of λ and of the noise
/// profile.
pub fn composite_gradient(
    model: &LinearModel,
    data: &Dataset,
    noise: &NoiseProfile,
    hp: &HyperParams,
) -> Result<Gradient> {
    let objective = ElasticNetLogistic::new(data, noise, hp)?;
    objective.check_dim(model)?;
    Ok(objective.full_gradient(model))
}
