//! Domain types shared by every other module.

use alloc::vec::Vec;
use core::convert::TryFrom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label, encoded as -1 / +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    /// Sign of a raw score, with `sign(0) = +1`.
    #[inline]
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    /// Parses a numeric label. Accepts -1/+1 and the 0/1 encoding
    /// (0 maps to -1).
    pub fn from_value(value: f64) -> Result<Self> {
        if value == 1.0 {
            Ok(Label::Positive)
        } else if value == -1.0 || value == 0.0 {
            Ok(Label::Negative)
        } else {
            Err(Error::InvalidLabel(value))
        }
    }
}

impl From<Label> for i8 {
    fn from(label: Label) -> i8 {
        match label {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }
}

impl TryFrom<i8> for Label {
    type Error = Error;

    fn try_from(value: i8) -> Result<Self> {
        match value {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidLabel(f64::from(other))),
        }
    }
}

/// A feature vector with its label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Vec<f64>,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Vec<f64>, y: Label) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self { x, y })
    }
}

/// An ordered, nonempty collection of examples sharing one dimension.
///
/// A single-class dataset is legal; the per-class noise detector is fit on
/// exactly such subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    dim: usize,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        let first = examples.first().ok_or(Error::EmptyDataset)?;
        let dim = first.x.len();
        for ex in &examples {
            if ex.x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: ex.x.len(),
                });
            }
            if ex.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("features"));
            }
        }
        Ok(Self { examples, dim })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn iter(&self) -> core::slice::Iter<'_, LabeledExample> {
        self.examples.iter()
    }

    pub fn into_examples(self) -> Vec<LabeledExample> {
        self.examples
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.examples.iter().filter(|e| e.y == label).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let pos = self.count_label(Label::Positive);
        pos > 0 && pos < self.len()
    }

    /// Feature vectors of every example carrying `label`, in dataset order.
    pub fn class_points(&self, label: Label) -> Vec<&[f64]> {
        self.examples
            .iter()
            .filter(|e| e.y == label)
            .map(|e| e.x.as_slice())
            .collect()
    }

    /// Splits into `[0, at)` and `[at, len)`. Both halves must be nonempty.
    pub fn split_at(&self, at: usize) -> Result<(Dataset, Dataset)> {
        let (head, tail) = self.examples.split_at(at.min(self.len()));
        Ok((Dataset::new(head.to_vec())?, Dataset::new(tail.to_vec())?))
    }

    /// Population variance of all feature entries pooled together.
    pub fn feature_variance(&self) -> f64 {
        let count = (self.len() * self.dim) as f64;
        if count == 0.0 {
            return 0.0;
        }
        let mean = self.iter().flat_map(|e| e.x.iter()).sum::<f64>() / count;
        self.iter()
            .flat_map(|e| e.x.iter())
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / count
    }
}

/// Halfspace classifier `sign(w·x + b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearModel {
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) || !b.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(Self { w, b })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            w: alloc::vec![0.0; dim],
            b: 0.0,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn is_finite(&self) -> bool {
        self.b.is_finite() && self.w.iter().all(|v| v.is_finite())
    }

    /// `w·x + b`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                found: x.len(),
            });
        }
        Ok(dot(&self.w, x) + self.b)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        self.score(x).map(Label::from_score)
    }
}

/// Free-function form of [`LinearModel::predict`].
pub fn predict(model: &LinearModel, x: &[f64]) -> Result<Label> {
    model.predict(x)
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-example noise rates, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NoiseProfile {
    rates: Vec<f64>,
}

impl NoiseProfile {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::RateOutOfRange(bad));
        }
        Ok(Self { rates })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            rates: alloc::vec![0.0; n],
        }
    }

    #[inline]
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.rates.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.rates.is_empty() {
            0.0
        } else {
            self.rates.iter().sum::<f64>() / self.rates.len() as f64
        }
    }
}

/// Every tunable of the learner. Use [`HyperParams::validate`] (called by
/// every consumer) after building one by hand or deserialising it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperParams {
    /// Weight of the mean noise rate in the reported objective.
    pub lambda: f64,
    /// Elastic-net strength.
    pub alpha: f64,
    /// Elastic-net mix: 0 is pure ridge, 1 is pure lasso.
    pub rho: f64,
    /// Learning rate, shared by SGD and Adam.
    pub eta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// One-class SVM ν.
    pub nu: f64,
    /// RBF width. `None` picks `1 / (d · var(features))` from the data.
    pub gamma: Option<f64>,
    /// Skip threshold for the skip policy.
    pub tau: f64,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            alpha: 1e-3,
            rho: 0.5,
            eta: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            nu: 0.2,
            gamma: None,
            tau: 0.9,
            max_iterations: 1000,
            tol: 1e-6,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, name: &'static str, reason: &'static str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParam { name, reason })
            }
        }
        check(self.lambda >= 0.0 && self.lambda.is_finite(), "lambda", "must be finite and >= 0")?;
        check(self.alpha >= 0.0 && self.alpha.is_finite(), "alpha", "must be finite and >= 0")?;
        check((0.0..=1.0).contains(&self.rho), "rho", "must lie in [0, 1]")?;
        check(self.eta > 0.0 && self.eta.is_finite(), "eta", "must be finite and > 0")?;
        check((0.0..1.0).contains(&self.beta1), "beta1", "must lie in [0, 1)")?;
        check((0.0..1.0).contains(&self.beta2), "beta2", "must lie in [0, 1)")?;
        check(self.epsilon > 0.0 && self.epsilon.is_finite(), "epsilon", "must be finite and > 0")?;
        check(self.nu > 0.0 && self.nu <= 1.0, "nu", "must lie in (0, 1]")?;
        if let Some(gamma) = self.gamma {
            check(gamma > 0.0 && gamma.is_finite(), "gamma", "must be finite and > 0")?;
        }
        check(self.tau > 0.0 && self.tau <= 1.0, "tau", "must lie in (0, 1]")?;
        check(self.max_iterations >= 1, "max_iterations", "must be at least 1")?;
        // tol = 0 is accepted: it disables early stopping.
        check(self.tol >= 0.0 && self.tol.is_finite(), "tol", "must be finite and >= 0")?;
        Ok(())
    }
}
