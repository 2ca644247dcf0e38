//! One-class SVM noise detector.
//!
//! Each class gets its own ν-one-class SVM with an RBF kernel, solved in the
//! dual
//!
//! ```text
//! minimise ½ Σᵢ Σⱼ αᵢ αⱼ K(xᵢ, xⱼ)   s.t.  0 ≤ αᵢ ≤ 1/(νN),  Σ αᵢ = 1
//! ```
//!
//! by SMO with maximal-violating-pair selection. An example's noise rate is
//! a sigmoid of the negated decision value of the model for its own label.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, NoiseProfile};
use crate::error::{Error, Result};

/// `exp(−γ‖x₁ − x₂‖²)`.
pub fn rbf_kernel(x1: &[f64], x2: &[f64], gamma: f64) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::DimensionMismatch {
            expected: x1.len(),
            found: x2.len(),
        });
    }
    Ok(rbf_unchecked(x1, x2, gamma))
}

#[inline]
fn rbf_unchecked(x1: &[f64], x2: &[f64], gamma: f64) -> f64 {
    let dist2: f64 = x1.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
    libm::exp(-gamma * dist2)
}

/// Scale-free RBF width: `1 / (d · var(features))`. Falls back to `1/d`
/// when the features have no spread.
pub fn default_gamma(data: &Dataset) -> f64 {
    let d = data.dim().max(1) as f64;
    let var = data.feature_variance();
    if var > 0.0 && var.is_finite() {
        1.0 / (d * var)
    } else {
        1.0 / d
    }
}

/// Dense Gram matrix, row-major.
pub fn gram_matrix(points: &[&[f64]], gamma: f64) -> Vec<f64> {
    let n = points.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        gram[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let k = rbf_unchecked(points[i], points[j], gamma);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
    }
    gram
}

/// `½ αᵀ K α`.
pub fn dual_objective(gram: &[f64], alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut total = 0.0;
    for i in 0..n {
        if alphas[i] == 0.0 {
            continue;
        }
        let row = &gram[i * n..(i + 1) * n];
        let qa: f64 = row.iter().zip(alphas).map(|(k, a)| k * a).sum();
        total += alphas[i] * qa;
    }
    0.5 * total
}

/// Default SMO stopping tolerance on the maximal KKT violation. Decision
/// values within this distance of zero are on the margin.
pub const MARGIN_TOL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoOptions {
    /// Stop once the maximal KKT violation falls below this.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self {
            tol: MARGIN_TOL,
            max_iterations: 100_000,
        }
    }
}

/// A fitted one-class SVM. Only the points with `α > 0` are kept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OcSvmModel {
    pub alphas: Vec<f64>,
    #[serde(rename = "support")]
    pub support_points: Vec<Vec<f64>>,
    pub offset: f64,
    pub gamma: f64,
    pub nu: f64,
}

/// Result of [`fit_ocsvm`], with solver diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct OcSvmFit {
    pub model: OcSvmModel,
    /// Dual variables for every training point, in input order.
    pub alphas: Vec<f64>,
    pub dual_objective: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit; the model is then the last iterate.
    pub converged: bool,
}

impl OcSvmModel {
    pub fn dim(&self) -> usize {
        self.support_points.first().map_or(0, Vec::len)
    }

    /// `Σ αᵢ K(sᵢ, x) − offset`. Positive inside the estimated support.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let sum: f64 = self
            .alphas
            .iter()
            .zip(&self.support_points)
            .map(|(a, s)| a * rbf_unchecked(s, x, self.gamma))
            .sum();
        Ok(sum - self.offset)
    }

    /// Strictly outside the estimated support: `decision_value < −MARGIN_TOL`.
    /// Free support vectors solve to within the tolerance of zero and count
    /// as on the margin.
    pub fn is_outlier(&self, x: &[f64]) -> Result<bool> {
        Ok(self.decision_value(x)? < -MARGIN_TOL)
    }
}

/// Free-function form of [`OcSvmModel::decision_value`].
pub fn decision_value(model: &OcSvmModel, x: &[f64]) -> Result<f64> {
    model.decision_value(x)
}

/// Fits a ν-one-class SVM on `points` with default solver options.
pub fn fit_ocsvm(points: &[&[f64]], nu: f64, gamma: f64) -> Result<OcSvmFit> {
    fit_ocsvm_with(points, nu, gamma, SmoOptions::default())
}

pub fn fit_ocsvm_with(points: &[&[f64]], nu: f64, gamma: f64, opts: SmoOptions) -> Result<OcSvmFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParam { name: "nu", reason: "must lie in (0, 1]" });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParam { name: "gamma", reason: "must be finite and > 0" });
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
    }
    // ν·N ≥ 1, with a little slack for rates such as 0.1 · 10.
    if nu * (n as f64) < 1.0 - 1e-9 {
        return Err(Error::Infeasible { nu, n });
    }
    let bound = (1.0 / (nu * n as f64)).min(1.0);

    let gram = gram_matrix(points, gamma);
    let mut alphas = initial_alphas(n, bound);
    let mut grad: Vec<f64> = (0..n)
        .map(|i| {
            let row = &gram[i * n..(i + 1) * n];
            row.iter().zip(&alphas).map(|(k, a)| k * a).sum()
        })
        .collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        let Some((i, j, violation)) = select_pair(&alphas, &grad, bound) else {
            converged = true;
            break;
        };
        if violation < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Move mass δ from j to i; the objective changes by
        // δ(Gᵢ − Gⱼ) + ½δ²(Kᵢᵢ + Kⱼⱼ − 2Kᵢⱼ).
        let curvature = (gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j]).max(1e-12);
        let unclipped = (grad[j] - grad[i]) / curvature;
        let delta = unclipped.min(bound - alphas[i]).min(alphas[j]);
        if delta <= 0.0 {
            // Cannot happen for a genuine violating pair; bail out rather than spin.
            break;
        }
        alphas[i] += delta;
        alphas[j] -= delta;
        // Snap to the box so bounded/free classification stays exact.
        if bound - alphas[i] < 1e-15 * bound {
            alphas[i] = bound;
        }
        if alphas[j] < 1e-15 * bound {
            alphas[j] = 0.0;
        }
        let (row_i, row_j) = (i * n, j * n);
        for (k, g) in grad.iter_mut().enumerate() {
            *g += delta * (gram[row_i + k] - gram[row_j + k]);
        }
    }

    let offset = compute_offset(&alphas, &grad, bound);
    let dual = dual_objective(&gram, &alphas);
    let (support_alphas, support_points) = alphas
        .iter()
        .zip(points)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, p)| (*a, p.to_vec()))
        .unzip();

    Ok(OcSvmFit {
        model: OcSvmModel {
            alphas: support_alphas,
            support_points,
            offset,
            gamma,
            nu,
        },
        alphas,
        dual_objective: dual,
        iterations,
        converged,
    })
}

/// Feasible start: the first ⌊1/bound⌋ points at the bound, the remainder
/// of the unit mass on the next one.
fn initial_alphas(n: usize, bound: f64) -> Vec<f64> {
    let mut alphas = vec![0.0; n];
    let mut remaining = 1.0;
    for a in alphas.iter_mut() {
        if remaining <= 0.0 {
            break;
        }
        let take = bound.min(remaining);
        *a = take;
        remaining -= take;
        if remaining < 1e-15 {
            remaining = 0.0;
        }
    }
    alphas
}

/// Maximal violating pair: `i` can grow (α < bound) with the smallest
/// gradient, `j` can shrink (α > 0) with the largest. Returns the pair and
/// the violation `Gⱼ − Gᵢ`.
fn select_pair(alphas: &[f64], grad: &[f64], bound: f64) -> Option<(usize, usize, f64)> {
    let mut up: Option<(usize, f64)> = None;
    let mut low: Option<(usize, f64)> = None;
    for (k, (&a, &g)) in alphas.iter().zip(grad).enumerate() {
        if a < bound && up.is_none_or(|(_, best)| g < best) {
            up = Some((k, g));
        }
        if a > 0.0 && low.is_none_or(|(_, best)| g > best) {
            low = Some((k, g));
        }
    }
    let ((i, gi), (j, gj)) = (up?, low?);
    Some((i, j, gj - gi))
}

/// Threshold ρ: mean gradient over free support vectors, or the midpoint of
/// the feasible interval when every α sits on a bound.
fn compute_offset(alphas: &[f64], grad: &[f64], bound: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut upper = f64::INFINITY; // min G over α = 0
    let mut lower = f64::NEG_INFINITY; // max G over α = bound
    for (&a, &g) in alphas.iter().zip(grad) {
        if a >= bound {
            lower = lower.max(g);
        } else if a <= 0.0 {
            upper = upper.min(g);
        } else {
            free_sum += g;
            free_count += 1;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else if upper.is_finite() && lower.is_finite() {
        0.5 * (upper + lower)
    } else if lower.is_finite() {
        lower
    } else {
        upper
    }
}

/// Sigmoid map from a decision value to a noise rate: `1 / (1 + exp(k·f))`.
#[inline]
pub fn rate_from_decision(decision: f64, slope: f64) -> f64 {
    let z = slope * decision;
    if z >= 0.0 {
        let e = libm::exp(-z);
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + libm::exp(z))
    }
}

/// Slope for which the 90th percentile of `decisions` maps to a rate of at
/// most 0.1.
pub fn calibrate_slope(decisions: &[f64]) -> f64 {
    const LN_9: f64 = 2.197_224_577_336_219_6;
    let mut sorted = decisions.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return 1.0;
    }
    let idx = ((0.9 * sorted.len() as f64) as usize).min(sorted.len() - 1);
    let p90 = sorted[idx];
    let scale = if p90 > 0.0 {
        p90
    } else {
        sorted.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)))
    };
    if scale > 0.0 && scale.is_finite() {
        // Nudged up so rounding cannot land the percentile just above 0.1.
        LN_9 / scale * (1.0 + 1e-12)
    } else {
        1.0
    }
}

/// Which examples the per-class detectors are fit on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorSource {
    /// Every training example of the class.
    #[default]
    AllData,
    /// Only the listed dataset indices (a trusted subset).
    Trusted(Vec<usize>),
}

/// One one-class SVM per label, plus the calibrated sigmoid slopes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerClassDetector {
    pub positive: OcSvmModel,
    pub negative: OcSvmModel,
    pub slope_positive: f64,
    pub slope_negative: f64,
}

impl PerClassDetector {
    pub fn fit(data: &Dataset, nu: f64, gamma: f64) -> Result<Self> {
        Self::fit_with(data, nu, gamma, &DetectorSource::AllData, SmoOptions::default())
    }

    pub fn fit_with(
        data: &Dataset,
        nu: f64,
        gamma: f64,
        source: &DetectorSource,
        opts: SmoOptions,
    ) -> Result<Self> {
        let selected: Vec<usize> = match source {
            DetectorSource::AllData => (0..data.len()).collect(),
            DetectorSource::Trusted(indices) => {
                if let Some(&bad) = indices.iter().find(|&&i| i >= data.len()) {
                    return Err(Error::LengthMismatch { expected: data.len(), found: bad + 1 });
                }
                indices.clone()
            }
        };
        let fit_class = |label: Label| -> Result<(OcSvmModel, f64)> {
            let points: Vec<&[f64]> = selected
                .iter()
                .map(|&i| &data.examples()[i])
                .filter(|e| e.y == label)
                .map(|e| e.x.as_slice())
                .collect();
            let fit = fit_ocsvm_with(&points, nu, gamma, opts)?;
            let decisions: Vec<f64> = points
                .iter()
                .map(|p| fit.model.decision_value(p))
                .collect::<Result<_>>()?;
            let slope = calibrate_slope(&decisions);
            Ok((fit.model, slope))
        };
        let (positive, slope_positive) = fit_class(Label::Positive)?;
        let (negative, slope_negative) = fit_class(Label::Negative)?;
        Ok(Self {
            positive,
            negative,
            slope_positive,
            slope_negative,
        })
    }

    pub fn model_for(&self, label: Label) -> (&OcSvmModel, f64) {
        match label {
            Label::Positive => (&self.positive, self.slope_positive),
            Label::Negative => (&self.negative, self.slope_negative),
        }
    }

    /// Noise rate of a single labelled point, scored by its own label's model.
    pub fn rate(&self, x: &[f64], label: Label) -> Result<f64> {
        let (model, slope) = self.model_for(label);
        Ok(rate_from_decision(model.decision_value(x)?, slope))
    }
}

/// Per-example noise rates for `data`.
pub fn noise_profile(detector: &PerClassDetector, data: &Dataset) -> Result<NoiseProfile> {
    let rates = data
        .iter()
        .map(|e| detector.rate(&e.x, e.y))
        .collect::<Result<Vec<_>>>()?;
    NoiseProfile::new(rates)
}
