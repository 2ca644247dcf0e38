use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::baseline::Classify;
use super::Method;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Fraction of correctly classified examples.
pub fn accuracy<C: Classify + ?Sized>(model: &C, data: &Dataset) -> Result<f64> {
    Ok(correct_count(model, data)? as f64 / data.len() as f64)
}

/// Fraction of misclassified examples, `1 − accuracy`.
pub fn error_rate<C: Classify + ?Sized>(model: &C, data: &Dataset) -> Result<f64> {
    Ok(1.0 - accuracy(model, data)?)
}

pub fn correct_count<C: Classify + ?Sized>(model: &C, data: &Dataset) -> Result<usize> {
    let mut correct = 0;
    for e in data.iter() {
        if model.classify(&e.x)? == e.y {
            correct += 1;
        }
    }
    Ok(correct)
}

/// `(TP + TN) / total`.
pub fn accuracy_from_counts(true_positives: usize, true_negatives: usize, total: usize) -> f64 {
    (true_positives + true_negatives) as f64 / total as f64
}

/// Finite-difference slope magnitudes `|Δacc / Δrate|` between consecutive
/// rows. The first row is the anchor (normally the clean, rate-0 run) and
/// produces no output of its own.
pub fn noise_sensitivity(series: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if series.len() < 2 {
        return Err(Error::TooFewRows { needed: 2, found: series.len() });
    }
    series
        .windows(2)
        .map(|pair| {
            let ((r0, a0), (r1, a1)) = (pair[0], pair[1]);
            if r1 <= r0 {
                return Err(Error::NonIncreasingRates(r1));
            }
            Ok((r1, libm::fabs(a1 - a0) / (r1 - r0)))
        })
        .collect()
}

/// One row of the accuracy / sensitivity / convergence tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub noise_rate: f64,
    /// Mean held-out accuracy over seeds.
    pub accuracy_by_method: BTreeMap<Method, f64>,
    /// Sample standard deviation of the accuracy over seeds.
    pub accuracy_std_by_method: BTreeMap<Method, f64>,
    pub sensitivity_by_method: BTreeMap<Method, f64>,
    /// Median iterations over seeds; iterative methods only.
    pub iterations_by_method: BTreeMap<Method, f64>,
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    libm::sqrt(values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64)
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}
