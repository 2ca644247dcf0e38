//! Benchmark machinery: synthetic data, noise injection, baselines, metrics
//! and the per-cell experiment protocol.

mod baseline;
mod experiment;
mod metrics;
mod synth;
pub mod tree;

use serde::{Deserialize, Serialize};

pub use baseline::{fit_baseline, logistic_params, Baseline, BaselineFit, Classifier, Classify, HingeObjective};
pub use experiment::{derive_seed, run_cell, summarize, CellResult, ExperimentSpec};
pub use metrics::{
    accuracy, accuracy_from_counts, correct_count, error_rate, mean, median, noise_sensitivity, sample_std,
    MetricsRow,
};
pub use synth::{gen_halfspace, inject_noise, sample_halfspace, NoiseMode, NoiseSpec};
pub use tree::TreeModel;

use crate::error::Error;

/// A column of the benchmark tables. The declaration order is the column
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// The adaptive, detector-weighted learner.
    Proposed,
    LinearSvm,
    Logistic,
    DecisionTree,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Proposed, Method::LinearSvm, Method::Logistic, Method::DecisionTree];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::LinearSvm => "linear_svm",
            Method::Logistic => "logistic",
            Method::DecisionTree => "decision_tree",
        }
    }

    /// Human-readable column title for the markdown tables.
    pub fn title(self) -> &'static str {
        match self {
            Method::Proposed => "Proposed",
            Method::LinearSvm => "SVM",
            Method::Logistic => "Logistic Regression",
            Method::DecisionTree => "Decision Tree",
        }
    }

    pub fn is_iterative(self) -> bool {
        self != Method::DecisionTree
    }

    pub fn baseline(self) -> Option<Baseline> {
        match self {
            Method::Proposed => None,
            Method::LinearSvm => Some(Baseline::LinearSvm),
            Method::Logistic => Some(Baseline::Logistic),
            Method::DecisionTree => Some(Baseline::DecisionTree),
        }
    }
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::InvalidParam {
                name: "methods",
                reason: "expected proposed, linear_svm, logistic or decision_tree",
            })
    }
}
