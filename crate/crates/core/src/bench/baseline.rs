//! Comparison learners: unweighted logistic regression, a hinge-loss linear
//! SVM and a shallow CART tree.

use serde::{Deserialize, Serialize};

use super::tree::{TreeModel, DEFAULT_MAX_DEPTH};
use crate::data::{dot, Dataset, HyperParams, Label, LinearModel, NoiseProfile};
use crate::error::{Error, Result};
use crate::loss::{add_elastic_net_gradient, Gradient};
use crate::optim::{run_until_converged, ConvergenceRecord, Objective, Optimizer};
use crate::train::{fit_weighted, NoisePolicy, TrainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    LinearSvm,
    Logistic,
    DecisionTree,
}

/// Anything that maps a feature vector to a label.
pub trait Classify {
    fn classify(&self, x: &[f64]) -> Result<Label>;
}

impl Classify for LinearModel {
    fn classify(&self, x: &[f64]) -> Result<Label> {
        self.predict(x)
    }
}

impl Classify for TreeModel {
    fn classify(&self, x: &[f64]) -> Result<Label> {
        self.predict(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classifier {
    Linear(LinearModel),
    Tree(TreeModel),
}

impl Classify for Classifier {
    fn classify(&self, x: &[f64]) -> Result<Label> {
        match self {
            Classifier::Linear(m) => m.predict(x),
            Classifier::Tree(t) => t.predict(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaselineFit {
    pub classifier: Classifier,
    /// `None` for the tree, which is not iterative.
    pub convergence: Option<ConvergenceRecord>,
}

/// Hyperparameters the logistic baseline actually uses: pure ridge, no noise
/// term. With `alpha = 0` the value of `rho` is irrelevant.
pub fn logistic_params(hp: &HyperParams) -> HyperParams {
    HyperParams { lambda: 0.0, rho: 0.0, ..hp.clone() }
}

pub fn fit_baseline(data: &Dataset, method: Baseline, hp: &HyperParams, optimizer: Optimizer) -> Result<BaselineFit> {
    hp.validate()?;
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    match method {
        Baseline::Logistic => {
            let cfg = TrainConfig {
                hp: logistic_params(hp),
                optimizer,
                policy: NoisePolicy::Off,
                ..TrainConfig::default()
            };
            let (model, record) = fit_weighted(data, NoiseProfile::zeros(data.len()), None, &cfg)?;
            Ok(BaselineFit { classifier: Classifier::Linear(model), convergence: Some(record) })
        }
        Baseline::LinearSvm => {
            let mut objective = HingeObjective { data, alpha: hp.alpha };
            let (model, record) = run_until_converged(&mut objective, LinearModel::zeros(data.dim()), optimizer, hp)?;
            Ok(BaselineFit { classifier: Classifier::Linear(model), convergence: Some(record) })
        }
        Baseline::DecisionTree => Ok(BaselineFit {
            classifier: Classifier::Tree(TreeModel::fit(data, DEFAULT_MAX_DEPTH)?),
            convergence: None,
        }),
    }
}

/// `mean(max(0, 1 − y(w·x + b))) + α/2·‖w‖²`.
pub struct HingeObjective<'a> {
    pub data: &'a Dataset,
    pub alpha: f64,
}

impl Objective for HingeObjective<'_> {
    fn num_examples(&self) -> usize {
        self.data.len()
    }

    fn value(&mut self, model: &LinearModel) -> f64 {
        let hinge: f64 = self
            .data
            .iter()
            .map(|e| (1.0 - e.y.as_f64() * (dot(&model.w, &e.x) + model.b)).max(0.0))
            .sum();
        let sq: f64 = model.w.iter().map(|v| v * v).sum();
        hinge / self.data.len() as f64 + 0.5 * self.alpha * sq
    }

    fn gradient(&mut self, model: &LinearModel) -> Gradient {
        let mut grad = Gradient::zeros(model.dim());
        for e in self.data.iter() {
            let y = e.y.as_f64();
            if y * (dot(&model.w, &e.x) + model.b) < 1.0 {
                for (g, x) in grad.w.iter_mut().zip(&e.x) {
                    *g -= y * x;
                }
                grad.b -= y;
            }
        }
        let n = self.data.len() as f64;
        grad.w.iter_mut().for_each(|g| *g /= n);
        grad.b /= n;
        add_elastic_net_gradient(&mut grad.w, &model.w, self.alpha, 0.0);
        grad
    }
}
