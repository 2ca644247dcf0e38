//! Plain gradient descent, Adam, and the convergence loop that counts
//! iterations.
//!
//! One iteration is one full-batch gradient step. The loop stops when the
//! gradient ∞-norm drops below `tol`, when the relative objective change
//! stays below `tol` for [`STALL_WINDOW`] consecutive iterations, or at
//! `max_iterations`.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{HyperParams, LinearModel};
use crate::error::{Error, Result};
use crate::loss::Gradient;

/// Consecutive small-change iterations required to declare convergence.
pub const STALL_WINDOW: usize = 3;

/// Something the optimizers can minimise.
pub trait Objective {
    /// Number of examples, for mini-batching. Zero when not applicable.
    fn num_examples(&self) -> usize {
        0
    }

    fn value(&mut self, model: &LinearModel) -> f64;

    fn gradient(&mut self, model: &LinearModel) -> Gradient;

    /// Gradient over a subset of examples. Defaults to the full gradient.
    fn batch_gradient(&mut self, model: &LinearModel, _indices: &[usize]) -> Gradient {
        self.gradient(model)
    }

    /// Called once before every iteration (or epoch, in mini-batch mode).
    fn start_iteration(&mut self, _iteration: usize) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Adam,
    Sgd,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Adam => "adam",
            Optimizer::Sgd => "sgd",
        }
    }
}

impl core::str::FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adam" => Ok(Optimizer::Adam),
            "sgd" => Ok(Optimizer::Sgd),
            _ => Err(Error::InvalidParam {
                name: "optimizer",
                reason: "expected `adam` or `sgd`",
            }),
        }
    }
}

/// Adam moment estimates. The last slot of `m` and `v` belongs to the bias.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(dim: usize) -> Self {
        Self {
            m: vec![0.0; dim + 1],
            v: vec![0.0; dim + 1],
            t: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub iterations_used: usize,
    pub converged: bool,
    /// The objective went non-finite; the returned model is the best iterate.
    pub diverged: bool,
    pub final_objective: f64,
    pub objective_trace: Vec<f64>,
}

fn check_gradient(model: &LinearModel, grad: &Gradient) -> Result<()> {
    if grad.w.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: grad.w.len(),
        });
    }
    if !grad.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(())
}

/// `w ← w − η·∇w`, `b ← b − η·∇b`.
pub fn sgd_step(model: &LinearModel, grad: &Gradient, hp: &HyperParams) -> Result<LinearModel> {
    check_gradient(model, grad)?;
    let eta = hp.eta;
    Ok(LinearModel {
        w: model.w.iter().zip(&grad.w).map(|(w, g)| w - eta * g).collect(),
        b: model.b - eta * grad.b,
    })
}

/// One Adam update with bias-corrected moments. The stabiliser sits inside
/// the square root: `Δ = −η·m̂ / √(v̂ + ε)`.
pub fn adam_step(
    model: &LinearModel,
    grad: &Gradient,
    mut state: AdamState,
    hp: &HyperParams,
) -> Result<(LinearModel, AdamState)> {
    check_gradient(model, grad)?;
    if state.m.len() != model.dim() + 1 || state.v.len() != model.dim() + 1 {
        return Err(Error::DimensionMismatch {
            expected: model.dim() + 1,
            found: state.m.len(),
        });
    }
    state.t += 1;
    let (b1, b2) = (hp.beta1, hp.beta2);
    let correction1 = 1.0 - libm::pow(b1, state.t as f64);
    let correction2 = 1.0 - libm::pow(b2, state.t as f64);

    let mut update = |slot: usize, param: f64, g: f64| -> f64 {
        let m = b1 * state.m[slot] + (1.0 - b1) * g;
        let v = b2 * state.v[slot] + (1.0 - b2) * g * g;
        state.m[slot] = m;
        state.v[slot] = v;
        let m_hat = m / correction1;
        let v_hat = v / correction2;
        param - hp.eta * m_hat / libm::sqrt(v_hat + hp.epsilon)
    };

    let dim = model.dim();
    let w = (0..dim).map(|j| update(j, model.w[j], grad.w[j])).collect();
    let b = update(dim, model.b, grad.b);
    Ok((LinearModel { w, b }, state))
}

enum Stepper {
    Sgd,
    Adam(AdamState),
}

impl Stepper {
    fn new(optimizer: Optimizer, dim: usize) -> Self {
        match optimizer {
            Optimizer::Sgd => Stepper::Sgd,
            Optimizer::Adam => Stepper::Adam(AdamState::new(dim)),
        }
    }

    fn step(&mut self, model: &LinearModel, grad: &Gradient, hp: &HyperParams) -> Result<LinearModel> {
        match self {
            Stepper::Sgd => sgd_step(model, grad, hp),
            Stepper::Adam(state) => {
                let (next, new_state) = adam_step(model, grad, core::mem::take(state), hp)?;
                *state = new_state;
                Ok(next)
            }
        }
    }
}

impl Default for AdamState {
    fn default() -> Self {
        Self::new(0)
    }
}

/// Tracks the trace, the best iterate and the stall counter.
struct Progress {
    trace: Vec<f64>,
    previous: f64,
    best: (LinearModel, f64),
    stall: usize,
    tol: f64,
}

enum Verdict {
    Continue,
    Converged,
    Diverged,
}

impl Progress {
    fn new(model: &LinearModel, value: f64, tol: f64) -> Self {
        Self {
            trace: Vec::new(),
            previous: value,
            best: (model.clone(), value),
            stall: 0,
            tol,
        }
    }

    fn record(&mut self, model: &LinearModel, value: f64) -> Verdict {
        if !value.is_finite() || !model.is_finite() {
            return Verdict::Diverged;
        }
        self.trace.push(value);
        if value < self.best.1 {
            self.best = (model.clone(), value);
        }
        let change = libm::fabs(self.previous - value) / libm::fabs(self.previous).max(f64::MIN_POSITIVE);
        self.previous = value;
        if change < self.tol {
            self.stall += 1;
            if self.stall >= STALL_WINDOW {
                return Verdict::Converged;
            }
        } else {
            self.stall = 0;
        }
        Verdict::Continue
    }

    fn finish(self, model: LinearModel, converged: bool, diverged: bool) -> (LinearModel, ConvergenceRecord) {
        let (model, final_objective) = if diverged {
            self.best
        } else {
            (model, self.previous)
        };
        let record = ConvergenceRecord {
            iterations_used: self.trace.len(),
            converged,
            diverged,
            final_objective,
            objective_trace: self.trace,
        };
        (model, record)
    }
}

/// Full-batch optimisation until convergence or `hp.max_iterations`.
///
/// A non-finite objective or gradient does not raise an error: the record is
/// flagged `diverged` and the best iterate seen so far is returned.
pub fn run_until_converged<O: Objective + ?Sized>(
    objective: &mut O,
    initial: LinearModel,
    optimizer: Optimizer,
    hp: &HyperParams,
) -> Result<(LinearModel, ConvergenceRecord)> {
    hp.validate()?;
    let mut model = initial;
    let start = objective.value(&model);
    if !start.is_finite() {
        return Err(Error::NonFinite("initial objective"));
    }
    let mut progress = Progress::new(&model, start, hp.tol);
    let mut stepper = Stepper::new(optimizer, model.dim());
    let (mut converged, mut diverged) = (false, false);

    for iteration in 0..hp.max_iterations {
        objective.start_iteration(iteration);
        let grad = objective.gradient(&model);
        if !grad.is_finite() {
            diverged = true;
            break;
        }
        if grad.max_abs() < hp.tol {
            converged = true;
            break;
        }
        model = stepper.step(&model, &grad, hp)?;
        let value = objective.value(&model);
        match progress.record(&model, value) {
            Verdict::Continue => {}
            Verdict::Converged => {
                converged = true;
                break;
            }
            Verdict::Diverged => {
                diverged = true;
                break;
            }
        }
    }
    Ok(progress.finish(model, converged, diverged))
}

/// Mini-batch variant: each iteration is one epoch over a seeded shuffle,
/// stepping once per batch. Not used for iteration counting.
pub fn run_minibatch<O: Objective + ?Sized>(
    objective: &mut O,
    initial: LinearModel,
    optimizer: Optimizer,
    hp: &HyperParams,
    batch_size: usize,
    seed: u64,
) -> Result<(LinearModel, ConvergenceRecord)> {
    hp.validate()?;
    if batch_size == 0 {
        return Err(Error::InvalidParam {
            name: "batch_size",
            reason: "must be at least 1",
        });
    }
    let n = objective.num_examples();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut model = initial;
    let start = objective.value(&model);
    if !start.is_finite() {
        return Err(Error::NonFinite("initial objective"));
    }
    let mut progress = Progress::new(&model, start, hp.tol);
    let mut stepper = Stepper::new(optimizer, model.dim());
    let (mut converged, mut diverged) = (false, false);

    'epochs: for epoch in 0..hp.max_iterations {
        objective.start_iteration(epoch);
        order.shuffle(&mut rng);
        for batch in order.chunks(batch_size) {
            let grad = objective.batch_gradient(&model, batch);
            if !grad.is_finite() {
                diverged = true;
                break 'epochs;
            }
            model = stepper.step(&model, &grad, hp)?;
        }
        let value = objective.value(&model);
        match progress.record(&model, value) {
            Verdict::Continue => {}
            Verdict::Converged => {
                converged = true;
                break;
            }
            Verdict::Diverged => {
                diverged = true;
                break;
            }
        }
    }
    Ok(progress.finish(model, converged, diverged))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// f(w, b) = ½(‖w‖² + b²)
    struct Bowl;

    impl Objective for Bowl {
        fn value(&mut self, m: &LinearModel) -> f64 {
            0.5 * (m.w.iter().map(|v| v * v).sum::<f64>() + m.b * m.b)
        }
        fn gradient(&mut self, m: &LinearModel) -> Gradient {
            Gradient { w: m.w.clone(), b: m.b }
        }
    }

    fn grad(w: &[f64], b: f64) -> Gradient {
        Gradient { w: w.to_vec(), b }
    }

    #[test]
    fn sgd_examples() {
        let hp = HyperParams { eta: 0.1, ..HyperParams::default() };
        let m = LinearModel::new(vec![1.0, 1.0], 0.0).unwrap();
        assert_eq!(sgd_step(&m, &grad(&[0.0, 0.0], 0.0), &hp).unwrap(), m);
        let m = LinearModel::new(vec![1.0, 0.0], 0.0).unwrap();
        let next = sgd_step(&m, &grad(&[2.0, -4.0], 0.0), &hp).unwrap();
        assert!((next.w[0] - 0.8).abs() < 1e-15 && (next.w[1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn sgd_halves_on_bowl() {
        let hp = HyperParams { eta: 0.5, ..HyperParams::default() };
        let mut m = LinearModel::new(vec![3.0, -1.0], 2.0).unwrap();
        for _ in 0..10 {
            let g = Bowl.gradient(&m);
            let next = sgd_step(&m, &g, &hp).unwrap();
            for (a, b) in next.w.iter().zip(&m.w) {
                assert_eq!(*a, b / 2.0);
            }
            assert_eq!(next.b, m.b / 2.0);
            m = next;
        }
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let hp = HyperParams::default();
        let m = LinearModel::zeros(1);
        assert!(sgd_step(&m, &grad(&[f64::NAN], 0.0), &hp).is_err());
        assert!(adam_step(&m, &grad(&[f64::INFINITY], 0.0), AdamState::new(1), &hp).is_err());
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op() {
        let hp = HyperParams::default();
        let m = LinearModel::new(vec![0.5, -2.0], 1.0).unwrap();
        let (next, state) = adam_step(&m, &grad(&[0.0, 0.0], 0.0), AdamState::new(2), &hp).unwrap();
        assert_eq!(next, m);
        assert!(state.m.iter().chain(&state.v).all(|v| *v == 0.0));
        assert_eq!(state.t, 1);
    }

    #[test]
    fn adam_first_step_is_normalised() {
        let hp = HyperParams { eta: 0.05, ..HyperParams::default() };
        let g = [3.0, -0.2, 1e-3];
        let m = LinearModel::zeros(3);
        let (next, _) = adam_step(&m, &grad(&g, -7.0), AdamState::new(3), &hp).unwrap();
        for (w, gi) in next.w.iter().zip(&g) {
            let expected = -hp.eta * gi / libm::sqrt(gi * gi + hp.epsilon);
            assert!((w - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn bowl_iteration_count() {
        // ‖w_k‖∞ = 2^-k from w₀ = (1, 1), b = 0; first k with 2^-k < 1e-8 is 27.
        let hp = HyperParams { eta: 0.5, tol: 1e-8, max_iterations: 1000, ..HyperParams::default() };
        let (m, rec) =
            run_until_converged(&mut Bowl, LinearModel::new(vec![1.0, 1.0], 0.0).unwrap(), Optimizer::Sgd, &hp)
                .unwrap();
        assert!(rec.converged);
        assert_eq!(rec.iterations_used, 27);
        assert_eq!(rec.objective_trace.len(), 27);
        assert!(m.w[0] < 1e-8);
    }

    #[test]
    fn already_at_minimum() {
        let hp = HyperParams::default();
        let (_, rec) = run_until_converged(&mut Bowl, LinearModel::zeros(2), Optimizer::Adam, &hp).unwrap();
        assert!(rec.converged);
        assert!(rec.iterations_used <= 3);
    }

    #[test]
    fn zero_tolerance_runs_to_the_cap() {
        let hp = HyperParams { tol: 0.0, max_iterations: 40, eta: 0.1, ..HyperParams::default() };
        for opt in [Optimizer::Sgd, Optimizer::Adam] {
            let (_, rec) =
                run_until_converged(&mut Bowl, LinearModel::new(vec![1.0], 1.0).unwrap(), opt, &hp).unwrap();
            assert_eq!(rec.iterations_used, 40);
            assert!(!rec.converged);
        }
    }

    struct Exploding;

    impl Objective for Exploding {
        fn value(&mut self, m: &LinearModel) -> f64 {
            if m.w[0] > 10.0 {
                f64::INFINITY
            } else {
                -m.w[0]
            }
        }
        fn gradient(&mut self, _: &LinearModel) -> Gradient {
            grad(&[-1.0], 0.0)
        }
    }

    #[test]
    fn divergence_returns_best_iterate() {
        let hp = HyperParams { eta: 4.0, ..HyperParams::default() };
        let (m, rec) = run_until_converged(&mut Exploding, LinearModel::zeros(1), Optimizer::Sgd, &hp).unwrap();
        assert!(rec.diverged && !rec.converged);
        assert_eq!(m.w[0], 8.0);
        assert_eq!(rec.final_objective, -8.0);
        assert_eq!(rec.iterations_used, rec.objective_trace.len());
    }
}
