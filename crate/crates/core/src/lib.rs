//! Noise-robust learning of halfspaces.
//!
//! The pieces fit together as follows: a [`noise::PerClassDetector`] (one
//! RBF one-class SVM per label) scores every training example with a noise
//! rate in `[0, 1]`; [`train::adaptive_fit`] turns those rates into per-example
//! weights (skip or down-weight) and minimises an elastic-net regularised
//! logistic objective ([`loss`]) with Adam or plain gradient descent
//! ([`optim`]). The [`bench`] module carries the synthetic halfspace
//! generator, adversarial noise injection, baseline learners and metrics.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the experiment
//! runner and the CLI live in the `halfspace` companion crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod bench;
pub mod data;
mod error;
pub mod loss;
pub mod noise;
pub mod optim;
pub mod train;

pub use data::{Dataset, HyperParams, Label, LabeledExample, LinearModel, NoiseProfile};
pub use error::{Error, Result};
pub use loss::{composite_gradient, composite_objective, Gradient, ObjectiveValue};
pub use noise::{OcSvmModel, PerClassDetector};
pub use optim::{AdamState, ConvergenceRecord, Optimizer};
pub use train::{adaptive_fit, NoisePolicy, TrainConfig, TrainedModel};
