//! Synthetic halfspace data and malicious-noise injection.

use alloc::vec::Vec;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, LabeledExample, LinearModel};
use crate::error::{Error, Result};

/// Resample attempts per point before a margin is declared unattainable.
const RESAMPLE_CAP: usize = 10_000;

/// Half-width of the uniform range the true bias is drawn from.
const BIAS_RANGE: f64 = 0.2;

fn gaussian_vector(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Draws `n` standard-Gaussian points in `d` dimensions labelled by a random
/// unit-norm halfspace. Points closer than `margin` to the boundary are
/// resampled.
pub fn gen_halfspace(n: usize, d: usize, margin: f64, seed: u64) -> Result<(Dataset, LinearModel)> {
    if d == 0 {
        return Err(Error::InvalidParam { name: "d", reason: "must be at least 1" });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = gaussian_vector(&mut rng, d, 1.0);
    let norm = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>());
    if norm > 0.0 {
        w.iter_mut().for_each(|v| *v /= norm);
    } else {
        w[0] = 1.0;
    }
    let b = rng.random_range(-BIAS_RANGE..BIAS_RANGE);
    let truth = LinearModel::new(w, b)?;
    let data = sample_halfspace_with(n, &truth, margin, &mut rng)?;
    Ok((data, truth))
}

/// Like [`gen_halfspace`] but with a caller-supplied ground truth.
pub fn sample_halfspace(n: usize, truth: &LinearModel, margin: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_halfspace_with(n, truth, margin, &mut rng)
}

fn sample_halfspace_with(
    n: usize,
    truth: &LinearModel,
    margin: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if !(margin >= 0.0 && margin.is_finite()) {
        return Err(Error::InvalidParam { name: "margin", reason: "must be finite and >= 0" });
    }
    let d = truth.dim();
    let mut draw = |want: Option<Label>| -> Result<LabeledExample> {
        for _ in 0..RESAMPLE_CAP {
            let x = gaussian_vector(rng, d, 1.0);
            let score = truth.score(&x)?;
            let y = Label::from_score(score);
            if libm::fabs(score) >= margin && want.is_none_or(|l| l == y) {
                return Ok(LabeledExample { x, y });
            }
        }
        Err(Error::MarginUnattainable(margin))
    };
    let mut examples = (0..n).map(|_| draw(None)).collect::<Result<Vec<_>>>()?;
    let positives = examples.iter().filter(|e| e.y == Label::Positive).count();
    if positives == 0 || positives == n {
        let missing = examples[0].y.flipped();
        examples[n - 1] = draw(Some(missing))?;
    }
    Dataset::new(examples)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// Negate uniformly chosen labels.
    RandomFlip,
    /// Negate the labels of the points closest to the true boundary.
    BoundaryFlip,
    /// Replace features with wide Gaussian noise and give them the wrong label.
    FeatureCorrupt,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::RandomFlip => "random_flip",
            NoiseMode::BoundaryFlip => "boundary_flip",
            NoiseMode::FeatureCorrupt => "feature_corrupt",
        }
    }
}

impl core::str::FromStr for NoiseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_flip" => Ok(NoiseMode::RandomFlip),
            "boundary_flip" => Ok(NoiseMode::BoundaryFlip),
            "feature_corrupt" => Ok(NoiseMode::FeatureCorrupt),
            _ => Err(Error::InvalidParam {
                name: "mode",
                reason: "expected random_flip, boundary_flip or feature_corrupt",
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub rate: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if (0.0..1.0).contains(&self.rate) {
            Ok(())
        } else {
            Err(Error::InvalidParam { name: "rate", reason: "must lie in [0, 1)" })
        }
    }

    /// `⌊rate · n⌋`, tolerant of decimal rates such as 0.3 not being exact.
    pub fn corrupted_count(&self, n: usize) -> usize {
        libm::floor(self.rate * n as f64 + 1e-9) as usize
    }
}

/// Corrupts exactly `⌊rate · n⌋` distinct examples. Returns the corrupted
/// dataset and the sorted corrupted indices.
pub fn inject_noise(data: &Dataset, spec: &NoiseSpec, truth: &LinearModel) -> Result<(Dataset, Vec<usize>)> {
    spec.validate()?;
    if truth.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), found: truth.dim() });
    }
    let n = data.len();
    let k = spec.corrupted_count(n);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut examples = data.examples().to_vec();

    let mut chosen: Vec<usize> = match spec.mode {
        NoiseMode::RandomFlip | NoiseMode::FeatureCorrupt => index::sample(&mut rng, n, k).into_vec(),
        NoiseMode::BoundaryFlip => {
            let mut margins = data
                .iter()
                .enumerate()
                .map(|(i, e)| truth.score(&e.x).map(|s| (libm::fabs(s), i)))
                .collect::<Result<Vec<_>>>()?;
            margins.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            margins.into_iter().take(k).map(|(_, i)| i).collect()
        }
    };
    chosen.sort_unstable();

    match spec.mode {
        NoiseMode::RandomFlip | NoiseMode::BoundaryFlip => {
            for &i in &chosen {
                examples[i].y = examples[i].y.flipped();
            }
        }
        NoiseMode::FeatureCorrupt => {
            let scale = 3.0 * libm::sqrt(data.feature_variance()).max(f64::MIN_POSITIVE);
            for &i in &chosen {
                let x = gaussian_vector(&mut rng, data.dim(), scale);
                let y = truth.predict(&x)?.flipped();
                examples[i] = LabeledExample { x, y };
            }
        }
    }
    Ok((Dataset::new(examples)?, chosen))
}
