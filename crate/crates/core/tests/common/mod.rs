//! Test-side oracles and data helpers, independent of the code under test.

#![allow(dead_code)]

use halfspace_core::{Dataset, HyperParams, Label, LabeledExample, LinearModel, NoiseProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn gaussian_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| gaussian(rng, d)).collect()
}

/// Gaussian features with coin-flip labels (both classes forced present).
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let examples = (0..n)
        .map(|i| {
            let y = match i {
                0 => Label::Positive,
                1 => Label::Negative,
                _ if rng.random_bool(0.5) => Label::Positive,
                _ => Label::Negative,
            };
            LabeledExample { x: gaussian(rng, d), y }
        })
        .collect();
    Dataset::new(examples).unwrap()
}

pub fn random_model(rng: &mut ChaCha8Rng, d: usize) -> LinearModel {
    LinearModel::new(gaussian(rng, d), rng.sample(StandardNormal)).unwrap()
}

/// Two Gaussian blobs centred at ±`sep`·e₁ with standard deviation `sd`,
/// half of the points in each, labelled by blob.
pub fn two_blobs(rng: &mut ChaCha8Rng, n: usize, d: usize, sep: f64, sd: f64) -> Dataset {
    let examples = (0..n)
        .map(|i| {
            let y = if i % 2 == 0 { Label::Positive } else { Label::Negative };
            let mut x: Vec<f64> = gaussian(rng, d).into_iter().map(|v| v * sd).collect();
            x[0] += y.as_f64() * sep;
            LabeledExample { x, y }
        })
        .collect();
    Dataset::new(examples).unwrap()
}

/// Composite objective written out directly from its definition.
pub fn objective_oracle(model: &LinearModel, data: &Dataset, rates: &[f64], hp: &HyperParams) -> f64 {
    let n = data.len() as f64;
    let data_term: f64 = data
        .iter()
        .map(|e| {
            let s: f64 = model.w.iter().zip(&e.x).map(|(w, x)| w * x).sum::<f64>() + model.b;
            (1.0 + (-e.y.as_f64() * s).exp()).ln()
        })
        .sum::<f64>()
        / n;
    let noise_term = hp.lambda * rates.iter().sum::<f64>() / n;
    let l2: f64 = model.w.iter().map(|w| w * w).sum();
    let l1: f64 = model.w.iter().map(|w| w.abs()).sum();
    data_term + noise_term + hp.alpha * ((1.0 - hp.rho) / 2.0 * l2 + hp.rho * l1)
}

/// Central finite differences of `f` at `model`, coordinates `w₁…w_d, b`.
pub fn finite_difference(model: &LinearModel, h: f64, f: impl Fn(&LinearModel) -> f64) -> Vec<f64> {
    let d = model.dim();
    (0..=d)
        .map(|k| {
            let mut plus = model.clone();
            let mut minus = model.clone();
            if k < d {
                plus.w[k] += h;
                minus.w[k] -= h;
            } else {
                plus.b += h;
                minus.b -= h;
            }
            (f(&plus) - f(&minus)) / (2.0 * h)
        })
        .collect()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

pub fn zero_noise(data: &Dataset) -> NoiseProfile {
    NoiseProfile::zeros(data.len())
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

pub fn dense_gram(points: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    points.iter().map(|p| points.iter().map(|q| rbf(p, q, gamma)).collect()).collect()
}

pub fn quadratic_form(gram: &[Vec<f64>], a: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, row) in gram.iter().enumerate() {
        for (j, k) in row.iter().enumerate() {
            total += a[i] * k * a[j];
        }
    }
    0.5 * total
}

/// Euclidean projection onto `{0 ≤ a ≤ c, Σa = 1}` by bisection on the shift.
fn project(v: &[f64], c: f64) -> Vec<f64> {
    let mass = |tau: f64| v.iter().map(|x| (x - tau).clamp(0.0, c)).sum::<f64>();
    let mut lo = v.iter().cloned().fold(f64::INFINITY, f64::min) - c - 1.0;
    let mut hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    v.iter().map(|x| (x - tau).clamp(0.0, c)).collect()
}

/// Minimum of `½ aᵀKa` over `{0 ≤ a ≤ c, Σa = 1}` by accelerated projected
/// gradient descent. Returns the minimiser and the minimum.
pub fn qp_oracle(gram: &[Vec<f64>], c: f64, iterations: usize) -> (Vec<f64>, f64) {
    let n = gram.len();
    let lipschitz = gram.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut a = project(&vec![1.0 / n as f64; n], c);
    let mut y = a.clone();
    let mut t = 1.0f64;
    for _ in 0..iterations {
        let g: Vec<f64> = gram.iter().map(|r| r.iter().zip(&y).map(|(k, v)| k * v).sum()).collect();
        let next = project(&y.iter().zip(&g).map(|(v, gi)| v - step * gi).collect::<Vec<_>>(), c);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = next.iter().zip(&a).map(|(x, prev)| x + (t - 1.0) / t_next * (x - prev)).collect();
        a = next;
        t = t_next;
    }
    let value = quadratic_form(gram, &a);
    (a, value)
}
