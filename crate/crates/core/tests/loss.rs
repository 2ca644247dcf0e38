mod common;

use common::*;
use halfspace_core::loss::{base_loss, logistic_loss, ElasticNetLogistic};
use halfspace_core::train::effective_weight;
use halfspace_core::{
    composite_gradient, composite_objective, Dataset, HyperParams, Label, LabeledExample, LinearModel, NoiseProfile, NoisePolicy,
};
use proptest::prelude::*;

fn hp(lambda: f64, alpha: f64, rho: f64) -> HyperParams {
    HyperParams { lambda, alpha, rho, ..HyperParams::default() }
}

#[test]
fn gradient_matches_finite_differences() {
    let h = 1e-5;
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let data = random_dataset(&mut r, 50, 10);
        let model = random_model(&mut r, 10);
        let noise = NoiseProfile::new((0..50).map(|i| i as f64 / 50.0).collect()).unwrap();
        let params = hp(0.7, 0.05, 0.5);
        let analytic = composite_gradient(&model, &data, &noise, &params).unwrap();
        let numeric = finite_difference(&model, h, |m| objective_oracle(m, &data, noise.rates(), &params));
        for k in 0..10 {
            if model.w[k].abs() <= h {
                continue;
            }
            worst = worst.max(relative_error(analytic.w[k], numeric[k]));
        }
        worst = worst.max(relative_error(analytic.b, numeric[10]));
    }
    assert!(worst < 1e-5, "worst relative error {worst:e}");
}

#[test]
fn objective_matches_its_definition() {
    let mut r = rng(12);
    for _ in 0..10 {
        let data = random_dataset(&mut r, 30, 4);
        let model = random_model(&mut r, 4);
        let rates: Vec<f64> = (0..30).map(|i| (i % 7) as f64 / 7.0).collect();
        let noise = NoiseProfile::new(rates.clone()).unwrap();
        let params = hp(2.0, 0.3, 0.25);
        let v = composite_objective(&model, &data, &noise, &params).unwrap();
        let want = objective_oracle(&model, &data, &rates, &params);
        assert!(relative_error(v.total, want) < 1e-12);
        let sum = v.data_term + v.noise_term + v.penalty_term;
        assert!(relative_error(v.total, sum) < 1e-12);
    }
}

#[test]
fn gradient_is_bitwise_lambda_invariant() {
    let mut r = rng(13);
    let data = random_dataset(&mut r, 40, 6);
    let model = random_model(&mut r, 6);
    let noise = NoiseProfile::new((0..40).map(|i| i as f64 / 40.0).collect()).unwrap();
    let grads: Vec<_> = [0.0, 1.0, 10.0]
        .iter()
        .map(|&l| composite_gradient(&model, &data, &noise, &hp(l, 0.1, 0.5)).unwrap())
        .collect();
    for g in &grads[1..] {
        assert_eq!(g.b.to_bits(), grads[0].b.to_bits());
        for (a, b) in g.w.iter().zip(&grads[0].w) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn zero_model_costs_ln2() {
    let e = LabeledExample { x: vec![3.0, -1.0], y: Label::Negative };
    let loss = base_loss(&LinearModel::zeros(2), &e).unwrap();
    assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn saturated_margin_is_tiny() {
    assert!(logistic_loss(50.0) < 1e-20);
    assert!(logistic_loss(50.0) > 0.0);
}

#[test]
fn penalty_off_gives_mean_base_loss() {
    let mut r = rng(14);
    let data = random_dataset(&mut r, 20, 3);
    let model = random_model(&mut r, 3);
    let noise = NoiseProfile::new(vec![0.3; 20]).unwrap();
    let v = composite_objective(&model, &data, &noise, &hp(0.0, 0.0, 0.5)).unwrap();
    let mean: f64 = data.iter().map(|e| base_loss(&model, e).unwrap()).sum::<f64>() / 20.0;
    assert_eq!(v.total, mean);
}

#[test]
fn zero_model_with_half_rates() {
    let mut r = rng(15);
    let data = random_dataset(&mut r, 8, 2);
    let noise = NoiseProfile::new(vec![0.5; 8]).unwrap();
    let v = composite_objective(&LinearModel::zeros(2), &data, &noise, &hp(1.0, 1.0, 0.5)).unwrap();
    assert!((v.total - (std::f64::consts::LN_2 + 0.5)).abs() < 1e-15);
    assert_eq!(v.penalty_term, 0.0);
}

#[test]
fn zero_margin_gradient_by_differences() {
    let e = LabeledExample { x: vec![0.4, -2.0], y: Label::Positive };
    let data = Dataset::new(vec![e]).unwrap();
    let params = hp(0.0, 0.0, 0.5);
    let noise = zero_noise(&data);
    let g = composite_gradient(&LinearModel::zeros(2), &data, &noise, &params).unwrap();
    let fd = finite_difference(&LinearModel::zeros(2), 1e-6, |m| objective_oracle(m, &data, &[0.0], &params));
    assert!((g.w[0] - fd[0]).abs() < 1e-9 && (g.w[1] - fd[1]).abs() < 1e-9 && (g.b - fd[2]).abs() < 1e-9);
    assert_eq!((g.w[0], g.w[1], g.b), (-0.2, 1.0, -0.5));
}

#[test]
fn objective_is_convex_along_segments() {
    let mut r = rng(16);
    let data = random_dataset(&mut r, 30, 5);
    let noise = zero_noise(&data);
    let params = hp(0.5, 0.2, 0.5);
    for _ in 0..50 {
        let a = random_model(&mut r, 5);
        let b = random_model(&mut r, 5);
        let f = |m: &LinearModel| composite_objective(m, &data, &noise, &params).unwrap().total;
        for t in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let mid = LinearModel::new(
                a.w.iter().zip(&b.w).map(|(x, y)| t * x + (1.0 - t) * y).collect(),
                t * a.b + (1.0 - t) * b.b,
            )
            .unwrap();
            assert!(f(&mid) <= t * f(&a) + (1.0 - t) * f(&b) + 1e-12);
        }
    }
}

#[test]
fn raising_a_rate_never_raises_its_influence() {
    let mut r = rng(17);
    let data = random_dataset(&mut r, 10, 3);
    let noise = zero_noise(&data);
    let params = hp(0.0, 0.0, 0.5);
    let model = random_model(&mut r, 3);
    let gradient = |weights: &[f64]| {
        ElasticNetLogistic::new(&data, &noise, &params).unwrap().with_weights(weights).unwrap().full_gradient(&model)
    };
    let mut others = vec![0.8; 10];
    others[0] = 0.0;
    let rest = gradient(&others);
    let mut last = f64::INFINITY;
    for step in 0..=20 {
        let rate = step as f64 / 20.0;
        let mut weights = others.clone();
        weights[0] = effective_weight(rate, NoisePolicy::Downweight, 0.9);
        let share = weights[0] / weights.iter().sum::<f64>();
        // Example 0's part of the bias gradient: g − (1 − share)·g_rest.
        let influence = (gradient(&weights).b - (1.0 - share) * rest.b).abs();
        assert!(influence <= last + 1e-15, "rate {rate}: {influence} > {last}");
        last = influence;
    }
    assert!(last < 1e-15);
}

proptest! {
    #[test]
    fn total_is_the_sum_of_terms(seed in any::<u64>(), lambda in 0.0..10.0f64, alpha in 0.0..2.0f64, rho in 0.0..=1.0f64) {
        let mut r = rng(seed);
        let data = random_dataset(&mut r, 12, 3);
        let model = random_model(&mut r, 3);
        let noise = NoiseProfile::new((0..12).map(|i| i as f64 / 12.0).collect()).unwrap();
        let v = composite_objective(&model, &data, &noise, &hp(lambda, alpha, rho)).unwrap();
        let sum = v.data_term + v.noise_term + v.penalty_term;
        prop_assert!((v.total - sum).abs() <= 1e-12 * v.total.abs().max(1.0));
        prop_assert!(v.data_term > 0.0 && v.penalty_term >= 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected(d in 1usize..6) {
        let mut r = rng(d as u64);
        let data = random_dataset(&mut r, 5, d);
        let model = LinearModel::zeros(d + 1);
        prop_assert!(composite_gradient(&model, &data, &zero_noise(&data), &HyperParams::default()).is_err());
    }
}
