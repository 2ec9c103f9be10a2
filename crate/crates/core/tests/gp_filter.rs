mod common;

use common::*;
use ecg_gp::eval::{add_white_noise, snr, synthesize_ecg, SynthSpec};
use ecg_gp::gp::{
    filter_beat_diagonal, filter_beat_full, filter_signal, FilterKind, FilterOptions, FullOptions,
    PhaseGpModel, PhaseNoise,
};
use ecg_gp::phase::PhaseTransform;
use ecg_gp::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn diag_model(mean: Vec<f64>, variance: Vec<f64>, noise_var: f64) -> PhaseGpModel {
    PhaseGpModel {
        mean,
        variance,
        covariance: None,
        n_beats: 20,
        noise_var: Some(noise_var),
    }
}

#[test]
fn diagonal_filter_matches_dense_oracle() {
    let mut rng = SplitMix(11);
    for _ in 0..30 {
        let n = rng.range(2, 12);
        let t = rng.range(n, 3 * n);
        let mean: Vec<f64> = (0..t).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let var: Vec<f64> = (0..t).map(|_| rng.uniform(0.1, 2.0)).collect();
        let v = rng.uniform(0.0, 0.1);
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();

        let th = theta(n, t);
        let dense = dense_posterior(&x, &th, &mean, &diag(&var), &diag(&vec![v; t]), 0.0);
        let tf = PhaseTransform::new(n, t).unwrap();
        let post = filter_beat_diagonal(&x, &tf, &diag_model(mean, var, v)).unwrap();
        for j in 0..n {
            assert!(rel_err(post.s_hat[j], dense.s_hat[j]) < 1e-9);
            assert!(rel_err(post.prior_mean[j], dense.prior[j]) < 1e-12);
            assert!(rel_err(post.post_var[j], dense.post_var[j]) < 1e-9);
        }
    }
}

#[test]
fn full_filter_matches_dense_oracle() {
    let mut rng = SplitMix(12);
    for _ in 0..20 {
        let n = rng.range(2, 10);
        let t = rng.range(n, 2 * n + 3);
        let th = theta(n, t);
        // K = A A^T + v Theta Theta^T keeps the signal part PSD
        let a: Mat = (0..t)
            .map(|_| (0..t).map(|_| rng.uniform(-0.5, 0.5)).collect())
            .collect();
        let v = rng.uniform(0.01, 0.2);
        let noise = {
            let tt = matmul(&th, &transpose(&th));
            tt.into_iter()
                .map(|r| r.into_iter().map(|e| e * v).collect())
                .collect::<Mat>()
        };
        let signal = matmul(&a, &transpose(&a));
        let k: Mat = signal
            .iter()
            .zip(&noise)
            .map(|(p, q)| p.iter().zip(q).map(|(u, w)| u + w).collect())
            .collect();
        let mean: Vec<f64> = (0..t).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-2.0, 2.0)).collect();

        let dense = dense_posterior(&x, &th, &mean, &k, &noise, 0.0);
        let model = PhaseGpModel {
            variance: (0..t).map(|i| k[i][i]).collect(),
            covariance: Some(DMatrix::from_fn(t, t, |i, j| k[i][j])),
            mean,
            n_beats: 20,
            noise_var: Some(v),
        };
        let opts = FullOptions {
            ridge: Some(0.0),
            noise: PhaseNoise::Exact,
            ..FullOptions::default()
        };
        let tf = PhaseTransform::new(n, t).unwrap();
        let post = filter_beat_full(&x, &tf, &model, &opts).unwrap();
        let scale = max_abs(&dense.s_hat).max(1.0);
        for j in 0..n {
            assert!((post.s_hat[j] - dense.s_hat[j]).abs() < 1e-8 * scale);
            assert!((post.post_var[j] - dense.post_var[j]).abs() < 1e-8);
        }
    }
}

#[test]
fn diagonal_filter_is_affine_in_the_measurement() {
    let tf = PhaseTransform::new(7, 11).unwrap();
    let model = diag_model(
        (0..11).map(|i| (i as f64).sin()).collect(),
        (0..11).map(|i| 0.2 + 0.1 * i as f64).collect(),
        0.15,
    );
    let x: Vec<f64> = (0..7).map(|i| 0.3 * i as f64).collect();
    let d: Vec<f64> = (0..7).map(|i| (-1.0f64).powi(i) * 0.7).collect();
    let xd: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
    let base = filter_beat_diagonal(&x, &tf, &model).unwrap();
    let moved = filter_beat_diagonal(&xd, &tf, &model).unwrap();
    for j in 0..7 {
        let delta = moved.s_hat[j] - base.s_hat[j];
        assert!((delta - base.gain[j] * d[j]).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn posterior_is_a_contraction(
        n in 2usize..40,
        extra in 0usize..40,
        seed in any::<u64>(),
        v in 0.0f64..2.0,
    ) {
        let t = n + extra;
        let mut rng = SplitMix(seed);
        let mean: Vec<f64> = (0..t).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let var: Vec<f64> = (0..t)
            .map(|_| if rng.unit() < 0.1 { 0.0 } else { rng.uniform(0.0, 2.0) })
            .collect();
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let tf = PhaseTransform::new(n, t).unwrap();
        let post = filter_beat_diagonal(&x, &tf, &diag_model(mean, var, v)).unwrap();
        for j in 0..n {
            prop_assert!((0.0..=1.0).contains(&post.gain[j]));
            prop_assert!(post.post_var[j] >= 0.0);
            let (lo, hi) = if x[j] < post.prior_mean[j] {
                (x[j], post.prior_mean[j])
            } else {
                (post.prior_mean[j], x[j])
            };
            prop_assert!(post.s_hat[j] >= lo - 1e-12 && post.s_hat[j] <= hi + 1e-12);
        }
    }
}

fn options() -> FilterOptions {
    FilterOptions {
        preprocess: false,
        ..FilterOptions::default()
    }
}

#[test]
fn noiseless_record_is_nearly_unchanged() {
    let spec = SynthSpec {
        duration_s: 20.0,
        ..SynthSpec::default()
    };
    let (rec, truth) = synthesize_ecg(&spec, 4).unwrap();
    let out = filter_signal(rec.lead(0).unwrap(), rec.fs, &options()).unwrap();
    let err: f64 = out
        .posterior
        .iter()
        .zip(&truth.clean)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let power: f64 = truth.clean.iter().map(|v| v * v).sum();
    assert!((err / power).sqrt() < 0.01);
    assert_eq!(out.diagnostics.n_beats, 20);
}

#[test]
fn noisy_record_improves() {
    let spec = SynthSpec {
        duration_s: 20.0,
        rr_jitter: 0.03,
        amplitude_jitter: 0.05,
        ..SynthSpec::default()
    };
    let (rec, truth) = synthesize_ecg(&spec, 8).unwrap();
    let (noisy, _) = add_white_noise(&truth.clean, 0.0, 3).unwrap();
    let out = filter_signal(&noisy, rec.fs, &options()).unwrap();
    let gain_db = snr(&truth.clean, &out.posterior).unwrap() - snr(&truth.clean, &noisy).unwrap();
    assert!(gain_db > 3.0, "{gain_db}");
    assert!(out.variance.iter().all(|v| v.is_nan() || *v >= 0.0));
}

#[test]
fn full_variant_runs_on_a_short_record() {
    let spec = SynthSpec {
        fs: 100.0,
        duration_s: 8.0,
        rr_jitter: 0.03,
        ..SynthSpec::default()
    };
    let (rec, truth) = synthesize_ecg(&spec, 2).unwrap();
    let (noisy, _) = add_white_noise(&truth.clean, 10.0, 5).unwrap();
    let diag = filter_signal(&noisy, rec.fs, &options()).unwrap();
    let full = filter_signal(
        &noisy,
        rec.fs,
        &FilterOptions {
            kind: FilterKind::Full(FullOptions::default()),
            ..options()
        },
    )
    .unwrap();
    assert_eq!(full.prior, diag.prior);
    assert!(full.posterior.iter().all(|v| v.is_finite()));
    assert_eq!(full.diagnostics.n_beats, diag.diagnostics.n_beats);
}

#[test]
fn single_beat_is_rejected() {
    let spec = SynthSpec {
        duration_s: 2.0,
        ..SynthSpec::default()
    };
    let (rec, _) = synthesize_ecg(&spec, 1).unwrap();
    let opts = FilterOptions {
        peaks: Some(vec![250]),
        ..options()
    };
    let err = filter_signal(rec.lead(0).unwrap(), rec.fs, &opts).unwrap_err();
    assert!(matches!(err, Error::TooFewBeats { .. }), "{err}");
}
