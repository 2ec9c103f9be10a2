use nalgebra::DMatrix;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::phase::PhaseTransform;

/// Default percentile of the phase variance used as the noise variance.
pub const DEFAULT_NOISE_PERCENTILE: f64 = 0.05;

/// Phase-domain Gaussian process fitted from the beats of a record.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGpModel {
    /// Sample mean of the phase beats.
    pub mean: Vec<f64>,
    /// Sample variance per phase sample (diagonal of the covariance).
    pub variance: Vec<f64>,
    /// Full sample covariance, when requested at fit time.
    pub covariance: Option<DMatrix<f64>>,
    pub n_beats: usize,
    /// Estimated or supplied noise variance (mV^2).
    pub noise_var: Option<f64>,
}

impl PhaseGpModel {
    pub fn n_phase(&self) -> usize {
        self.mean.len()
    }

    pub fn with_noise_var(mut self, noise_var: f64) -> Result<Self> {
        if !(noise_var.is_finite() && noise_var >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance {noise_var} must be finite and >= 0"
            )));
        }
        self.noise_var = Some(noise_var);
        Ok(self)
    }

    pub fn noise_var(&self) -> Result<f64> {
        self.noise_var.ok_or(Error::NoiseVarianceUnset)
    }
}

/// Fits mean and (co)variance of the phase beats with population (1/B)
/// normalization.
pub fn fit_phase_model(
    beats: &[&[f64]],
    transforms: &[PhaseTransform],
    want_full: bool,
) -> Result<PhaseGpModel> {
    if beats.len() != transforms.len() {
        return Err(Error::ModelMismatch(format!(
            "{} beats but {} transforms",
            beats.len(),
            transforms.len()
        )));
    }
    if beats.len() < 2 {
        return Err(Error::TooFewBeats {
            needed: 2,
            got: beats.len(),
        });
    }
    let n_phase = transforms[0].n_phase();
    if let Some(tf) = transforms.iter().find(|tf| tf.n_phase() != n_phase) {
        return Err(Error::ModelMismatch(format!(
            "phase lengths differ: {} vs {n_phase}",
            tf.n_phase()
        )));
    }

    let phase: Vec<Vec<f64>> = beats
        .iter()
        .zip(transforms)
        .map(|(b, tf)| tf.to_phase(b))
        .collect::<Result<_>>()?;
    let b = phase.len() as f64;

    let mut mean = vec![0.0; n_phase];
    for p in &phase {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= b);

    let mut variance = vec![0.0; n_phase];
    for p in &phase {
        for ((acc, v), m) in variance.iter_mut().zip(p).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    variance.iter_mut().for_each(|v| *v /= b);

    let covariance = want_full.then(|| {
        let centered = DMatrix::from_fn(n_phase, phase.len(), |k, i| phase[i][k] - mean[k]);
        let mut cov = &centered * centered.transpose() / b;
        // exact symmetry and a diagonal identical to `variance`
        cov = (&cov + cov.transpose()) * 0.5;
        for (k, v) in variance.iter().enumerate() {
            cov[(k, k)] = *v;
        }
        cov
    });

    Ok(PhaseGpModel {
        mean,
        variance,
        covariance,
        n_beats: phase.len(),
        noise_var: None,
    })
}

/// Linear-interpolated percentile (`q` in [0, 1]) of unsorted values.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Sets the noise variance from the `q`-th percentile of the phase variance.
///
/// On isoelectric phase samples the clean-beat variance is close to zero, so
/// the lowest phase variances are dominated by noise. Phase-domain noise has
/// the same variance as in time because every phase sample copies exactly
/// one time sample. For pure noise, `B·k/v` is chi-squared with `B − 1`
/// degrees of freedom, so the percentile is divided by the matching
/// chi-squared quantile over `B` to remove its downward bias.
pub fn estimate_noise_variance(model: PhaseGpModel, q: f64) -> Result<PhaseGpModel> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!("percentile {q} outside (0, 1)")));
    }
    if model.variance.is_empty() {
        return Err(Error::ModelMismatch("model has no phase samples".into()));
    }
    let v = percentile(&model.variance, q) / chi_squared_factor(model.n_beats, q)?;
    model.with_noise_var(v)
}

/// `q`-quantile of a `B`-beat population variance of unit-variance noise.
pub fn chi_squared_factor(n_beats: usize, q: f64) -> Result<f64> {
    if n_beats < 2 {
        return Err(Error::TooFewBeats {
            needed: 2,
            got: n_beats,
        });
    }
    let dist = ChiSquared::new((n_beats - 1) as f64)
        .map_err(|e| Error::Numerical(format!("chi-squared distribution: {e}")))?;
    Ok(dist.inverse_cdf(q) / n_beats as f64)
}
