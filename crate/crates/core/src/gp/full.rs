//! Full-covariance beat filter for short beats.
//!
//! Cost is dominated by the eigendecomposition and Cholesky factorization of
//! `n_time x n_time` matrices, so beats are capped in length. Used mainly as a
//! dense cross-check of the diagonal filter.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::diagonal::{check_beat, BeatPosterior};
use super::model::PhaseGpModel;
use crate::error::{Error, Result};
use crate::phase::{group_mean, PhaseTransform};

pub const DEFAULT_MAX_BEAT_LEN: usize = 2000;
/// Relative ridge: `RIDGE_SCALE * trace(K_x) / n_time`.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Phase-domain noise covariance subtracted from the phase covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseNoise {
    /// `v_n * Theta Theta^T`, the exact covariance of warped white noise.
    #[default]
    Exact,
    /// `v_n * I`, its diagonal; pairs with a diagonal phase covariance to
    /// reproduce the diagonal filter.
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullOptions {
    /// Ridge added to the measurement covariance; `None` selects the
    /// trace-relative default.
    pub ridge: Option<f64>,
    pub noise: PhaseNoise,
    pub max_beat_len: usize,
}

impl Default for FullOptions {
    fn default() -> Self {
        Self {
            ridge: None,
            noise: PhaseNoise::Exact,
            max_beat_len: DEFAULT_MAX_BEAT_LEN,
        }
    }
}

/// `Psi K Psi^T` with `Psi = G^-1 Theta^T`: block sums of `K` over phase
/// groups divided by the group sizes.
fn project(tf: &PhaseTransform, k: &DMatrix<f64>) -> DMatrix<f64> {
    let groups: Vec<_> = tf.groups().collect();
    let n = groups.len();
    let rows = DMatrix::<f64>::from_fn(n, k.ncols(), |j, c| groups[j].clone().map(|r| k[(r, c)]).sum());
    DMatrix::from_fn(n, n, |a, b| {
        let s: f64 = groups[b].clone().map(|c| rows[(a, c)]).sum();
        s / (groups[a].len() * groups[b].len()) as f64
    })
}

fn clamp_psd(m: DMatrix<f64>) -> DMatrix<f64> {
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let vals = eig.eigenvalues.map(|v| v.max(0.0));
    let psd = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose();
    (&psd + psd.transpose()) * 0.5
}

fn phase_noise(tf: &PhaseTransform, noise_var: f64, kind: PhaseNoise) -> DMatrix<f64> {
    let t = tf.n_phase();
    let map = tf.index_map();
    match kind {
        PhaseNoise::Exact => {
            DMatrix::from_fn(t, t, |a, b| if map[a] == map[b] { noise_var } else { 0.0 })
        }
        PhaseNoise::Diagonal => DMatrix::identity(t, t) * noise_var,
    }
}

pub fn filter_beat_full(
    x: &[f64],
    tf: &PhaseTransform,
    model: &PhaseGpModel,
    opts: &FullOptions,
) -> Result<BeatPosterior> {
    let noise_var = check_beat(x, tf, model)?;
    let cov = model
        .covariance
        .as_ref()
        .ok_or_else(|| Error::ModelMismatch("model was fitted without a full covariance".into()))?;
    let n = x.len();
    if n > opts.max_beat_len {
        return Err(Error::InvalidArgument(format!(
            "beat of {n} samples exceeds the full-covariance cap of {}",
            opts.max_beat_len
        )));
    }

    let prior: Vec<f64> = tf.groups().map(|g| group_mean(&model.mean[g])).collect();
    let k_x_raw = project(tf, cov);
    let k_s = clamp_psd(project(tf, &(cov - phase_noise(tf, noise_var, opts.noise))));
    let ridge = match opts.ridge {
        Some(r) if r >= 0.0 => r,
        Some(r) => return Err(Error::InvalidArgument(format!("ridge {r} must be >= 0"))),
        None => RIDGE_SCALE * k_x_raw.trace() / n as f64,
    };
    let k_x = k_x_raw + DMatrix::identity(n, n) * ridge;

    let chol = k_x.cholesky().ok_or_else(|| {
        Error::Numerical(format!("measurement covariance is singular (ridge {ridge:e})"))
    })?;
    let innovation = DVector::from_iterator(n, x.iter().zip(&prior).map(|(a, b)| a - b));
    let weights = chol.solve(&innovation);
    let update = &k_s * weights;
    // K_x^-1 K_s; its diagonal equals that of K_s K_x^-1 by symmetry
    let solved = chol.solve(&k_s);

    let gain: Vec<f64> = (0..n).map(|j| solved[(j, j)]).collect();
    let post_var = (0..n)
        .map(|j| (k_s[(j, j)] - k_s.row(j).dot(&solved.column(j).transpose())).max(0.0))
        .collect();
    Ok(BeatPosterior {
        s_hat: prior.iter().zip(update.iter()).map(|(p, u)| p + u).collect(),
        prior_mean: prior,
        gain,
        post_var,
        degenerate: false,
    })
}
