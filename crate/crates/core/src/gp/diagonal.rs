use crate::error::{Error, Result};
use crate::phase::{group_mean, PhaseTransform};

use super::model::PhaseGpModel;

/// Time-domain posterior of one beat.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatPosterior {
    /// Posterior mean (the filtered beat).
    pub s_hat: Vec<f64>,
    /// Prior mean, i.e. the back-transformed phase mean.
    pub prior_mean: Vec<f64>,
    /// Per-sample shrinkage toward the measurement, in [0, 1].
    pub gain: Vec<f64>,
    pub post_var: Vec<f64>,
    /// Set when the measurement variance vanished where the measurement
    /// deviates from the prior; the gain was forced to 0 there.
    pub degenerate: bool,
}

pub(crate) fn check_beat(x: &[f64], tf: &PhaseTransform, model: &PhaseGpModel) -> Result<f64> {
    if x.len() != tf.n_time() {
        return Err(Error::LengthMismatch {
            expected: tf.n_time(),
            got: x.len(),
        });
    }
    if tf.n_phase() != model.n_phase() {
        return Err(Error::ModelMismatch(format!(
            "transform has {} phase samples, model {}",
            tf.n_phase(),
            model.n_phase()
        )));
    }
    if let Some(j) = tf.counts().iter().position(|&c| c == 0) {
        return Err(Error::SingularGramian(j));
    }
    model.noise_var()
}

/// Diagonal-covariance posterior filter.
///
/// Per time sample `j` with phase group `G_j` of size `g_j`:
/// prior mean is the group mean of the phase mean, measurement variance is
/// `sum(var[G_j]) / g_j^2`, signal variance is
/// `max(sum(var[G_j] - v_n) / g_j^2, 0)`, and the estimate moves from the
/// prior toward `x` by their ratio.
pub fn filter_beat_diagonal(
    x: &[f64],
    tf: &PhaseTransform,
    model: &PhaseGpModel,
) -> Result<BeatPosterior> {
    let noise_var = check_beat(x, tf, model)?;
    let n = x.len();
    let mut out = BeatPosterior {
        s_hat: Vec::with_capacity(n),
        prior_mean: Vec::with_capacity(n),
        gain: Vec::with_capacity(n),
        post_var: Vec::with_capacity(n),
        degenerate: false,
    };

    for (j, group) in tf.groups().enumerate() {
        let g = group.len() as f64;
        let prior = group_mean(&model.mean[group.clone()]);
        let var = &model.variance[group];
        let k_x = var.iter().sum::<f64>() / (g * g);
        let k_s = (var.iter().map(|v| v - noise_var).sum::<f64>() / (g * g)).max(0.0);

        let gain = if k_x > 0.0 {
            (k_s / k_x).min(1.0)
        } else {
            if x[j] != prior {
                out.degenerate = true;
            }
            0.0
        };
        out.s_hat.push(prior + gain * (x[j] - prior));
        out.prior_mean.push(prior);
        out.gain.push(gain);
        out.post_var.push(k_s * (1.0 - gain));
    }
    Ok(out)
}
