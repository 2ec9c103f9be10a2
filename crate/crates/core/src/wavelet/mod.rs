//! Wavelet shrinkage denoiser used as the benchmark.
//!
//! Default configuration: Symlet-5, four levels, soft thresholding with the
//! hybrid SURE rule, and one noise level estimated from the finest detail
//! level (`median(|d1|) / 0.6745`) shared by all levels.

pub mod filters;
pub mod threshold;
pub mod transform;

use serde::{Deserialize, Serialize};

pub use filters::Wavelet;
pub use threshold::{hybrid_threshold, soft_threshold, sure_threshold, universal_threshold};
pub use transform::{dwt, idwt, DwtCoeffs};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdRule {
    /// Pure SURE minimization.
    Sure,
    /// SURE with a universal-threshold fallback on sparse levels.
    #[default]
    HybridSure,
    Universal,
}

impl std::str::FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sure" | "rigrsure" => Ok(Self::Sure),
            "hybrid-sure" | "heursure" => Ok(Self::HybridSure),
            "universal" | "sqtwolog" => Ok(Self::Universal),
            other => Err(Error::InvalidArgument(format!("unknown threshold rule {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletSpec {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub rule: ThresholdRule,
}

impl Default for WaveletSpec {
    fn default() -> Self {
        Self {
            wavelet: Wavelet::Sym5,
            levels: 4,
            rule: ThresholdRule::HybridSure,
        }
    }
}

fn median_abs(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Noise level from the finest detail coefficients.
pub fn estimate_sigma(finest: &[f64]) -> f64 {
    median_abs(finest) / 0.6745
}

pub fn denoise_wavelet(x: &[f64], spec: &WaveletSpec) -> Result<Vec<f64>> {
    let mut coeffs = dwt(x, spec.wavelet, spec.levels)?;
    let sigma = estimate_sigma(&coeffs.details[0]);
    if sigma == 0.0 {
        return Ok(x.to_vec());
    }
    for detail in &mut coeffs.details {
        let t = match spec.rule {
            ThresholdRule::Sure => sure_threshold(detail, sigma)?,
            ThresholdRule::HybridSure => hybrid_threshold(detail, sigma)?,
            ThresholdRule::Universal => universal_threshold(detail.len(), sigma),
        };
        detail.iter_mut().for_each(|v| *v = soft_threshold(*v, t));
    }
    idwt(&coeffs, spec.wavelet, x.len())
}
