use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// SNR reported when the test signal matches the reference exactly.
pub const SNR_CAP_DB: f64 = 120.0;

pub fn mean_power(s: &[f64]) -> f64 {
    s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64
}

/// Adds i.i.d. Gaussian noise scaled so that `mean(s^2) / v_n` equals the
/// requested SNR. Returns the noisy signal and the noise variance `v_n`.
pub fn add_white_noise(s: &[f64], snr_db: f64, seed: u64) -> Result<(Vec<f64>, f64)> {
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument(format!("SNR level {snr_db} must be finite")));
    }
    let power = if s.is_empty() { 0.0 } else { mean_power(s) };
    if power == 0.0 {
        return Err(Error::InvalidArgument("signal has zero power".into()));
    }
    let noise_var = power / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, noise_var.sqrt())
        .map_err(|e| Error::Numerical(format!("noise distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = s.iter().map(|v| v + normal.sample(&mut rng)).collect();
    Ok((noisy, noise_var))
}

/// `10 log10(sum s^2 / sum (y - s)^2)`, clamped to +-120 dB.
pub fn snr(s: &[f64], y: &[f64]) -> Result<f64> {
    if s.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            got: y.len(),
        });
    }
    let signal: f64 = s.iter().map(|v| v * v).sum();
    let error: f64 = s.iter().zip(y).map(|(a, b)| (b - a) * (b - a)).sum();
    if error == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((10.0 * (signal / error).log10()).clamp(-SNR_CAP_DB, SNR_CAP_DB))
}

/// SplitMix64 finalizer; derives independent task seeds from a master seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}
