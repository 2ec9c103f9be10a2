//! Threshold selection on detail coefficients.
//!
//! All rules work on coefficients standardized by the noise level `sigma` and
//! return thresholds in the original units.

use crate::error::{Error, Result};

pub fn soft_threshold(v: f64, t: f64) -> f64 {
    v.signum() * (v.abs() - t).max(0.0)
}

fn check(d: &[f64], sigma: f64) -> Result<()> {
    if d.is_empty() {
        return Err(Error::InvalidArgument("empty coefficient vector".into()));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {sigma} must be > 0")));
    }
    Ok(())
}

/// `sigma * sqrt(2 ln n)`.
pub fn universal_threshold(n: usize, sigma: f64) -> f64 {
    sigma * (2.0 * (n as f64).ln()).sqrt()
}

/// Threshold minimizing Stein's unbiased risk estimate
///
/// ```text
/// SURE(t) = n - 2 #{|u_i| <= t} + sum_i min(u_i^2, t^2),   u = d / sigma
/// ```
///
/// over the candidates `{0} U {|u_i|}`; ties go to the smaller threshold.
pub fn sure_threshold(d: &[f64], sigma: f64) -> Result<f64> {
    check(d, sigma)?;
    let n = d.len();
    let mut mags: Vec<f64> = d.iter().map(|v| (v / sigma).abs()).collect();
    mags.sort_by(f64::total_cmp);

    let zeros = mags.iter().take_while(|&&v| v == 0.0).count();
    let mut best_t = 0.0;
    let mut best_risk = n as f64 - 2.0 * zeros as f64;
    let mut cum_sq = 0.0;
    let mut i = 0;
    while i < n {
        let t = mags[i];
        // fold the whole tie group into the count
        while i < n && mags[i] == t {
            cum_sq += t * t;
            i += 1;
        }
        let risk = n as f64 - 2.0 * i as f64 + cum_sq + (n - i) as f64 * t * t;
        if risk < best_risk {
            best_risk = risk;
            best_t = t;
        }
    }
    Ok(best_t * sigma)
}

/// Hybrid rule: universal threshold when the level looks sparse, otherwise
/// the smaller of the SURE and universal thresholds.
///
/// Sparse means `(sum u_i^2 - n) / n < log2(n)^1.5 / sqrt(n)`.
pub fn hybrid_threshold(d: &[f64], sigma: f64) -> Result<f64> {
    check(d, sigma)?;
    let n = d.len() as f64;
    let universal = universal_threshold(d.len(), sigma);
    let energy: f64 = d.iter().map(|v| (v / sigma).powi(2)).sum();
    let eta = (energy - n) / n;
    let crit = n.log2().powf(1.5) / n.sqrt();
    if eta < crit {
        Ok(universal)
    } else {
        Ok(sure_threshold(d, sigma)?.min(universal))
    }
}
