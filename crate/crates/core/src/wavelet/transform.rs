//! Decimated filter bank with half-sample symmetric boundary extension.
//!
//! A level maps `n` samples to `floor((n + F - 1) / 2)` approximation and
//! detail coefficients for a filter of length `F`; synthesis returns
//! `2 m - F + 2` samples from `m` coefficient pairs.

use super::filters::Wavelet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DwtCoeffs {
    /// Approximation at the deepest level.
    pub approx: Vec<f64>,
    /// Detail vectors, finest (level 1) first.
    pub details: Vec<Vec<f64>>,
}

impl DwtCoeffs {
    pub fn levels(&self) -> usize {
        self.details.len()
    }
}

/// Half-sample symmetric extension: `x[-1] = x[0]`, `x[n] = x[n-1]`.
fn symmetric_index(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

pub fn coeff_len(n: usize, filter_len: usize) -> usize {
    (n + filter_len - 1) / 2
}

pub fn dwt_level(x: &[f64], wavelet: Wavelet) -> (Vec<f64>, Vec<f64>) {
    let lo = wavelet.dec_lo();
    let hi = wavelet.dec_hi();
    let n = x.len();
    let m = coeff_len(n, lo.len());
    let mut approx = Vec::with_capacity(m);
    let mut detail = Vec::with_capacity(m);
    for o in 0..m {
        let (mut a, mut d) = (0.0, 0.0);
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            let v = x[symmetric_index(2 * o as isize + 1 - j as isize, n)];
            a += l * v;
            d += h * v;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

pub fn idwt_level(approx: &[f64], detail: &[f64], wavelet: Wavelet) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::LengthMismatch {
            expected: approx.len(),
            got: detail.len(),
        });
    }
    let lo = wavelet.rec_lo();
    let hi = wavelet.rec_hi();
    let f = lo.len();
    let m = approx.len();
    if 2 * m + 2 < f {
        return Err(Error::InvalidArgument(format!(
            "{m} coefficients are too few for a {f}-tap filter"
        )));
    }
    // full upsampled convolution, keeping samples F-2 .. 2m
    let mut full = vec![0.0; 2 * m + f - 1];
    for k in 0..m {
        for j in 0..f {
            full[2 * k + j] += approx[k] * lo[j] + detail[k] * hi[j];
        }
    }
    Ok(full[f - 2..2 * m].to_vec())
}

pub fn dwt(x: &[f64], wavelet: Wavelet, levels: usize) -> Result<DwtCoeffs> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    let needed = 1usize << levels;
    if x.len() < needed {
        return Err(Error::TooShort {
            needed,
            got: x.len(),
        });
    }
    let mut approx = x.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = dwt_level(&approx, wavelet);
        details.push(d);
        approx = a;
    }
    Ok(DwtCoeffs { approx, details })
}

pub fn idwt(coeffs: &DwtCoeffs, wavelet: Wavelet, target_len: usize) -> Result<Vec<f64>> {
    let mut approx = coeffs.approx.clone();
    for detail in coeffs.details.iter().rev() {
        // odd-length inputs reconstruct one sample too many at each level
        if approx.len() == detail.len() + 1 {
            approx.pop();
        }
        approx = idwt_level(&approx, detail, wavelet)?;
    }
    if approx.len() < target_len {
        return Err(Error::LengthMismatch {
            expected: target_len,
            got: approx.len(),
        });
    }
    approx.truncate(target_len);
    Ok(approx)
}
