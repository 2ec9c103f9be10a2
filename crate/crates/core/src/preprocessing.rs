//! Zero-phase first-order filtering and baseline-wander removal.
//!
//! The first-order Butterworth lowpass is discretized by the bilinear
//! transform, `H(z) = b0 (1 + z^-1) / (1 - p z^-1)`. Running it forward and
//! then backward yields the symmetric two-sided kernel
//!
//! ```text
//! r[0] = 2 b0^2 / (1 - p),   r[k] = b0^2 (1 + p) / (1 - p) * p^(|k| - 1)
//! ```
//!
//! which is applied here directly as one causal and one anti-causal recursion.
//! Both recursions start from the steady state of the (odd-reflected) edge
//! sample, so the result is exactly invariant under time reversal.

use crate::error::{Error, Result};

pub const BASELINE_CUTOFF_HZ: f64 = 5.0;
pub const BANDLIMIT_CUTOFF_HZ: f64 = 80.0;
pub const MIN_FILTER_LEN: usize = 4;

/// Edge padding in time constants.
const PAD_TIME_CONSTANTS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterMode {
    Lowpass,
    /// `x - lowpass(x)`.
    HighpassBySubtraction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub cutoff_hz: f64,
    pub fs: f64,
    pub mode: FilterMode,
}

impl FilterSpec {
    pub fn new(cutoff_hz: f64, fs: f64, mode: FilterMode) -> Result<Self> {
        let spec = Self { cutoff_hz, fs, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lowpass(cutoff_hz: f64, fs: f64) -> Result<Self> {
        Self::new(cutoff_hz, fs, FilterMode::Lowpass)
    }

    pub fn highpass(cutoff_hz: f64, fs: f64) -> Result<Self> {
        Self::new(cutoff_hz, fs, FilterMode::HighpassBySubtraction)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fs.is_finite() && self.fs > 0.0) {
            return Err(Error::InvalidFilter(format!("sampling frequency {} must be > 0", self.fs)));
        }
        if !(self.cutoff_hz > 0.0 && self.cutoff_hz < self.fs / 2.0) {
            return Err(Error::InvalidFilter(format!(
                "cutoff {} Hz outside (0, {}) Hz",
                self.cutoff_hz,
                self.fs / 2.0
            )));
        }
        Ok(())
    }

    /// Prewarped analog cutoff `tan(pi fc / fs)`.
    fn warped(&self) -> f64 {
        (std::f64::consts::PI * self.cutoff_hz / self.fs).tan()
    }

    /// Squared magnitude of the one-pass lowpass at `freq_hz`, i.e. the gain
    /// of the forward-backward lowpass.
    pub fn forward_backward_gain(&self, freq_hz: f64) -> f64 {
        let ratio = (std::f64::consts::PI * freq_hz / self.fs).tan() / self.warped();
        let lp = 1.0 / (1.0 + ratio * ratio);
        match self.mode {
            FilterMode::Lowpass => lp,
            FilterMode::HighpassBySubtraction => 1.0 - lp,
        }
    }
}

fn odd_reflect_pad(x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    let (first, last) = (x[0], x[n - 1]);
    let mut out = Vec::with_capacity(n + 2 * pad);
    out.extend((1..=pad).rev().map(|k| 2.0 * first - x[k]));
    out.extend_from_slice(x);
    out.extend((1..=pad).map(|k| 2.0 * last - x[n - 1 - k]));
    out
}

fn symmetric_lowpass(x: &[f64], spec: &FilterSpec) -> Vec<f64> {
    let k = spec.warped();
    let b0 = k / (1.0 + k);
    let pole = (1.0 - k) / (1.0 + k);
    let center = 2.0 * b0 * b0 / (1.0 - pole);
    let side = b0 * b0 * (1.0 + pole) / (1.0 - pole);

    let tau = spec.fs / (2.0 * std::f64::consts::PI * spec.cutoff_hz);
    let pad = ((PAD_TIME_CONSTANTS * tau).ceil() as usize).clamp(1, x.len() - 1);
    let ext = odd_reflect_pad(x, pad);
    let m = ext.len();

    // causal[n] = sum_{j<n} p^(n-1-j) ext[j], seeded with a constant past
    let mut causal = vec![0.0; m];
    causal[0] = ext[0] / (1.0 - pole);
    for n in 1..m {
        causal[n] = pole * causal[n - 1] + ext[n - 1];
    }
    let mut anti = vec![0.0; m];
    anti[m - 1] = ext[m - 1] / (1.0 - pole);
    for n in (0..m - 1).rev() {
        anti[n] = pole * anti[n + 1] + ext[n + 1];
    }

    (pad..pad + x.len())
        .map(|n| center * ext[n] + side * (causal[n] + anti[n]))
        .collect()
}

fn check_input(x: &[f64], spec: &FilterSpec) -> Result<()> {
    spec.validate()?;
    if x.len() < MIN_FILTER_LEN {
        return Err(Error::TooShort {
            needed: MIN_FILTER_LEN,
            got: x.len(),
        });
    }
    Ok(())
}

/// Zero-phase forward-backward first-order lowpass; `spec.mode` is ignored.
pub fn lowpass_zero_phase(x: &[f64], spec: &FilterSpec) -> Result<Vec<f64>> {
    check_input(x, spec)?;
    Ok(symmetric_lowpass(x, spec))
}

/// Applies `spec` in its declared mode.
pub fn zero_phase(x: &[f64], spec: &FilterSpec) -> Result<Vec<f64>> {
    check_input(x, spec)?;
    let lp = symmetric_lowpass(x, spec);
    Ok(match spec.mode {
        FilterMode::Lowpass => lp,
        FilterMode::HighpassBySubtraction => x.iter().zip(&lp).map(|(a, b)| a - b).collect(),
    })
}

/// Zero-phase band limitation `lowpass_high(x - lowpass_low(x))`.
pub fn bandpass_zero_phase(x: &[f64], fs: f64, low_hz: f64, high_hz: f64) -> Result<Vec<f64>> {
    let hp = zero_phase(x, &FilterSpec::highpass(low_hz, fs)?)?;
    lowpass_zero_phase(&hp, &FilterSpec::lowpass(high_hz, fs)?)
}

/// Removes baseline wander (5 Hz highpass by subtraction) and limits the band
/// to 80 Hz.
pub fn remove_baseline_wander(x: &[f64], fs: f64) -> Result<Vec<f64>> {
    bandpass_zero_phase(x, fs, BASELINE_CUTOFF_HZ, BANDLIMIT_CUTOFF_HZ)
}
