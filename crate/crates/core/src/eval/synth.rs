//! Synthetic ECG from sums of Gaussian waves placed on a cardiac phase, with
//! ground truth.
//!
//! The phase `θ(t)` is piecewise linear with `θ = k` at the `k`-th R-peak, so
//! every wave stretches with its local RR interval.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::EcgRecord;

/// One Gaussian component of the beat template. Center and width are
/// fractions of the RR cycle, with the R-peak at phase 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWave {
    pub amplitude_mv: f64,
    pub center_phase: f64,
    pub width_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub heart_rate_bpm: f64,
    /// Standard deviation of RR intervals as a fraction of the mean.
    pub rr_jitter: f64,
    /// Lag-one autocorrelation of successive RR deviations, in [0, 1).
    /// The default 0.8 matches a typical resting RMSSD/SDNN ratio of 0.6.
    pub rr_correlation: f64,
    /// Standard deviation of the per-beat amplitude factor.
    pub amplitude_jitter: f64,
    pub fs: f64,
    pub duration_s: f64,
    pub waves: Vec<GaussianWave>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            heart_rate_bpm: 60.0,
            rr_jitter: 0.0,
            rr_correlation: 0.8,
            amplitude_jitter: 0.0,
            fs: 250.0,
            duration_s: 30.0,
            waves: default_waves(),
        }
    }
}

/// P, Q, R, S and T waves of a lead-II-like beat.
pub fn default_waves() -> Vec<GaussianWave> {
    [
        (0.15, -0.20, 0.025),
        (-0.10, -0.030, 0.010),
        (1.20, 0.0, 0.011),
        (-0.25, 0.030, 0.010),
        (0.30, 0.28, 0.045),
    ]
    .into_iter()
    .map(|(amplitude_mv, center_phase, width_phase)| GaussianWave {
        amplitude_mv,
        center_phase,
        width_phase,
    })
    .collect()
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.heart_rate_bpm > 0.0 && self.fs > 0.0 && self.duration_s > 0.0) {
            return Err(Error::InvalidArgument("rate, fs and duration must be positive".into()));
        }
        if !(self.rr_jitter >= 0.0 && self.rr_jitter < 0.5 && self.amplitude_jitter >= 0.0) {
            return Err(Error::InvalidArgument("jitter fractions out of range".into()));
        }
        if !(self.rr_correlation >= 0.0 && self.rr_correlation < 1.0) {
            return Err(Error::InvalidArgument("RR correlation must lie in [0, 1)".into()));
        }
        let bad_wave = |w: &GaussianWave| {
            !(w.width_phase > 0.0 && w.width_phase < 0.25 && w.center_phase.abs() < 0.5)
        };
        if self.waves.is_empty() || self.waves.iter().any(bad_wave) {
            return Err(Error::InvalidArgument(
                "waves need widths in (0, 0.25) and centers in (-0.5, 0.5)".into(),
            ));
        }
        if self.duration_s * self.heart_rate_bpm / 60.0 < 2.0 {
            return Err(Error::InvalidArgument("duration must cover at least 2 beats".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthTruth {
    /// Noise-free signal (equal to the record's only lead).
    pub clean: Vec<f64>,
    /// Sample index of each R-peak (template maximum).
    pub r_peaks: Vec<usize>,
}

pub fn synthesize_ecg(spec: &SynthSpec, seed: u64) -> Result<(EcgRecord, SynthTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };

    let n = (spec.duration_s * spec.fs).round() as usize;
    let rr = 60.0 / spec.heart_rate_bpm;
    let rho = spec.rr_correlation;
    let innovation = (1.0 - rho * rho).sqrt();

    // R times in seconds, with one unobserved beat on either side so the
    // phase is defined over the whole record.
    let mut times = vec![-rr / 2.0];
    let mut amplitudes = vec![1.0 + spec.amplitude_jitter * normal()];
    let mut dev = normal();
    let mut t = rr / 2.0;
    loop {
        times.push(t);
        amplitudes.push(1.0 + spec.amplitude_jitter * normal());
        if t >= spec.duration_s {
            break;
        }
        t += rr * (1.0 + spec.rr_jitter * dev);
        dev = rho * dev + innovation * normal();
    }

    let reach = spec
        .waves
        .iter()
        .map(|w| w.center_phase.abs() + 6.0 * w.width_phase)
        .fold(0.0, f64::max)
        .ceil() as isize;
    let mut clean = vec![0.0; n];
    let mut k = 0;
    for (i, v) in clean.iter_mut().enumerate() {
        let ti = i as f64 / spec.fs;
        while times[k + 1] <= ti {
            k += 1;
        }
        let theta = k as f64 + (ti - times[k]) / (times[k + 1] - times[k]);
        let lo = (k as isize - reach).max(0) as usize;
        let hi = ((k as isize + 1 + reach) as usize).min(times.len() - 1);
        for (beat, &amplitude) in amplitudes.iter().enumerate().take(hi + 1).skip(lo) {
            for w in &spec.waves {
                let z = (theta - beat as f64 - w.center_phase) / w.width_phase;
                *v += amplitude * w.amplitude_mv * (-0.5 * z * z).exp();
            }
        }
    }

    let search = (0.04 * spec.fs).round() as isize;
    let r_peaks = times[1..]
        .iter()
        .filter_map(|&t_r| {
            let nominal = (t_r * spec.fs).round() as isize;
            let lo = (nominal - search).max(0);
            let hi = (nominal + search).min(n as isize - 1);
            if nominal >= n as isize || lo > hi {
                return None;
            }
            (lo..=hi)
                .map(|i| i as usize)
                .max_by(|&a, &b| clean[a].total_cmp(&clean[b]))
        })
        .collect();

    let record = EcgRecord::new(format!("synth-{seed}"), spec.fs, vec![clean.clone()])?;
    Ok((record, SynthTruth { clean, r_peaks }))
}
