//! Modified Pan-Tompkins R-peak detection and midpoint beat segmentation.
//!
//! Detection stages: zero-phase bandpass, tanh outlier saturation, square
//! root of a centered moving average of the squared signal, then a threshold
//! relative to the local envelope maximum. Each supra-threshold run yields one
//! candidate, refined to the largest absolute bandpassed sample nearby.

use crate::error::{Error, Result};
use crate::preprocessing::bandpass_zero_phase;

/// How the saturation scale of the tanh stage is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationScale {
    /// Population standard deviation of the bandpassed signal.
    StdDev,
    /// Median absolute deviation / 0.6745.
    Mad,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Saturation level in multiples of the signal scale.
    pub saturation_kappa: f64,
    pub saturation_scale: SaturationScale,
    pub window_ms: f64,
    /// Fraction of the local envelope maximum a peak must exceed.
    pub threshold_fraction: f64,
    /// Half-width of the window the local envelope maximum is taken over.
    pub threshold_window_ms: f64,
    pub refractory_ms: f64,
    /// Half-width of the refinement search on the bandpassed signal.
    pub search_ms: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            band_low_hz: 5.0,
            band_high_hz: 25.0,
            saturation_kappa: 8.0,
            saturation_scale: SaturationScale::Mad,
            window_ms: 100.0,
            threshold_fraction: 0.5,
            threshold_window_ms: 2000.0,
            refractory_ms: 200.0,
            search_ms: 50.0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.band_low_hz,
            self.band_high_hz,
            self.saturation_kappa,
            self.window_ms,
            self.threshold_fraction,
            self.threshold_window_ms,
            self.refractory_ms,
            self.search_ms,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidArgument("detector parameters must be positive".into()));
        }
        if self.band_low_hz >= self.band_high_hz {
            return Err(Error::InvalidArgument("bandpass corners must be ordered".into()));
        }
        if self.threshold_fraction >= 1.0 {
            return Err(Error::InvalidArgument("threshold fraction must be < 1".into()));
        }
        Ok(())
    }
}

/// Strictly increasing R-peak sample indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RPeakList {
    pub indices: Vec<usize>,
    /// Set when detection could not run meaningfully (flat input).
    pub low_confidence: bool,
}

impl RPeakList {
    /// Validates externally supplied peaks.
    pub fn from_indices(indices: Vec<usize>, n_samples: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("R-peaks must be strictly increasing".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= n_samples {
                return Err(Error::InvalidArgument(format!(
                    "R-peak {last} beyond record length {n_samples}"
                )));
            }
        }
        Ok(Self {
            indices,
            low_confidence: false,
        })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn ms_to_samples(ms: f64, fs: f64) -> usize {
    (ms * 1e-3 * fs).round().max(1.0) as usize
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn saturation_scale(x: &[f64], how: SaturationScale) -> f64 {
    let n = x.len() as f64;
    match how {
        SaturationScale::StdDev => {
            let mean = x.iter().sum::<f64>() / n;
            (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
        }
        SaturationScale::Mad => {
            let mut v = x.to_vec();
            let m = median(&mut v);
            let mut dev: Vec<f64> = x.iter().map(|v| (v - m).abs()).collect();
            median(&mut dev) / 0.6745
        }
    }
}

/// Centered moving average with a window shrunk at the edges.
fn centered_moving_average(x: &[f64], width: usize) -> Vec<f64> {
    let n = x.len();
    let half = width / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v;
        prefix.push(acc);
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Maximum over `[i - half, i + half]` for every `i` (monotone deque).
fn sliding_max(x: &[f64], half: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut deque = std::collections::VecDeque::new();
    let mut next = 0;
    for (i, slot) in out.iter_mut().enumerate() {
        let hi = (i + half).min(n - 1);
        while next <= hi {
            while deque.back().is_some_and(|&b: &usize| x[b] <= x[next]) {
                deque.pop_back();
            }
            deque.push_back(next);
            next += 1;
        }
        while deque.front().is_some_and(|&f| f + half < i) {
            deque.pop_front();
        }
        *slot = x[*deque.front().expect("window is never empty")];
    }
    out
}

fn argmax_abs(x: &[f64], lo: usize, hi: usize) -> usize {
    (lo..=hi)
        .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(b.cmp(&a)))
        .expect("non-empty range")
}

pub fn detect_r_peaks(x: &[f64], fs: f64, cfg: &DetectorConfig) -> Result<RPeakList> {
    cfg.validate()?;
    if !(fs > 0.0) {
        return Err(Error::InvalidArgument(format!("sampling frequency {fs} must be > 0")));
    }
    let min_len = (2.0 * fs).ceil() as usize;
    if x.len() < min_len {
        return Err(Error::TooShort {
            needed: min_len,
            got: x.len(),
        });
    }

    let band = bandpass_zero_phase(x, fs, cfg.band_low_hz, cfg.band_high_hz)?;
    let scale = saturation_scale(&band, cfg.saturation_scale);
    let peak_abs = band.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // rounding residue of a constant input is not a signal
    let input_abs = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(scale > 0.0) || peak_abs <= 1e-9 * input_abs {
        return Ok(RPeakList {
            indices: Vec::new(),
            low_confidence: true,
        });
    }

    let level = cfg.saturation_kappa * scale;
    let energy: Vec<f64> = band.iter().map(|v| (level * (v / level).tanh()).powi(2)).collect();
    let envelope: Vec<f64> = centered_moving_average(&energy, ms_to_samples(cfg.window_ms, fs))
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let local_max = sliding_max(&envelope, ms_to_samples(cfg.threshold_window_ms, fs));

    let search = ms_to_samples(cfg.search_ms, fs);
    let refractory = ms_to_samples(cfg.refractory_ms, fs);
    let n = x.len();
    let mut peaks: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        if envelope[i] <= cfg.threshold_fraction * local_max[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && envelope[i] > cfg.threshold_fraction * local_max[i] {
            i += 1;
        }
        let crest = (start..i)
            .max_by(|&a, &b| envelope[a].total_cmp(&envelope[b]).then(b.cmp(&a)))
            .expect("non-empty run");
        let candidate = argmax_abs(&band, crest.saturating_sub(search), (crest + search).min(n - 1));

        match peaks.last_mut() {
            Some(last) if candidate <= *last => {}
            Some(last) if candidate - *last < refractory => {
                if band[candidate].abs() > band[*last].abs() {
                    *last = candidate;
                }
            }
            _ => peaks.push(candidate),
        }
    }

    Ok(RPeakList {
        indices: peaks,
        low_confidence: false,
    })
}

/// One beat, all indices inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Beat {
    pub start: usize,
    pub r_peak: usize,
    pub end: usize,
}

impl Beat {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeatSegmentation {
    pub beats: Vec<Beat>,
    pub n_samples: usize,
}

impl BeatSegmentation {
    pub fn len(&self) -> usize {
        self.beats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beats.is_empty()
    }

    pub fn max_beat_len(&self) -> usize {
        self.beats.iter().map(Beat::len).max().unwrap_or(0)
    }

    /// First and last sample covered by some beat.
    pub fn covered(&self) -> std::ops::RangeInclusive<usize> {
        self.beats[0].start..=self.beats[self.beats.len() - 1].end
    }
}

/// Splits the record at the midpoints between successive R-peaks. The first
/// and last beats extend outward by the same half-width as their inner side.
pub fn segment_beats(peaks: &RPeakList, n_samples: usize) -> Result<BeatSegmentation> {
    let r = &peaks.indices;
    if r.len() < 2 {
        return Err(Error::TooFewBeats {
            needed: 2,
            got: r.len(),
        });
    }
    if r.windows(2).any(|w| w[1] < w[0] + 2) {
        return Err(Error::InvalidArgument(
            "R-peaks must be increasing and at least 2 samples apart".into(),
        ));
    }
    if r[r.len() - 1] >= n_samples {
        return Err(Error::InvalidArgument(format!(
            "R-peak {} beyond record length {n_samples}",
            r[r.len() - 1]
        )));
    }

    // boundary[i] is the first sample of beat i + 1
    let boundaries: Vec<usize> = r.windows(2).map(|w| (w[0] + w[1]) / 2).collect();
    let last = r.len() - 1;
    let beats = (0..r.len())
        .map(|i| {
            let start = if i == 0 {
                r[0].saturating_sub(boundaries[0] - r[0])
            } else {
                boundaries[i - 1]
            };
            let end = if i == last {
                (r[last] + (r[last] - boundaries[last - 1])).min(n_samples - 1)
            } else {
                boundaries[i] - 1
            };
            Beat {
                start,
                r_peak: r[i],
                end,
            }
        })
        .collect();
    Ok(BeatSegmentation { beats, n_samples })
}
