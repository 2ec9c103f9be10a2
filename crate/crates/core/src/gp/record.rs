use std::ops::Range;

use log::{debug, warn};
use rayon::prelude::*;

use super::diagonal::{filter_beat_diagonal, BeatPosterior};
use super::full::{filter_beat_full, FullOptions};
use super::model::{estimate_noise_variance, fit_phase_model, DEFAULT_NOISE_PERCENTILE};
use crate::error::{Error, Result};
use crate::io::EcgRecord;
use crate::phase::{default_phase_len, PhaseTransform};
use crate::preprocessing::remove_baseline_wander;
use crate::rpeak::{detect_r_peaks, segment_beats, DetectorConfig, RPeakList};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum FilterKind {
    #[default]
    Diagonal,
    Full(FullOptions),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOptions {
    /// Remove baseline wander before anything else.
    pub preprocess: bool,
    pub detector: DetectorConfig,
    /// Externally supplied R-peaks; skips detection.
    pub peaks: Option<Vec<usize>>,
    /// Phase length override; must cover the longest beat.
    pub phase_bins: Option<usize>,
    /// Noise variance override (mV^2).
    pub noise_var: Option<f64>,
    pub noise_percentile: f64,
    pub kind: FilterKind,
    /// Fit the model only on beats lying entirely inside this sample range.
    pub fit_range: Option<Range<usize>>,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self {
            preprocess: true,
            detector: DetectorConfig::default(),
            peaks: None,
            phase_bins: None,
            noise_var: None,
            noise_percentile: DEFAULT_NOISE_PERCENTILE,
            kind: FilterKind::Diagonal,
            fit_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub n_beats: usize,
    pub n_fit_beats: usize,
    pub phase_bins: usize,
    pub noise_var: f64,
    pub r_peaks: Vec<usize>,
    /// Indices of beats whose posterior hit a zero measurement variance.
    pub degenerate_beats: Vec<usize>,
    /// First and last filtered sample; samples outside pass through.
    pub covered: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredLead {
    /// Signal the filter saw (after optional preprocessing).
    pub input: Vec<f64>,
    pub posterior: Vec<f64>,
    pub prior: Vec<f64>,
    /// Posterior variance; NaN on pass-through samples.
    pub variance: Vec<f64>,
    pub diagnostics: Diagnostics,
}

pub fn filter_record(record: &EcgRecord, lead: usize, opts: &FilterOptions) -> Result<FilteredLead> {
    filter_signal(record.lead(lead)?, record.fs, opts)
}

/// Runs the full pipeline on one lead: optional baseline removal, R-peak
/// detection, segmentation, phase model fit, noise estimation and per-beat
/// posterior filtering.
pub fn filter_signal(x: &[f64], fs: f64, opts: &FilterOptions) -> Result<FilteredLead> {
    let input = if opts.preprocess {
        remove_baseline_wander(x, fs)?
    } else {
        x.to_vec()
    };

    let peaks = match &opts.peaks {
        Some(p) => RPeakList::from_indices(p.clone(), input.len())?,
        None => detect_r_peaks(&input, fs, &opts.detector)?,
    };
    if peaks.low_confidence {
        warn!("R-peak detection ran on a flat signal");
    }
    if peaks.len() < 2 {
        return Err(Error::TooFewBeats {
            needed: 2,
            got: peaks.len(),
        });
    }
    let seg = segment_beats(&peaks, input.len())?;

    let max_len = seg.max_beat_len();
    let phase_bins = match opts.phase_bins {
        Some(t) if t < max_len => {
            return Err(Error::PhaseTooShort {
                n_phase: t,
                n_time: max_len,
            })
        }
        Some(t) => t,
        None => default_phase_len(max_len),
    };
    let transforms: Vec<PhaseTransform> = seg
        .beats
        .iter()
        .map(|b| PhaseTransform::new(b.len(), phase_bins))
        .collect::<Result<_>>()?;
    let beats: Vec<&[f64]> = seg.beats.iter().map(|b| &input[b.range()]).collect();

    let fit_idx: Vec<usize> = match &opts.fit_range {
        Some(r) => (0..beats.len())
            .filter(|&i| r.start <= seg.beats[i].start && seg.beats[i].end < r.end)
            .collect(),
        None => (0..beats.len()).collect(),
    };
    let fit_beats: Vec<&[f64]> = fit_idx.iter().map(|&i| beats[i]).collect();
    let fit_tfs: Vec<PhaseTransform> = fit_idx.iter().map(|&i| transforms[i].clone()).collect();
    let want_full = matches!(opts.kind, FilterKind::Full(_));
    let model = fit_phase_model(&fit_beats, &fit_tfs, want_full)?;
    let model = match opts.noise_var {
        Some(v) => model.with_noise_var(v)?,
        None => estimate_noise_variance(model, opts.noise_percentile)?,
    };
    let noise_var = model.noise_var()?;
    debug!(
        "fitted {} of {} beats, {phase_bins} phase bins, noise variance {noise_var:.3e}",
        fit_idx.len(),
        beats.len()
    );

    let posteriors: Vec<BeatPosterior> = beats
        .par_iter()
        .zip(&transforms)
        .map(|(b, tf)| match &opts.kind {
            FilterKind::Diagonal => filter_beat_diagonal(b, tf, &model),
            FilterKind::Full(full) => filter_beat_full(b, tf, &model, full),
        })
        .collect::<Result<_>>()?;

    let mut posterior = input.clone();
    let mut prior = input.clone();
    let mut variance = vec![f64::NAN; input.len()];
    let mut degenerate_beats = Vec::new();
    for (i, (beat, post)) in seg.beats.iter().zip(&posteriors).enumerate() {
        let range = beat.range();
        posterior[range.clone()].copy_from_slice(&post.s_hat);
        prior[range.clone()].copy_from_slice(&post.prior_mean);
        variance[range].copy_from_slice(&post.post_var);
        if post.degenerate {
            degenerate_beats.push(i);
        }
    }
    if !degenerate_beats.is_empty() {
        warn!("{} beats hit a degenerate measurement variance", degenerate_beats.len());
    }
    let covered = seg.covered();

    Ok(FilteredLead {
        input,
        posterior,
        prior,
        variance,
        diagnostics: Diagnostics {
            n_beats: seg.len(),
            n_fit_beats: fit_idx.len(),
            phase_bins,
            noise_var,
            r_peaks: peaks.indices,
            degenerate_beats,
            covered: (*covered.start(), *covered.end()),
        },
    })
}
