use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{add_white_noise, derive_seed, snr};
use crate::error::{Error, Result};
use crate::gp::{filter_signal, FilterOptions};
use crate::io::report::{ReportDocument, SkippedTask};
use crate::io::EcgRecord;
use crate::preprocessing::remove_baseline_wander;
use crate::wavelet::{denoise_wavelet, WaveletSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GpPosterior,
    GpPrior,
    Wavelet,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::GpPosterior, Method::GpPrior, Method::Wavelet];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GpPosterior => "gp-posterior",
            Self::GpPrior => "gp-prior",
            Self::Wavelet => "wavelet",
        }
    }

    fn is_gp(&self) -> bool {
        matches!(self, Self::GpPosterior | Self::GpPrior)
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub levels_db: Vec<f64>,
    pub repetitions: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub leads: Vec<usize>,
    pub phase_bins: Option<usize>,
    pub noise_var: Option<f64>,
    pub noise_percentile: f64,
    pub wavelet: WaveletSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            levels_db: (-1..=6).map(|k| 5.0 * k as f64).collect(),
            repetitions: 5,
            seed: 42,
            methods: Method::ALL.to_vec(),
            leads: vec![0],
            phase_bins: None,
            noise_var: None,
            noise_percentile: crate::gp::model::DEFAULT_NOISE_PERCENTILE,
            wavelet: WaveletSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        if self.levels_db.is_empty() || self.levels_db.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidArgument("SNR levels must be finite and non-empty".into()));
        }
        if self.methods.is_empty() || self.leads.is_empty() {
            return Err(Error::InvalidArgument("need at least one method and lead".into()));
        }
        Ok(())
    }

    fn filter_options(&self) -> FilterOptions {
        FilterOptions {
            preprocess: false,
            phase_bins: self.phase_bins,
            noise_var: self.noise_var,
            noise_percentile: self.noise_percentile,
            ..FilterOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrResult {
    pub record: String,
    pub lead: usize,
    pub level_db: f64,
    pub repetition: usize,
    pub method: Method,
    pub input_snr_db: f64,
    pub output_snr_db: f64,
    pub improvement_db: f64,
    /// Extra per-row metrics, keyed by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl SnrResult {
    pub fn new(
        record: impl Into<String>,
        lead: usize,
        level_db: f64,
        repetition: usize,
        method: Method,
        input_snr_db: f64,
        output_snr_db: f64,
    ) -> Self {
        Self {
            record: record.into(),
            lead,
            level_db,
            repetition,
            method,
            input_snr_db,
            output_snr_db,
            improvement_db: output_snr_db - input_snr_db,
            metrics: BTreeMap::new(),
        }
    }
}

/// Metric keys attached to GP rows.
pub const METRIC_NOISE_VAR_TRUE: &str = "noise_var_true";
pub const METRIC_NOISE_VAR_EST: &str = "noise_var_est";

struct Task<'a> {
    record_idx: usize,
    record: &'a EcgRecord,
    clean: &'a [f64],
    lead: usize,
    level_idx: usize,
    level_db: f64,
    repetition: usize,
}

type TaskOutput = (Vec<SnrResult>, Vec<SkippedTask>);

fn run_task(task: &Task, cfg: &ExperimentConfig) -> TaskOutput {
    let seed = derive_seed(
        cfg.seed,
        &[
            task.record_idx as u64,
            task.lead as u64,
            task.level_idx as u64,
            task.repetition as u64,
        ],
    );
    let skip_all = |methods: &[Method], reason: String| -> Vec<SkippedTask> {
        methods
            .iter()
            .map(|&method| SkippedTask {
                record: task.record.name.clone(),
                lead: task.lead,
                level_db: task.level_db,
                repetition: task.repetition,
                method,
                reason: reason.clone(),
            })
            .collect()
    };

    let (noisy, noise_var) = match add_white_noise(task.clean, task.level_db, seed) {
        Ok(v) => v,
        Err(e) => return (Vec::new(), skip_all(&cfg.methods, e.to_string())),
    };
    let input_snr = snr(task.clean, &noisy).expect("equal lengths");
    let row = |method: Method, output: &[f64]| {
        let out = snr(task.clean, output).expect("equal lengths");
        SnrResult::new(
            task.record.name.clone(),
            task.lead,
            task.level_db,
            task.repetition,
            method,
            input_snr,
            out,
        )
    };

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let gp_methods: Vec<Method> = cfg.methods.iter().copied().filter(Method::is_gp).collect();
    if !gp_methods.is_empty() {
        match filter_signal(&noisy, task.record.fs, &cfg.filter_options()) {
            Ok(filtered) => {
                for &m in &gp_methods {
                    let output = match m {
                        Method::GpPosterior => &filtered.posterior,
                        _ => &filtered.prior,
                    };
                    let mut r = row(m, output);
                    r.metrics.insert(METRIC_NOISE_VAR_TRUE.into(), noise_var);
                    r.metrics
                        .insert(METRIC_NOISE_VAR_EST.into(), filtered.diagnostics.noise_var);
                    rows.push(r);
                }
            }
            Err(e) => {
                warn!("{} lead {}: GP filter failed: {e}", task.record.name, task.lead);
                skipped.extend(skip_all(&gp_methods, e.to_string()));
            }
        }
    }
    if cfg.methods.contains(&Method::Wavelet) {
        match denoise_wavelet(&noisy, &cfg.wavelet) {
            Ok(out) => rows.push(row(Method::Wavelet, &out)),
            Err(e) => skipped.extend(skip_all(&[Method::Wavelet], e.to_string())),
        }
    }
    (rows, skipped)
}

/// Runs every (record, lead, level, repetition) task and reports SNR
/// improvements. Clean leads are baseline-corrected before noise is added.
/// Each task draws its noise from a seed derived from the master seed and
/// the task key, so results do not depend on scheduling.
pub fn run_experiment(records: &[EcgRecord], cfg: &ExperimentConfig) -> Result<ReportDocument> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to evaluate".into()));
    }

    let mut skipped = Vec::new();
    let mut cleaned = Vec::new();
    for (record_idx, record) in records.iter().enumerate() {
        for &lead in &cfg.leads {
            let clean = record
                .lead(lead)
                .and_then(|x| remove_baseline_wander(x, record.fs));
            match clean {
                Ok(c) => cleaned.push((record_idx, lead, c)),
                Err(e) => {
                    for &level_db in &cfg.levels_db {
                        for repetition in 0..cfg.repetitions {
                            for &method in &cfg.methods {
                                skipped.push(SkippedTask {
                                    record: record.name.clone(),
                                    lead,
                                    level_db,
                                    repetition,
                                    method,
                                    reason: e.to_string(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    let mut tasks = Vec::new();
    for (record_idx, lead, clean) in &cleaned {
        for (level_idx, &level_db) in cfg.levels_db.iter().enumerate() {
            for repetition in 0..cfg.repetitions {
                tasks.push(Task {
                    record_idx: *record_idx,
                    record: &records[*record_idx],
                    clean,
                    lead: *lead,
                    level_idx,
                    level_db,
                    repetition,
                });
            }
        }
    }

    let outputs: Vec<TaskOutput> = tasks.par_iter().map(|t| run_task(t, cfg)).collect();
    let mut rows = Vec::new();
    for (r, s) in outputs {
        rows.extend(r);
        skipped.extend(s);
    }
    Ok(ReportDocument::new(cfg.clone(), rows, skipped))
}
