use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ecg_gp::eval::{synthesize_ecg, SynthSpec};
use ecg_gp::io::{read_wfdb_files, EcgRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Wfdb,
    Csv,
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub fs: f64,
    pub has_header: bool,
}

/// Loads one record. WFDB inputs may name the header with or without the
/// `.hea` extension.
pub fn load_record(path: &Path, format: InputFormat, csv: &CsvOptions) -> Result<EcgRecord> {
    match format {
        InputFormat::Wfdb => {
            let header = if path.extension().is_some_and(|e| e == "hea") {
                path.to_path_buf()
            } else {
                path.with_extension("hea")
            };
            read_wfdb_files(&header).with_context(|| format!("reading {}", header.display()))
        }
        InputFormat::Csv => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "csv".into());
            ecg_gp::io::csv::read_csv_record_named(&text, csv.fs, csv.has_header, &name)
                .with_context(|| format!("parsing {}", path.display()))
        }
    }
}

/// Record files in a directory: `*.hea` headers and `*.csv` tables, sorted
/// by path so the record order is stable.
pub fn list_records(dir: &Path) -> Result<Vec<(PathBuf, InputFormat)>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("hea") => InputFormat::Wfdb,
            Some("csv") => InputFormat::Csv,
            _ => continue,
        };
        found.push((path, format));
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    if found.is_empty() {
        bail!("no .hea or .csv records in {}", dir.display());
    }
    Ok(found)
}

/// The synthetic benchmark suite: 60 s records at 60 bpm with 5% RR and 10%
/// amplitude jitter, seeds `1..=count`.
pub fn synthetic_suite(count: usize, duration_s: f64) -> Result<Vec<EcgRecord>> {
    let spec = SynthSpec {
        rr_jitter: 0.05,
        amplitude_jitter: 0.10,
        duration_s,
        ..SynthSpec::default()
    };
    (1..=count as u64)
        .map(|seed| Ok(synthesize_ecg(&spec, seed)?.0))
        .collect()
}

/// Parses `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_levels(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("bad level range {s:?}"))?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            bail!("level range {s:?} needs a positive step and stop >= start");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    if parts.len() != 1 {
        bail!("levels must be start:step:stop or a comma list, got {s:?}");
    }
    s.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad level {p:?}")))
        .collect()
}
