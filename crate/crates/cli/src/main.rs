//! `gpecg`: denoise ECG records, run SNR benchmarks and write synthetic
//! records.
//!
//! Exit codes: 0 on success, 2 when some records or tasks failed but a
//! result was still produced, 1 on fatal errors.

mod input;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ecg_gp::eval::{run_experiment, synthesize_ecg, ExperimentConfig, Method, SynthSpec};
use ecg_gp::gp::{filter_record, FilterOptions};
use ecg_gp::io::csv::{read_index_list, write_columns};
use ecg_gp::io::{write_csv_record, write_report, EcgRecord, ReportFormat};
use ecg_gp::preprocessing::remove_baseline_wander;
use ecg_gp::wavelet::{denoise_wavelet, ThresholdRule, Wavelet, WaveletSpec};
use log::{info, warn};

use input::{list_records, load_record, parse_levels, synthetic_suite, CsvOptions, InputFormat};

#[derive(Parser)]
#[command(name = "gpecg", version, about = "Phase-domain Gaussian-process ECG denoiser")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Filter one lead of a record.
    Denoise(DenoiseArgs),
    /// SNR-improvement sweep over records or the synthetic suite.
    Bench(BenchArgs),
    /// Write a synthetic ECG record as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct CsvArgs {
    /// Sampling frequency of CSV inputs (Hz).
    #[arg(long, default_value_t = 250.0)]
    fs: f64,
    /// CSV inputs start with a header row.
    #[arg(long)]
    csv_header: bool,
}

#[derive(Args)]
struct WaveletArgs {
    #[arg(long, default_value = "sym5", value_parser = parse_wavelet)]
    wavelet: Wavelet,
    #[arg(long, default_value = "hybrid-sure", value_parser = parse_rule)]
    threshold: ThresholdRule,
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    format: InputFormat,
    #[arg(long, default_value_t = 0)]
    lead: usize,
    #[arg(long, default_value = "gp-posterior", value_parser = parse_method)]
    method: Method,
    /// Phase-domain length; defaults to 1.2x the longest beat.
    #[arg(long)]
    phase_bins: Option<usize>,
    /// Noise variance in mV^2; estimated from the data when absent.
    #[arg(long)]
    noise_var: Option<f64>,
    /// CSV list of R-peak sample indices; skips detection.
    #[arg(long)]
    peaks: Option<PathBuf>,
    /// Skip baseline-wander removal.
    #[arg(long)]
    no_preprocess: bool,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    wavelet: WaveletArgs,
    /// Wavelet decomposition levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// A directory of .hea/.csv records, or `synth` for the synthetic suite.
    #[arg(long)]
    input: String,
    /// Input SNR levels in dB: `start:step:stop` or a comma list.
    #[arg(long, default_value = "-5:5:30", allow_hyphen_values = true)]
    levels: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Comma-separated subset of gp-posterior, gp-prior, wavelet.
    #[arg(long, default_value = "gp-posterior,gp-prior,wavelet", value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    #[arg(long, default_value = "0", value_delimiter = ',')]
    leads: Vec<usize>,
    #[arg(long)]
    phase_bins: Option<usize>,
    #[arg(long)]
    noise_var: Option<f64>,
    /// Number of synthetic records when the input is `synth`.
    #[arg(long, default_value_t = 5)]
    synth_records: usize,
    /// Duration of each synthetic record (s).
    #[arg(long, default_value_t = 60.0)]
    synth_duration: f64,
    #[command(flatten)]
    csv: CsvArgs,
    #[command(flatten)]
    wavelet: WaveletArgs,
    /// Wavelet decomposition levels.
    #[arg(long, default_value_t = 4)]
    wavelet_levels: usize,
    /// Report path; the format follows the extension unless given.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    report_format: Option<ReportKind>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportKind {
    Json,
    Csv,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 60.0)]
    bpm: f64,
    /// Seconds.
    #[arg(long, default_value_t = 30.0)]
    duration: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 250.0)]
    fs: f64,
    /// RR standard deviation as a fraction of the mean.
    #[arg(long, default_value_t = 0.0)]
    rr_jitter: f64,
    /// Lag-one correlation of successive RR deviations.
    #[arg(long, default_value_t = SynthSpec::default().rr_correlation)]
    rr_correlation: f64,
    /// Standard deviation of the per-beat amplitude factor.
    #[arg(long, default_value_t = 0.0)]
    amplitude_jitter: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the true R-peak indices here.
    #[arg(long)]
    peaks_out: Option<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: ecg_gp::Error| e.to_string())
}

fn parse_wavelet(s: &str) -> std::result::Result<Wavelet, String> {
    s.parse().map_err(|e: ecg_gp::Error| e.to_string())
}

fn parse_rule(s: &str) -> std::result::Result<ThresholdRule, String> {
    s.parse().map_err(|e: ecg_gp::Error| e.to_string())
}

impl WaveletArgs {
    fn spec(&self, levels: usize) -> WaveletSpec {
        WaveletSpec {
            wavelet: self.wavelet,
            levels,
            rule: self.threshold,
        }
    }
}

impl CsvArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            fs: self.fs,
            has_header: self.csv_header,
        }
    }
}

enum Outcome {
    Complete,
    Partial,
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn denoise(args: &DenoiseArgs) -> Result<Outcome> {
    let record = load_record(&args.input, args.format, &args.csv.options())?;
    info!(
        "{}: {} leads, {} samples at {} Hz",
        record.name,
        record.n_leads(),
        record.len(),
        record.fs
    );
    for w in &record.warnings {
        warn!("{w}");
    }

    let text = match args.method {
        Method::Wavelet => {
            let raw = record.lead(args.lead)?;
            let x = if args.no_preprocess {
                raw.to_vec()
            } else {
                remove_baseline_wander(raw, record.fs)?
            };
            let y = denoise_wavelet(&x, &args.wavelet.spec(args.levels))?;
            write_columns(&["input", "filtered"], &[&x, &y])?
        }
        Method::GpPosterior | Method::GpPrior => {
            let peaks = match &args.peaks {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .with_context(|| format!("reading {}", p.display()))?;
                    Some(read_index_list(&text)?)
                }
                None => None,
            };
            let opts = FilterOptions {
                preprocess: !args.no_preprocess,
                peaks,
                phase_bins: args.phase_bins,
                noise_var: args.noise_var,
                ..FilterOptions::default()
            };
            let out = filter_record(&record, args.lead, &opts)?;
            let d = &out.diagnostics;
            info!(
                "{} beats, phase length {}, noise variance {:.3e}",
                d.n_beats, d.phase_bins, d.noise_var
            );
            if !d.degenerate_beats.is_empty() {
                warn!("zero-variance phases in beats {:?}", d.degenerate_beats);
            }
            let filtered = match args.method {
                Method::GpPrior => &out.prior,
                _ => &out.posterior,
            };
            write_columns(
                &["input", "filtered", "prior", "variance"],
                &[&out.input, filtered, &out.prior, &out.variance],
            )?
        }
    };
    write_output(&args.out, text.as_bytes())?;
    Ok(Outcome::Complete)
}

fn bench(args: &BenchArgs) -> Result<Outcome> {
    let mut partial = false;
    let records: Vec<EcgRecord> = if args.input == "synth" {
        synthetic_suite(args.synth_records, args.synth_duration)?
    } else {
        let dir = Path::new(&args.input);
        if !dir.is_dir() {
            bail!("{} is neither a directory nor `synth`", dir.display());
        }
        let mut loaded = Vec::new();
        for (path, format) in list_records(dir)? {
            match load_record(&path, format, &args.csv.options()) {
                Ok(r) => loaded.push(r),
                Err(e) => {
                    warn!("skipping {}: {e:#}", path.display());
                    partial = true;
                }
            }
        }
        if loaded.is_empty() {
            bail!("no readable records in {}", dir.display());
        }
        loaded
    };

    let cfg = ExperimentConfig {
        levels_db: parse_levels(&args.levels)?,
        repetitions: args.reps,
        seed: args.seed,
        methods: args.methods.clone(),
        leads: args.leads.clone(),
        phase_bins: args.phase_bins,
        noise_var: args.noise_var,
        wavelet: args.wavelet.spec(args.wavelet_levels),
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&records, &cfg)?;
    for s in &report.skipped {
        warn!(
            "skipped {} lead {} at {} dB rep {} ({}): {}",
            s.record,
            s.lead,
            s.level_db,
            s.repetition,
            s.method.as_str(),
            s.reason
        );
    }
    partial |= !report.skipped.is_empty();

    let format = match args.report_format {
        Some(ReportKind::Json) => ReportFormat::Json,
        Some(ReportKind::Csv) => ReportFormat::Csv,
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        },
    };
    write_output(&args.out, &write_report(&report, format)?)?;
    for a in &report.aggregates {
        info!(
            "{:>12} {:>6.1} dB: {:+.2} ± {:.2} dB (n={})",
            a.method.as_str(),
            a.level_db,
            a.mean_improvement_db,
            a.std_improvement_db,
            a.n
        );
    }
    Ok(if partial { Outcome::Partial } else { Outcome::Complete })
}

fn synth(args: &SynthArgs) -> Result<Outcome> {
    let spec = SynthSpec {
        heart_rate_bpm: args.bpm,
        rr_jitter: args.rr_jitter,
        rr_correlation: args.rr_correlation,
        amplitude_jitter: args.amplitude_jitter,
        fs: args.fs,
        duration_s: args.duration,
        ..SynthSpec::default()
    };
    let (record, truth) = synthesize_ecg(&spec, args.seed)?;
    write_output(&args.out, write_csv_record(&record)?.as_bytes())?;
    if let Some(path) = &args.peaks_out {
        let lines: String = truth.r_peaks.iter().map(|p| format!("{p}\n")).collect();
        write_output(path, lines.as_bytes())?;
    }
    Ok(Outcome::Complete)
}

fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring worker threads")?;
    }
    match &cli.command {
        Command::Denoise(a) => denoise(a),
        Command::Bench(a) => bench(a),
        Command::Synth(a) => synth(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();

    match run(&cli) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
