//! Experiment reports in JSON and CSV.
//!
//! JSON layout: `{ "config", "rows", "aggregates", "skipped" }`, keys in that
//! order. CSV layout: a `# config <json>` comment line, the row table with a
//! header, then one `# aggregate ...` comment line per (method, level).
//! Aggregate standard deviations use population normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{ExperimentConfig, Method, SnrResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidArgument(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: Method,
    pub level_db: f64,
    pub n: usize,
    pub mean_improvement_db: f64,
    pub std_improvement_db: f64,
}

/// A task that failed; kept in the report instead of aborting the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTask {
    pub record: String,
    pub lead: usize,
    pub level_db: f64,
    pub repetition: usize,
    pub method: Method,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: ExperimentConfig,
    pub rows: Vec<SnrResult>,
    pub aggregates: Vec<AggregateRow>,
    pub skipped: Vec<SkippedTask>,
}

impl ReportDocument {
    /// Builds a report, computing aggregates from `rows`.
    pub fn new(config: ExperimentConfig, rows: Vec<SnrResult>, skipped: Vec<SkippedTask>) -> Self {
        let aggregates = aggregate(&rows);
        Self {
            config,
            rows,
            aggregates,
            skipped,
        }
    }

    pub fn aggregate_for(&self, method: Method, level_db: f64) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.level_db == level_db)
    }
}

/// Mean and population standard deviation of improvement per (method, level),
/// ordered by method then level.
pub fn aggregate(rows: &[SnrResult]) -> Vec<AggregateRow> {
    let mut keys: Vec<(Method, f64)> = rows.iter().map(|r| (r.method, r.level_db)).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(method, level_db)| {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.method == method && r.level_db == level_db)
                .map(|r| r.improvement_db)
                .collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            AggregateRow {
                method,
                level_db,
                n: values.len(),
                mean_improvement_db: mean,
                std_improvement_db: var.sqrt(),
            }
        })
        .collect()
}

const CSV_COLUMNS: [&str; 8] = [
    "record",
    "lead",
    "level_db",
    "repetition",
    "method",
    "input_snr_db",
    "output_snr_db",
    "improvement_db",
];

pub fn write_report(report: &ReportDocument, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => write_csv(report),
    }
}

fn write_csv(report: &ReportDocument) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(b"# config ");
    out.extend_from_slice(&serde_json::to_vec(&report.config)?);
    out.push(b'\n');

    let mut writer = csv::WriterBuilder::new().from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    for r in &report.rows {
        writer.write_record([
            r.record.clone(),
            r.lead.to_string(),
            r.level_db.to_string(),
            r.repetition.to_string(),
            r.method.as_str().to_string(),
            r.input_snr_db.to_string(),
            r.output_snr_db.to_string(),
            r.improvement_db.to_string(),
        ])?;
    }
    let mut out = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    for a in &report.aggregates {
        out.extend_from_slice(
            format!(
                "# aggregate method={} level_db={} n={} mean_improvement_db={} std_improvement_db={}\n",
                a.method.as_str(),
                a.level_db,
                a.n,
                a.mean_improvement_db,
                a.std_improvement_db
            )
            .as_bytes(),
        );
    }
    for s in &report.skipped {
        out.extend_from_slice(
            format!(
                "# skipped record={} lead={} level_db={} repetition={} method={} reason={:?}\n",
                s.record,
                s.lead,
                s.level_db,
                s.repetition,
                s.method.as_str(),
                s.reason
            )
            .as_bytes(),
        );
    }
    Ok(out)
}

pub fn read_report_json(bytes: &[u8]) -> Result<ReportDocument> {
    Ok(serde_json::from_slice(bytes)?)
}

/// Reads the config and rows back from a CSV report; aggregates are
/// recomputed from the rows. Skipped tasks are not recovered.
pub fn read_report_csv(bytes: &[u8]) -> Result<ReportDocument> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::InvalidArgument(format!("report is not UTF-8: {e}")))?;
    let config_line = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# config "))
        .ok_or_else(|| Error::InvalidArgument("CSV report lacks a config line".into()))?;
    let config: ExperimentConfig = serde_json::from_str(config_line)?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let num = |i: usize| -> Result<f64> {
            field(i).parse().map_err(|_| Error::NonNumericCell {
                row: rows.len(),
                column: i,
                cell: field(i).to_string(),
            })
        };
        rows.push(SnrResult {
            record: field(0).to_string(),
            lead: num(1)? as usize,
            level_db: num(2)?,
            repetition: num(3)? as usize,
            method: field(4).parse()?,
            input_snr_db: num(5)?,
            output_snr_db: num(6)?,
            improvement_db: num(7)?,
            metrics: Default::default(),
        });
    }
    Ok(ReportDocument::new(config, rows, Vec::new()))
}
