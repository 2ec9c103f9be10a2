//! WFDB record reading, restricted to the packed 12-bit format 212.
//!
//! Format 212 stores two samples in three bytes: the first sample is the low
//! byte plus the low nibble of the middle byte, the second is the third byte
//! plus the high nibble of the middle byte. Both are 12-bit two's complement.
//! Samples of all signals are interleaved frame by frame.

use std::path::Path;

use log::warn;

use super::record::EcgRecord;
use crate::error::{Error, Result};

pub const DEFAULT_GAIN: f64 = 200.0;
pub const DEFAULT_FS: f64 = 250.0;

/// Per-lead header metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadSpec {
    pub file_name: String,
    pub format: u32,
    /// ADC units per physical unit.
    pub gain: f64,
    /// ADC value corresponding to 0 physical units.
    pub baseline: f64,
    pub units: String,
    pub description: String,
    /// Byte offset of the first sample in the data file.
    pub byte_offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordHeader {
    pub name: String,
    pub fs: f64,
    /// Samples per lead; `None` when the header omits it.
    pub n_samples: Option<usize>,
    pub leads: Vec<LeadSpec>,
    pub warnings: Vec<String>,
}

impl RecordHeader {
    pub fn n_leads(&self) -> usize {
        self.leads.len()
    }
}

fn leading_number(field: &str) -> &str {
    let end = field
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+'))))
        .map_or(field.len(), |(i, _)| i);
    &field[..end]
}

fn parse_num<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::MalformedHeader(format!("cannot parse {what} from {field:?}")))
}

pub fn parse_header(text: &str) -> Result<RecordHeader> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let record_line = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty header".into()))?;
    let mut fields = record_line.split_whitespace();
    let name = fields
        .next()
        .ok_or_else(|| Error::MalformedHeader("missing record name".into()))?;
    if name.contains('/') {
        return Err(Error::MalformedHeader("multi-segment records are not supported".into()));
    }
    let n_leads: usize = parse_num(
        fields
            .next()
            .ok_or_else(|| Error::MalformedHeader("missing signal count".into()))?,
        "signal count",
    )?;
    if n_leads == 0 {
        return Err(Error::MalformedHeader("record declares no signals".into()));
    }
    let fs = match fields.next() {
        // "250", "250/1000", "250(0)"
        Some(f) => parse_num::<f64>(leading_number(f), "sampling frequency")?,
        None => DEFAULT_FS,
    };
    if !(fs > 0.0) {
        return Err(Error::MalformedHeader(format!("sampling frequency {fs} must be > 0")));
    }
    let n_samples = fields
        .next()
        .map(|f| parse_num::<usize>(f, "sample count"))
        .transpose()?
        .filter(|&n| n > 0);

    let mut warnings = Vec::new();
    let mut leads = Vec::with_capacity(n_leads);
    for i in 0..n_leads {
        let line = lines.next().ok_or_else(|| {
            Error::MalformedHeader(format!("expected {n_leads} signal lines, found {i}"))
        })?;
        leads.push(parse_signal_line(line, i, &mut warnings)?);
    }
    if leads.iter().any(|l| l.file_name != leads[0].file_name) {
        return Err(Error::MalformedHeader(
            "signals stored in separate files are not supported".into(),
        ));
    }

    Ok(RecordHeader {
        name: name.to_string(),
        fs,
        n_samples,
        leads,
        warnings,
    })
}

fn parse_signal_line(line: &str, index: usize, warnings: &mut Vec<String>) -> Result<LeadSpec> {
    let mut fields = line.split_whitespace();
    let file_name = fields
        .next()
        .ok_or_else(|| Error::MalformedHeader(format!("signal {index}: missing file name")))?
        .to_string();
    let fmt_field = fields
        .next()
        .ok_or_else(|| Error::MalformedHeader(format!("signal {index}: missing format")))?;

    // format[xsamp][:skew][+offset]
    let digits = leading_number(fmt_field);
    let format: u32 = parse_num(digits, "format")?;
    let rest = &fmt_field[digits.len()..];
    if rest.starts_with('x') {
        return Err(Error::MalformedHeader(format!(
            "signal {index}: multi-frequency records are not supported"
        )));
    }
    let byte_offset = match rest.find('+') {
        Some(p) => parse_num(&rest[p + 1..], "byte offset")?,
        None => 0,
    };
    if format != 212 {
        return Err(Error::UnsupportedFormat(format));
    }

    // adcgain[(baseline)][/units]
    let (mut gain, mut baseline, mut units) = (0.0, None, String::from("mV"));
    if let Some(g) = fields.next() {
        let (value, tail) = match g.find(['(', '/']) {
            Some(p) => (&g[..p], &g[p..]),
            None => (g, ""),
        };
        gain = parse_num(value, "gain")?;
        if let Some(inner) = tail.strip_prefix('(') {
            let close = inner.find(')').ok_or_else(|| {
                Error::MalformedHeader(format!("signal {index}: unbalanced baseline in {g:?}"))
            })?;
            baseline = Some(parse_num::<f64>(&inner[..close], "baseline")?);
        }
        if let Some(p) = tail.find('/') {
            units = tail[p + 1..].to_string();
        }
    }
    if gain == 0.0 {
        let msg = format!("signal {index}: gain missing, using {DEFAULT_GAIN} adu/mV");
        warn!("{msg}");
        warnings.push(msg);
        gain = DEFAULT_GAIN;
    }
    let baseline = baseline.unwrap_or_else(|| {
        warnings.push(format!("signal {index}: baseline missing, using 0"));
        0.0
    });
    // adcres, adczero, initval, checksum, blocksize, then free-text description
    let description = fields.skip(5).collect::<Vec<_>>().join(" ");

    Ok(LeadSpec {
        file_name,
        format,
        gain,
        baseline,
        units,
        description,
        byte_offset,
    })
}

/// Bytes needed to hold `n_values` format-212 samples.
pub fn format212_len(n_values: usize) -> usize {
    (3 * n_values).div_ceil(2)
}

fn sign_extend_12(v: u16) -> i16 {
    ((v << 4) as i16) >> 4
}

/// Decodes `n_values` packed 12-bit samples.
pub fn decode_format212(bytes: &[u8], n_values: usize) -> Result<Vec<i16>> {
    let expected = format212_len(n_values);
    if bytes.len() < expected {
        return Err(Error::TruncatedData {
            expected,
            found: bytes.len(),
        });
    }
    let mut out = Vec::with_capacity(n_values);
    for chunk in bytes[..expected].chunks(3) {
        let lo = chunk[0] as u16 | ((chunk[1] as u16 & 0x0f) << 8);
        out.push(sign_extend_12(lo));
        if let Some(&b2) = chunk.get(2) {
            let hi = b2 as u16 | ((chunk[1] as u16 & 0xf0) << 4);
            out.push(sign_extend_12(hi));
        }
    }
    out.truncate(n_values);
    Ok(out)
}

/// Packs samples into format 212. Values must fit in 12 bits.
pub fn encode_format212(values: &[i16]) -> Result<Vec<u8>> {
    if let Some(v) = values.iter().find(|v| !(-2048..=2047).contains(*v)) {
        return Err(Error::InvalidArgument(format!("{v} does not fit in 12 bits")));
    }
    let mut out = Vec::with_capacity(format212_len(values.len()));
    for pair in values.chunks(2) {
        let a = pair[0] as u16 & 0x0fff;
        out.push((a & 0xff) as u8);
        match pair.get(1) {
            Some(&b) => {
                let b = b as u16 & 0x0fff;
                out.push(((a >> 8) | ((b >> 8) << 4)) as u8);
                out.push((b & 0xff) as u8);
            }
            None => out.push((a >> 8) as u8),
        }
    }
    Ok(out)
}

pub fn adc_to_physical(adc: f64, gain: f64, baseline: f64) -> f64 {
    (adc - baseline) / gain
}

pub fn physical_to_adc(value: f64, gain: f64, baseline: f64) -> f64 {
    value * gain + baseline
}

fn unit_scale_to_mv(units: &str) -> Option<f64> {
    match units {
        "mV" | "mv" => Some(1.0),
        "uV" | "uv" | "µV" => Some(1e-3),
        "V" | "v" => Some(1e3),
        _ => None,
    }
}

/// Decodes a format-212 record from its header text and data bytes.
pub fn read_wfdb_record(header_text: &str, dat_bytes: &[u8]) -> Result<EcgRecord> {
    let header = parse_header(header_text)?;
    let n_leads = header.n_leads();
    let offset = header.leads[0].byte_offset;
    let data = dat_bytes.get(offset..).ok_or(Error::TruncatedData {
        expected: offset,
        found: dat_bytes.len(),
    })?;

    let n_samples = match header.n_samples {
        Some(n) => n,
        None => {
            // two samples per three bytes
            let n = data.len() * 2 / 3 / n_leads;
            if n == 0 {
                return Err(Error::TruncatedData {
                    expected: format212_len(n_leads),
                    found: data.len(),
                });
            }
            n
        }
    };
    let raw = decode_format212(data, n_samples * n_leads)?;

    let mut warnings = header.warnings.clone();
    let mut leads = vec![Vec::with_capacity(n_samples); n_leads];
    let scales: Vec<f64> = header
        .leads
        .iter()
        .enumerate()
        .map(|(i, l)| {
            unit_scale_to_mv(&l.units).unwrap_or_else(|| {
                warnings.push(format!("signal {i}: unknown units {:?}, treated as mV", l.units));
                1.0
            })
        })
        .collect();
    for frame in raw.chunks_exact(n_leads) {
        for (lead_idx, &adc) in frame.iter().enumerate() {
            let spec = &header.leads[lead_idx];
            leads[lead_idx]
                .push(adc_to_physical(adc as f64, spec.gain, spec.baseline) * scales[lead_idx]);
        }
    }

    let mut record = EcgRecord::new(header.name.clone(), header.fs, leads)?;
    record.warnings = warnings;
    Ok(record)
}

/// Reads `<stem>.hea` and the data file it names from the same directory.
pub fn read_wfdb_files(header_path: &Path) -> Result<EcgRecord> {
    let header_text = std::fs::read_to_string(header_path)?;
    let header = parse_header(&header_text)?;
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let dat = std::fs::read(dir.join(&header.leads[0].file_name))?;
    read_wfdb_record(&header_text, &dat)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "sel100 2 250 4\n\
        sel100.dat 212 200(0)/mV 11 0 0 0 0 MLII\n\
        sel100.dat 212 200/mV 11 0 0 0 0 V5\n";

    #[test]
    fn decodes_documented_triples() {
        assert_eq!(decode_format212(&[0x01, 0x00, 0x00], 2).unwrap(), vec![1, 0]);
        assert_eq!(decode_format212(&[0x00, 0x08, 0x00], 2).unwrap(), vec![-2048, 0]);
        assert_eq!(decode_format212(&[0xff, 0xff, 0xff], 2).unwrap(), vec![-1, -1]);
        assert_eq!(decode_format212(&[0x34, 0x52, 0x01], 2).unwrap(), vec![0x234, 0x501]);
    }

    #[test]
    fn odd_count_uses_two_bytes() {
        let bytes = encode_format212(&[5, -6, 7]).unwrap();
        assert_eq!(bytes.len(), 5);
        assert_eq!(decode_format212(&bytes, 3).unwrap(), vec![5, -6, 7]);
    }

    #[test]
    fn truncated_stream_is_an_error() {
        let err = decode_format212(&[0, 0, 0, 0], 4).unwrap_err();
        assert!(matches!(err, Error::TruncatedData { expected: 6, found: 4 }));
    }

    #[test]
    fn encode_rejects_wide_values() {
        assert!(encode_format212(&[2048]).is_err());
        assert!(encode_format212(&[-2049]).is_err());
    }

    #[test]
    fn calibration() {
        assert_eq!(adc_to_physical(200.0, 200.0, 0.0), 1.0);
        assert_eq!(adc_to_physical(1024.0, 200.0, 1024.0), 0.0);
        assert_eq!(physical_to_adc(adc_to_physical(37.0, 400.0, -12.0), 400.0, -12.0), 37.0);
    }

    #[test]
    fn parses_header_fields() {
        let h = parse_header(HEADER).unwrap();
        assert_eq!(h.name, "sel100");
        assert_eq!(h.n_leads(), 2);
        assert_eq!(h.fs, 250.0);
        assert_eq!(h.n_samples, Some(4));
        assert_eq!(h.leads[0].description, "MLII");
        assert_eq!(h.leads[1].baseline, 0.0);
        assert_eq!(h.warnings.len(), 1);
    }

    #[test]
    fn missing_gain_defaults_with_warning() {
        let h = parse_header("r 1 360\nr.dat 212\n").unwrap();
        assert_eq!(h.leads[0].gain, DEFAULT_GAIN);
        assert_eq!(h.leads[0].baseline, 0.0);
        assert_eq!(h.fs, 360.0);
        assert_eq!(h.n_samples, None);
        assert_eq!(h.warnings.len(), 2);
    }

    #[test]
    fn rejects_other_formats_and_garbage() {
        assert!(matches!(
            parse_header("r 1 250 10\nr.dat 16 200\n"),
            Err(Error::UnsupportedFormat(16))
        ));
        assert!(matches!(parse_header(""), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_header("r two 250\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_header("r 2 250 10\nr.dat 212 200\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(
            parse_header("r 2 250 10\na.dat 212 200\nb.dat 212 200\n"),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn reads_interleaved_record() {
        // frames: (200, -200), (400, 0), (0, 100), (-2048, 2047)
        let raw = [200, -200, 400, 0, 0, 100, -2048, 2047];
        let dat = encode_format212(&raw).unwrap();
        let rec = read_wfdb_record(HEADER, &dat).unwrap();
        assert_eq!(rec.fs, 250.0);
        assert_eq!(rec.lead(0).unwrap(), &[1.0, 2.0, 0.0, -10.24]);
        assert_eq!(rec.lead(1).unwrap(), &[-1.0, 0.0, 0.5, 10.235]);
    }

    #[test]
    fn sample_count_inferred_from_data_length() {
        let dat = encode_format212(&[200, 400, 600, 800]).unwrap();
        let rec = read_wfdb_record("r 1 250\nr.dat 212 200(0)/mV\n", &dat).unwrap();
        assert_eq!(rec.lead(0).unwrap(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn microvolt_units_are_scaled() {
        let dat = encode_format212(&[1000, 0]).unwrap();
        let rec = read_wfdb_record("r 1 250 2\nr.dat 212 1(0)/uV\n", &dat).unwrap();
        assert_eq!(rec.lead(0).unwrap(), &[1.0, 0.0]);
    }

    #[test]
    fn truncated_record() {
        let dat = encode_format212(&[1, 2]).unwrap();
        assert!(matches!(
            read_wfdb_record(HEADER, &dat),
            Err(Error::TruncatedData { .. })
        ));
    }
}
