use super::record::EcgRecord;
use crate::error::{Error, Result};

/// Parses one column per lead, one row per sample.
pub fn read_csv_record(text: &str, fs: f64, has_header: bool) -> Result<EcgRecord> {
    read_csv_record_named(text, fs, has_header, "csv")
}

pub fn read_csv_record_named(text: &str, fs: f64, has_header: bool, name: &str) -> Result<EcgRecord> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut leads: Vec<Vec<f64>> = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let record = result?;
        if leads.is_empty() {
            leads = vec![Vec::new(); record.len()];
        } else if record.len() != leads.len() {
            return Err(Error::RaggedRow {
                row,
                expected: leads.len(),
                found: record.len(),
            });
        }
        for (column, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                row,
                column,
                cell: cell.to_string(),
            })?;
            leads[column].push(value);
        }
    }
    if leads.is_empty() {
        return Err(Error::InvalidRecord("CSV contains no samples".into()));
    }
    EcgRecord::new(name, fs, leads)
}

/// Serializes a record as headerless CSV, one column per lead.
pub fn write_csv_record(record: &EcgRecord) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    for i in 0..record.len() {
        writer.write_record(record.leads().iter().map(|lead| lead[i].to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Writes equal-length columns with a header row.
pub fn write_columns(headers: &[&str], columns: &[&[f64]]) -> Result<String> {
    let n = columns.first().map_or(0, |c| c.len());
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer.write_record(headers)?;
    for i in 0..n {
        writer.write_record(columns.iter().map(|c| c[i].to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Parses a list of sample indices, one per row or comma separated.
pub fn read_index_list(text: &str) -> Result<Vec<usize>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse().map_err(|_| Error::NonNumericCell {
                row: i,
                column: 0,
                cell: s.to_string(),
            })
        })
        .collect()
}
