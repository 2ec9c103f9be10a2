//! Record ingestion (WFDB format 212, CSV) and report serialization.

pub mod csv;
pub mod record;
pub mod report;
pub mod wfdb;

pub use self::csv::{read_csv_record, write_csv_record};
pub use record::EcgRecord;
pub use report::{read_report_csv, read_report_json, write_report, ReportDocument, ReportFormat};
pub use wfdb::{decode_format212, encode_format212, read_wfdb_files, read_wfdb_record, RecordHeader};
