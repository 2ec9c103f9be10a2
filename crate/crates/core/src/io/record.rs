use crate::error::{Error, Result};

/// A uniformly sampled multi-lead ECG held in physical units (mV).
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub name: String,
    /// Sampling frequency in Hz.
    pub fs: f64,
    leads: Vec<Vec<f64>>,
    /// Non-fatal notes gathered while loading (defaulted calibration etc.).
    pub warnings: Vec<String>,
}

impl EcgRecord {
    pub fn new(name: impl Into<String>, fs: f64, leads: Vec<Vec<f64>>) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidRecord(format!("sampling frequency {fs} must be > 0")));
        }
        let Some(first) = leads.first() else {
            return Err(Error::InvalidRecord("record has no leads".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidRecord("record has no samples".into()));
        }
        if let Some((i, lead)) = leads.iter().enumerate().find(|(_, l)| l.len() != n) {
            return Err(Error::InvalidRecord(format!(
                "lead {i} has {} samples, lead 0 has {n}",
                lead.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            fs,
            leads,
            warnings: Vec::new(),
        })
    }

    pub fn n_leads(&self) -> usize {
        self.leads.len()
    }

    /// Samples per lead.
    pub fn len(&self) -> usize {
        self.leads[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn duration_secs(&self) -> f64 {
        self.len() as f64 / self.fs
    }

    pub fn lead(&self, index: usize) -> Result<&[f64]> {
        self.leads.get(index).map(Vec::as_slice).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "lead {index} out of range ({} leads)",
                self.leads.len()
            ))
        })
    }

    pub fn leads(&self) -> &[Vec<f64>] {
        &self.leads
    }

    pub fn into_leads(self) -> Vec<Vec<f64>> {
        self.leads
    }
}
