use crate::error::{Error, Result};

/// Symlet-5 decomposition lowpass taps.
const SYM5_DEC_LO: [f64; 10] = [
    0.027333068345077982,
    0.029519490925774643,
    -0.039134249302383094,
    0.1993975339773936,
    0.7234076904024206,
    0.6339789634582119,
    0.01660210576452232,
    -0.17532808990845047,
    -0.021101834024758855,
    0.019538882735286728,
];

const HAAR_DEC_LO: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    #[default]
    Sym5,
}

impl Wavelet {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::Sym5 => "sym5",
        }
    }

    pub fn dec_lo(&self) -> &'static [f64] {
        match self {
            Self::Haar => &HAAR_DEC_LO,
            Self::Sym5 => &SYM5_DEC_LO,
        }
    }

    pub fn filter_len(&self) -> usize {
        self.dec_lo().len()
    }

    /// Quadrature mirror of the lowpass: `hi[k] = (-1)^(k+1) lo[F-1-k]`.
    pub fn dec_hi(&self) -> Vec<f64> {
        let lo = self.dec_lo();
        let f = lo.len();
        (0..f)
            .map(|k| if k % 2 == 0 { -lo[f - 1 - k] } else { lo[f - 1 - k] })
            .collect()
    }

    pub fn rec_lo(&self) -> Vec<f64> {
        self.dec_lo().iter().rev().copied().collect()
    }

    pub fn rec_hi(&self) -> Vec<f64> {
        let mut hi = self.dec_hi();
        hi.reverse();
        hi
    }
}

impl std::str::FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Self::Haar),
            "sym5" => Ok(Self::Sym5),
            other => Err(Error::InvalidArgument(format!("unsupported wavelet {other:?}"))),
        }
    }
}
