//! Data-driven Gaussian-process ECG denoising.
//!
//! Beats are cut at RR midpoints, warped onto a shared phase grid, and the
//! phase-domain sample mean and variance serve as the prior of a per-beat
//! Bayesian filter. The crate also ships the pieces needed to evaluate it:
//! record I/O, baseline-wander removal, R-peak detection, a wavelet
//! shrinkage benchmark and an SNR sweep harness.

pub mod error;
pub mod eval;
pub mod gp;
pub mod io;
pub mod phase;
pub mod preprocessing;
pub mod rpeak;
pub mod wavelet;

pub use error::{Error, Result};
