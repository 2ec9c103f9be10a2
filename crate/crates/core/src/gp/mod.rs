//! Phase-domain Gaussian-process beat filtering.
//!
//! Beats are warped onto a common phase grid, where their sample mean and
//! (co)variance define a Gaussian prior. Mapped back to each beat's own time
//! grid this prior yields a posterior mean per beat. The diagonal filter
//! needs only gather/scatter passes and runs in time linear in the record
//! length; the full-covariance filter is kept for short beats and checks.

pub mod diagonal;
pub mod full;
pub mod model;
pub mod record;

pub use diagonal::{filter_beat_diagonal, BeatPosterior};
pub use full::{filter_beat_full, FullOptions, PhaseNoise};
pub use model::{estimate_noise_variance, fit_phase_model, PhaseGpModel};
pub use record::{filter_record, filter_signal, Diagnostics, FilterKind, FilterOptions, FilteredLead};
