//! SNR evaluation: noise injection, metrics, synthetic records and the
//! level-sweep experiment.

pub mod experiment;
pub mod noise;
pub mod synth;

pub use experiment::{run_experiment, ExperimentConfig, Method, SnrResult};
pub use noise::{add_white_noise, snr};
pub use synth::{synthesize_ecg, GaussianWave, SynthSpec, SynthTruth};
