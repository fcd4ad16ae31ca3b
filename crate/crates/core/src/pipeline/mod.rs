//! Measurement processing: trace ingestion, filtering, baseline estimation,
//! noise calibration and sweep-by-sweep detection.

mod baseline;
mod calibrate;
mod evaluate;
pub mod fir;
mod synth;
mod trace;

pub use baseline::{estimate_baseline, BaselineProfile, ChannelBaseline};
pub use calibrate::{calibrate_sigma, CalibrationResult};
pub use evaluate::{evaluate_trace, residual_windows, Evaluation, PointRatio, WindowDecision};
pub use fir::{default_taps, design_lowpass, filter_trace, fir_lowpass};
pub use synth::{generate_trace, NoiseModel, Segment, SynthConfig};
pub use trace::{
    format_trace, group_sweeps, parse_trace, read_trace, write_trace, RssRecord, Sweep, DEFAULT_SWEEP_PERIOD_S,
};

/// Default vacant-room sample count per channel (two minutes at 31.25 Hz).
pub const DEFAULT_BASELINE_SAMPLES: usize = 3750;
