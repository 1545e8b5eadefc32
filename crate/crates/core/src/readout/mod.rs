//! Single-shot readout: photon-count traces and threshold calibration, and the
//! quantum-jump measurement channel acting on two-point statistics.

pub mod channel;
pub mod trace;

pub use channel::{
    deviation, deviation_from_tpm, noisy_joint_distribution, total_variation_from_ideal, Deviation,
    JumpModel, MeasurementChannel, NoisyJoint,
};
pub use trace::{
    aggregate, calibrate, histogram, optimize_threshold, simulate_trace, simulate_traces,
    write_histogram_csv, Calibration, ThresholdFit, Trace, TraceModel,
};
