//! Model verification from logged data: single-cable fits of the steering
//! coefficient and model-versus-measurement error fields for sweeps.

mod fit;
mod mocap;
mod sweep;

pub use fit::{
    estimate_k, group_by_condition, pressure_length_independence, FitResult, GroupFit,
    IndependenceReport, SampleGroup, DEFAULT_INDEPENDENCE_THRESHOLD,
};
pub use mocap::{parse_mocap_csv, parse_mocap_str, write_mocap_csv, MocapSample, MOCAP_HEADER};
pub use sweep::{dead_zone_below_seam, sweep_error_field, SweepErrorReport};

use thiserror::Error;

use crate::csvio::CsvError;
use crate::kinematics::KinematicsError;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("need at least two samples with distinct motor angles")]
    InsufficientData,
    #[error("sample {index} has more than one steering motor active")]
    MultiMotorData { index: usize },
    #[error("desired has {desired} poses, measured has {measured}")]
    LengthMismatch { desired: usize, measured: usize },
    #[error("sample {index}: {source}")]
    Kinematics {
        index: usize,
        #[source]
        source: KinematicsError,
    },
}
