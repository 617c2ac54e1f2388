use std::path::Path;

use super::CalibrationError;
use crate::csvio::{fmt_f64, read_table, write_table, CsvError};
use crate::kinematics::{CartesianPoint, MotorAngles};

pub const MOCAP_HEADER: &str =
    "time_s,x_m,y_m,z_m,phi1_deg,phi2_deg,phi3_deg,pressure_psi,length_m";

/// One motion-capture frame with the actuator state logged alongside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MocapSample {
    pub time: f64,
    pub position: CartesianPoint<f64>,
    pub motor_angles: MotorAngles<f64>,
    pub pressure: f64,
    pub arm_length: f64,
}

pub fn parse_mocap_str(text: &str) -> Result<Vec<MocapSample>, CalibrationError> {
    let table = read_table(text, MOCAP_HEADER)?;
    let mut out: Vec<MocapSample> = Vec::with_capacity(table.rows.len());
    for (line, v) in table.rows {
        let sample = MocapSample {
            time: v[0],
            position: CartesianPoint::new(v[1], v[2], v[3]),
            motor_angles: MotorAngles::new(v[4], v[5], v[6]),
            pressure: v[7],
            arm_length: v[8],
        };
        if let Some(prev) = out.last() {
            if sample.time < prev.time {
                return Err(CsvError::Parse {
                    line,
                    message: format!("time {} goes backwards from {}", sample.time, prev.time),
                }
                .into());
            }
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn parse_mocap_csv(path: impl AsRef<Path>) -> Result<Vec<MocapSample>, CalibrationError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CalibrationError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mocap_str(&text)
}

pub fn write_mocap_csv(samples: &[MocapSample]) -> String {
    let rows = samples.iter().map(|s| {
        [
            s.time,
            s.position.x,
            s.position.y,
            s.position.z,
            s.motor_angles.phi[0],
            s.motor_angles.phi[1],
            s.motor_angles.phi[2],
            s.pressure,
            s.arm_length,
        ]
        .map(fmt_f64)
    });
    write_table(&[], MOCAP_HEADER, rows)
}
