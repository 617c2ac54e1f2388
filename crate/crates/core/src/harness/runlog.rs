//! RunLog CSV: `# key=value` metadata lines, the fixed header, one row per tick.

use crate::control::{ControlError, RunFlags, RunLog, RunMetadata, RunRow};
use crate::csvio::{fmt_f64, read_table, write_table, CsvError};
use crate::kinematics::{MotorAngles, PolarPose};
use crate::plant::MotorCommand;

pub const RUNLOG_HEADER: &str = "time_s,R_des_m,alpha_des_deg,theta_des_deg,R_real_m,alpha_real_deg,theta_real_deg,mu_R_m,mu_phi1_deg,mu_phi2_deg,mu_phi3_deg,phi1_deg,phi2_deg,phi3_deg,e_R_m,e_alpha_deg,e_theta_deg,flags";

pub fn write_runlog(log: &RunLog<f64>) -> String {
    let comments = vec![
        format!("experiment={}", log.metadata.experiment),
        format!("seed={}", log.metadata.seed),
        format!("dt={}", fmt_f64(log.dt)),
        format!("start_time={}", fmt_f64(log.start_time)),
        format!(
            "initial={},{},{}",
            fmt_f64(log.initial.r),
            fmt_f64(log.initial.alpha),
            fmt_f64(log.initial.theta)
        ),
        format!("config={}", log.metadata.config),
    ];
    let rows = log.rows.iter().map(|r| {
        let mut v: Vec<String> = [
            r.time,
            r.desired.r,
            r.desired.alpha,
            r.desired.theta,
            r.measured.r,
            r.measured.alpha,
            r.measured.theta,
            r.command.mu_r,
            r.command.mu_phi.phi[0],
            r.command.mu_phi.phi[1],
            r.command.mu_phi.phi[2],
            r.phi.phi[0],
            r.phi.phi[1],
            r.phi.phi[2],
            r.error.e_r,
            r.error.e_alpha,
            r.error.e_theta,
        ]
        .into_iter()
        .map(fmt_f64)
        .collect();
        v.push(r.flags.0.to_string());
        v
    });
    write_table(&comments, RUNLOG_HEADER, rows)
}

fn meta_err(message: String) -> CsvError {
    CsvError::Parse { line: 0, message }
}

fn number(key: &str, value: &str) -> Result<f64, CsvError> {
    value
        .parse()
        .map_err(|_| meta_err(format!("metadata {key}: not a number {value:?}")))
}

pub fn parse_runlog(text: &str) -> Result<RunLog<f64>, CsvError> {
    let table = read_table(text, RUNLOG_HEADER)?;
    let mut meta = RunMetadata::default();
    let mut dt = 0.0;
    let mut start_time = 0.0;
    let mut initial = PolarPose::default();
    for c in &table.comments {
        let Some((key, value)) = c.split_once('=') else {
            continue;
        };
        match key {
            "experiment" => meta.experiment = value.to_string(),
            "seed" => {
                meta.seed = value
                    .parse()
                    .map_err(|_| meta_err(format!("metadata seed: {value:?}")))?
            }
            "dt" => dt = number(key, value)?,
            "start_time" => start_time = number(key, value)?,
            "initial" => {
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(meta_err(format!("metadata initial: {value:?}")));
                }
                initial = PolarPose {
                    r: number(key, parts[0])?,
                    alpha: number(key, parts[1])?,
                    theta: number(key, parts[2])?,
                };
            }
            "config" => meta.config = value.to_string(),
            _ => {}
        }
    }
    let mut rows = Vec::with_capacity(table.rows.len());
    for (line, v) in table.rows {
        let flags = v[17];
        if flags < 0.0 || flags.fract() != 0.0 || flags > u32::MAX as f64 {
            return Err(CsvError::Parse {
                line,
                message: format!("flags must be a non-negative integer, got {flags}"),
            });
        }
        rows.push(RunRow {
            time: v[0],
            desired: PolarPose {
                r: v[1],
                alpha: v[2],
                theta: v[3],
            },
            measured: PolarPose {
                r: v[4],
                alpha: v[5],
                theta: v[6],
            },
            command: MotorCommand {
                mu_r: v[7],
                mu_phi: MotorAngles::new(v[8], v[9], v[10]),
            },
            phi: MotorAngles::new(v[11], v[12], v[13]),
            error: ControlError {
                e_r: v[14],
                e_alpha: v[15],
                e_theta: v[16],
            },
            flags: RunFlags(flags as u32),
        });
    }
    Ok(RunLog {
        metadata: meta,
        dt,
        start_time,
        initial,
        rows,
    })
}
