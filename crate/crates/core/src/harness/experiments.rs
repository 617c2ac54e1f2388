//! Scripted studies: coefficient recovery from single-cable pulls, the
//! open-loop circular sweep, the feedforward step comparison, and the
//! workspace map.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde_json::json;

use super::config::Config;
use super::runlog::write_runlog;
use super::HarnessError;
use crate::calibration::{
    dead_zone_below_seam, estimate_k, group_by_condition, parse_mocap_str,
    pressure_length_independence, sweep_error_field, write_mocap_csv, FitResult,
    IndependenceReport, MocapSample, SweepErrorReport,
};
use crate::control::{
    row_for, run_closed_loop, settling_metrics, tick_count, ControllerState, RunLog, RunMetadata,
    Settling, SettlingMetrics,
};
use crate::csvio::{fmt_f64, write_table};
use crate::kinematics::{
    in_workspace, inverse_model, polar_to_cartesian, sector_of, CartesianPoint, Motor, MotorAngles,
    PolarPose, SteeringSector,
};
use crate::plant::{
    sag_compensating_command, step, MotorCommand, PlantConfig, PlantState, MAX_LENGTH,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentName {
    EstimateK,
    CircleSweep,
    StepCompare,
    WorkspaceMap,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 4] = [
        ExperimentName::EstimateK,
        ExperimentName::CircleSweep,
        ExperimentName::StepCompare,
        ExperimentName::WorkspaceMap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::EstimateK => "estimate-k",
            ExperimentName::CircleSweep => "circle-sweep",
            ExperimentName::StepCompare => "step-compare",
            ExperimentName::WorkspaceMap => "workspace-map",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                HarnessError::Validation(format!(
                    "unknown experiment {s:?}; expected one of estimate-k, circle-sweep, step-compare, workspace-map"
                ))
            })
    }
}

/// A file an experiment wants written, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub artifacts: Vec<Artifact>,
    /// Human-readable `key: value` lines.
    pub summary: Vec<(String, String)>,
}

/// Maps `f` over `items`, on `jobs` threads when `jobs > 1`. Output order
/// always follows input order.
fn map_ordered<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>, HarnessError>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if jobs <= 1 {
        return Ok(items.iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Validation(format!("--jobs {jobs}: {e}")))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}

fn metadata(config: &Config, experiment: &str) -> RunMetadata {
    RunMetadata {
        experiment: experiment.to_string(),
        seed: config.experiment.seed,
        config: config.snapshot(),
    }
}

fn settling_json(s: Settling<f64>) -> serde_json::Value {
    match s {
        Settling::At(t) => json!(t),
        Settling::NotSettled => json!("not-settled"),
    }
}

fn settling_text(s: Settling<f64>) -> String {
    match s {
        Settling::At(t) => format!("{t:.3} s"),
        Settling::NotSettled => "not settled".to_string(),
    }
}

// ---------------------------------------------------------------- estimate-k

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateKResult {
    /// Samples as re-read from the emitted CSV.
    pub samples: Vec<MocapSample>,
    pub csv: String,
    pub pooled: FitResult,
    pub independence: IndependenceReport,
}

/// Synthetic single-cable pull logs: one motor swept over random angles at
/// every (pressure, length) condition, with Gaussian pitch noise.
pub fn generate_single_cable_samples(config: &Config) -> Vec<MocapSample> {
    let e = &config.experiment;
    let motor = Motor::ALL[e.motor - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(e.seed);
    let noise = Normal::new(0.0, e.noise_sigma).expect("validated sigma");
    let conditions: Vec<(f64, f64)> = e
        .pressures
        .iter()
        .flat_map(|p| e.lengths.iter().map(move |l| (*p, *l)))
        .collect();
    let base = e.samples / conditions.len();
    let extra = e.samples % conditions.len();
    let dt = config.loop_settings.dt;

    let mut out = Vec::with_capacity(e.samples);
    for (ci, (pressure, length)) in conditions.into_iter().enumerate() {
        let mut plant = PlantConfig {
            pressure,
            ..config.plant
        };
        if !e.calibration_sag {
            plant = plant.without_sag();
        }
        let count = base + usize::from(ci < extra);
        for _ in 0..count {
            let phi = rng.gen_range(0.0..=e.max_motor_angle);
            let mut angles = MotorAngles::zero();
            angles.set(motor, phi);
            let state = PlantState::new(&plant, length, angles, 0.0);
            let seen = state.measured_pose;
            let alpha = seen.alpha + noise.sample(&mut rng);
            let pose = PolarPose::new(length, alpha, seen.theta);
            out.push(MocapSample {
                time: out.len() as f64 * dt,
                position: polar_to_cartesian(&pose),
                motor_angles: angles,
                pressure,
                arm_length: length,
            });
        }
    }
    out
}

pub fn experiment_estimate_k(config: &Config) -> Result<EstimateKResult, HarnessError> {
    let generated = generate_single_cable_samples(config);
    let csv = write_mocap_csv(&generated);
    let samples = parse_mocap_str(&csv).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let pooled = estimate_k(&samples).map_err(|e| HarnessError::Validation(e.to_string()))?;
    let groups = group_by_condition(&samples);
    let independence =
        pressure_length_independence(&groups, config.experiment.independence_threshold)
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
    Ok(EstimateKResult {
        samples,
        csv,
        pooled,
        independence,
    })
}

fn fit_json(f: &FitResult) -> serde_json::Value {
    json!({
        "k_hat": f.k_hat,
        "r_squared": f.r_squared,
        "residual_max_deg": f.residual_max,
        "n_samples": f.n_samples,
    })
}

fn estimate_k_output(config: &Config) -> Result<ExperimentOutput, HarnessError> {
    let r = experiment_estimate_k(config)?;
    let groups: Vec<_> = r
        .independence
        .groups
        .iter()
        .map(|g| json!({"pressure_psi": g.pressure, "length_m": g.length, "fit": fit_json(&g.fit)}))
        .collect();
    let summary_json = json!({
        "experiment": "estimate-k",
        "seed": config.experiment.seed,
        "k_true": config.plant.k_true.value(),
        "pooled": fit_json(&r.pooled),
        "groups": groups,
        "max_pairwise_difference": r.independence.max_pairwise_difference,
        "threshold": r.independence.threshold,
        "flagged": r.independence.flagged,
    });
    let mut summary = vec![
        ("k_hat".to_string(), format!("{:.6}", r.pooled.k_hat)),
        (
            "r_squared".to_string(),
            format!("{:.6}", r.pooled.r_squared),
        ),
        (
            "residual_max_deg".to_string(),
            format!("{:.4}", r.pooled.residual_max),
        ),
        ("n_samples".to_string(), r.pooled.n_samples.to_string()),
    ];
    for g in &r.independence.groups {
        summary.push((
            format!("k_hat[{} psi, {} m]", g.pressure, g.length),
            format!("{:.6}", g.fit.k_hat),
        ));
    }
    summary.push((
        "max_group_difference".to_string(),
        format!("{:.6}", r.independence.max_pairwise_difference),
    ));
    Ok(ExperimentOutput {
        artifacts: vec![
            Artifact {
                file_name: "estimate_k_mocap.csv".into(),
                contents: r.csv,
            },
            Artifact {
                file_name: "estimate_k_summary.json".into(),
                contents: pretty(&summary_json),
            },
        ],
        summary,
    })
}

// -------------------------------------------------------------- circle-sweep

#[derive(Debug, Clone, PartialEq)]
pub struct SweepLevel {
    pub alpha: f64,
    pub log: RunLog<f64>,
    pub report: SweepErrorReport,
    /// Arc below the seam that commands in S3 never reached, degrees.
    pub dead_zone: Option<f64>,
    /// Mean off-axis distance of the measured tip, meters.
    pub mean_lateral_radius: f64,
}

/// Open-loop circle at one pitch level: inverse-model commands around the
/// full rotation, with the plant's measured poses recorded every tick.
pub fn sweep_level(config: &Config, alpha: f64) -> Result<SweepLevel, HarnessError> {
    let plant = config.plant;
    let k = config.model_k();
    let dt = config.loop_settings.dt;
    let length = config.experiment.sweep_length;
    let n = tick_count(config.experiment.sweep_period, dt);

    let command_at = |theta: f64| -> Result<MotorCommand<f64>, HarnessError> {
        let mu_phi =
            inverse_model(alpha, theta, k).map_err(|e| HarnessError::Validation(e.to_string()))?;
        Ok(MotorCommand {
            mu_r: length,
            mu_phi,
        })
    };

    let mut state = PlantState::new(&plant, length, command_at(0.0)?.mu_phi, 0.0);
    let mut log = RunLog::new(dt, state.time, state.measured_pose);
    log.metadata = metadata(config, &format!("circle-sweep/alpha={}", fmt_f64(alpha)));
    let mut desired = Vec::with_capacity(n);
    let mut measured = Vec::with_capacity(n);
    let mut lateral = 0.0;
    for i in 0..n {
        let theta = 360.0 * i as f64 / n as f64;
        let cmd = command_at(theta)?;
        state = step(&state, &cmd, dt, &plant);
        let want = PolarPose::new(length, alpha, theta);
        let row = row_for(&state, want, cmd, in_workspace(&want));
        let p = polar_to_cartesian(&state.measured_pose);
        lateral += p.y.hypot(p.z);
        desired.push(want);
        measured.push(state.measured_pose);
        log.rows.push(row);
    }
    let report = sweep_error_field(&desired, &measured)
        .map_err(|e| HarnessError::Validation(e.to_string()))?;
    let dead_zone = dead_zone_below_seam(&desired, &measured);
    Ok(SweepLevel {
        alpha,
        log,
        report,
        dead_zone,
        mean_lateral_radius: lateral / n as f64,
    })
}

pub fn experiment_circle_sweep(
    config: &Config,
    jobs: usize,
) -> Result<Vec<SweepLevel>, HarnessError> {
    map_ordered(&config.experiment.alpha_levels, jobs, |a| {
        sweep_level(config, *a)
    })?
    .into_iter()
    .collect()
}

const SWEEP_POINTS_HEADER: &str = "alpha_cmd_deg,theta_cmd_deg,x_m,y_m,z_m";

fn circle_sweep_output(config: &Config, jobs: usize) -> Result<ExperimentOutput, HarnessError> {
    let levels = experiment_circle_sweep(config, jobs)?;
    let mut artifacts = Vec::new();
    let mut summary = Vec::new();
    let mut level_json = Vec::new();
    let mut points = Vec::new();
    for (i, lv) in levels.iter().enumerate() {
        artifacts.push(Artifact {
            file_name: format!("circle_sweep_level{}.csv", i + 1),
            contents: write_runlog(&lv.log),
        });
        for row in &lv.log.rows {
            let p = polar_to_cartesian(&row.measured);
            points.push([row.desired.alpha, row.desired.theta, p.x, p.y, p.z].map(fmt_f64));
        }
        level_json.push(json!({
            "alpha_cmd_deg": lv.alpha,
            "mean_theta_bias_deg": lv.report.mean_theta_bias,
            "mean_abs_theta_error_deg": lv.report.mean_abs_theta,
            "mean_abs_alpha_error_deg": lv.report.mean_abs_alpha,
            "max_abs_theta_error_deg": lv.report.max_abs_theta,
            "dead_zone_below_seam_deg": lv.dead_zone,
            "mean_lateral_radius_m": lv.mean_lateral_radius,
        }));
        let dz = lv
            .dead_zone
            .map_or("none".to_string(), |w| format!("{:.2} deg below 360", w));
        summary.push((
            format!("alpha={}", fmt_f64(lv.alpha)),
            format!(
                "mean|e_theta|={:.3} deg, mean|e_alpha|={:.3} deg, dead zone: {dz}",
                lv.report.mean_abs_theta, lv.report.mean_abs_alpha
            ),
        ));
    }
    artifacts.push(Artifact {
        file_name: "circle_sweep_points.csv".into(),
        contents: write_table(&[], SWEEP_POINTS_HEADER, points),
    });
    artifacts.push(Artifact {
        file_name: "circle_sweep_summary.json".into(),
        contents: pretty(&json!({
            "experiment": "circle-sweep",
            "gravity_sag_mag_deg": config.plant.gravity_sag_mag,
            "gravity_sag_dir_deg": config.plant.gravity_sag_dir,
            "levels": level_json,
        })),
    });
    Ok(ExperimentOutput { artifacts, summary })
}

// -------------------------------------------------------------- step-compare

#[derive(Debug, Clone, PartialEq)]
pub struct StepCompare {
    pub feedforward: RunLog<f64>,
    pub plain: RunLog<f64>,
    pub feedforward_metrics: SettlingMetrics<f64>,
    pub plain_metrics: SettlingMetrics<f64>,
}

impl StepCompare {
    pub fn feedforward_settles_faster(&self) -> bool {
        self.feedforward_metrics
            .settling
            .faster_than(self.plain_metrics.settling)
    }

    pub fn feedforward_lower_sse(&self) -> bool {
        self.feedforward_metrics.steady_state_error.steering()
            < self.plain_metrics.steady_state_error.steering()
    }
}

/// Slack arm at the configured initial length.
pub fn default_start(config: &Config) -> PlantState<f64> {
    PlantState::at_rest(&config.plant, config.loop_settings.initial_length)
}

/// Closed-loop step from `start` toward `target` with the configured gains.
pub fn run_step(
    config: &Config,
    start: PlantState<f64>,
    target: PolarPose<f64>,
    feedforward: bool,
    label: &str,
) -> Result<RunLog<f64>, HarnessError> {
    let mut ctrl = ControllerState::new(config.gains, feedforward);
    ctrl.set_target_pose(target)
        .map_err(|e| HarnessError::Validation(format!("target: {e}")))?;
    let mut log = run_closed_loop(
        start,
        &mut ctrl,
        &config.plant,
        config.model_k(),
        config.loop_settings.duration,
        config.loop_settings.dt,
    );
    log.metadata = metadata(config, label);
    Ok(log)
}

pub fn compare_from(
    config: &Config,
    start: PlantState<f64>,
    target: PolarPose<f64>,
) -> Result<StepCompare, HarnessError> {
    let feedforward = run_step(config, start, target, true, "step-compare/feedforward")?;
    let plain = run_step(config, start, target, false, "step-compare/no-feedforward")?;
    let band = config.loop_settings.settle_band;
    let m = |log: &RunLog<f64>| {
        settling_metrics(log, band).map_err(|e| HarnessError::Validation(e.to_string()))
    };
    Ok(StepCompare {
        feedforward_metrics: m(&feedforward)?,
        plain_metrics: m(&plain)?,
        feedforward,
        plain,
    })
}

/// Feedforward and plain PID runs from the default start to the configured target.
pub fn experiment_step_compare(config: &Config) -> Result<StepCompare, HarnessError> {
    compare_from(
        config,
        default_start(config),
        config.experiment.target.pose(),
    )
}

/// Plant holding the tip level on the 0/360 seam at pitch `hold_alpha`,
/// with the upper motor carrying the gravity load.
pub fn seam_hold_state(config: &Config, length: f64, hold_alpha: f64) -> Option<PlantState<f64>> {
    let angles = sag_compensating_command(hold_alpha, 0.0, &config.plant)?;
    Some(PlantState::new(&config.plant, length, angles, 0.0))
}

fn metrics_json(m: &SettlingMetrics<f64>) -> serde_json::Value {
    json!({
        "settling_time_s": settling_json(m.settling),
        "sse_R_m": m.steady_state_error.r,
        "sse_alpha_deg": m.steady_state_error.alpha,
        "sse_theta_deg": m.steady_state_error.theta,
    })
}

fn step_compare_output(config: &Config) -> Result<ExperimentOutput, HarnessError> {
    let r = experiment_step_compare(config)?;
    let t = config.experiment.target;
    let summary_json = json!({
        "experiment": "step-compare",
        "target": {"r": t.r, "alpha": t.alpha, "theta": t.theta},
        "settle_band": config.loop_settings.settle_band,
        "feedforward": metrics_json(&r.feedforward_metrics),
        "no_feedforward": metrics_json(&r.plain_metrics),
        "feedforward_settles_faster": r.feedforward_settles_faster(),
        "feedforward_lower_sse": r.feedforward_lower_sse(),
    });
    let row = |m: &SettlingMetrics<f64>| {
        format!(
            "settling {}, sse alpha {:.4} deg, theta {:.4} deg, R {:.5} m",
            settling_text(m.settling),
            m.steady_state_error.alpha,
            m.steady_state_error.theta,
            m.steady_state_error.r
        )
    };
    let summary = vec![
        ("feedforward".to_string(), row(&r.feedforward_metrics)),
        ("no feedforward".to_string(), row(&r.plain_metrics)),
        (
            "feedforward faster".to_string(),
            r.feedforward_settles_faster().to_string(),
        ),
        (
            "feedforward lower sse".to_string(),
            r.feedforward_lower_sse().to_string(),
        ),
    ];
    Ok(ExperimentOutput {
        artifacts: vec![
            Artifact {
                file_name: "step_compare_ff.csv".into(),
                contents: write_runlog(&r.feedforward),
            },
            Artifact {
                file_name: "step_compare_noff.csv".into(),
                contents: write_runlog(&r.plain),
            },
            Artifact {
                file_name: "step_compare_summary.json".into(),
                contents: pretty(&summary_json),
            },
        ],
        summary,
    })
}

// ------------------------------------------------------------- workspace-map

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkspaceCell {
    pub pose: PolarPose<f64>,
    pub point: CartesianPoint<f64>,
    pub in_workspace: bool,
    /// Some command on the two motors of the pose's sector holds the
    /// plant at this pose, gravity sag included.
    pub reachable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceMap {
    pub cells: Vec<WorkspaceCell>,
    /// Per positive pitch level, width of the contiguous unreachable run of
    /// rotation cells ending at the seam, degrees.
    pub dead_zones: Vec<(f64, f64)>,
}

fn grid(step: f64, max: f64, include_max: bool) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    if !include_max {
        v.retain(|x| *x < max - 1e-9);
    }
    v
}

pub fn workspace_cell(plant: &PlantConfig<f64>, pose: PolarPose<f64>) -> WorkspaceCell {
    let reachable = pose.r >= 0.0
        && pose.r <= MAX_LENGTH
        && sag_compensating_command(pose.alpha, pose.theta, plant).is_some();
    WorkspaceCell {
        pose,
        point: polar_to_cartesian(&pose),
        in_workspace: in_workspace(&pose),
        reachable,
    }
}

pub fn experiment_workspace_map(
    config: &Config,
    jobs: usize,
) -> Result<WorkspaceMap, HarnessError> {
    let e = &config.experiment;
    let rs: Vec<f64> = grid(e.r_step, e.r_max, true)
        .into_iter()
        .filter(|r| *r > 0.0)
        .collect();
    let alphas = grid(e.alpha_step, e.alpha_max, true);
    let thetas = grid(e.theta_step, 360.0, false);
    let mut poses = Vec::with_capacity(rs.len() * alphas.len() * thetas.len());
    for &r in &rs {
        for &a in &alphas {
            for &t in &thetas {
                poses.push(PolarPose::new(r, a, t));
            }
        }
    }
    let plant = config.plant;
    let cells = map_ordered(&poses, jobs, |p| workspace_cell(&plant, *p))?;

    let mut dead_zones = Vec::new();
    for &a in alphas.iter().filter(|a| **a > 0.0) {
        let mut width = 0.0;
        for &t in thetas.iter().rev() {
            if sector_of(t) != SteeringSector::S3 {
                break;
            }
            let cell = workspace_cell(&plant, PolarPose::new(1.0, a, t));
            if cell.reachable {
                break;
            }
            width = 360.0 - t;
        }
        dead_zones.push((a, width));
    }
    Ok(WorkspaceMap { cells, dead_zones })
}

const WORKSPACE_HEADER: &str = "r_m,alpha_deg,theta_deg,x_m,y_m,z_m,in_workspace,reachable";

fn workspace_output(config: &Config, jobs: usize) -> Result<ExperimentOutput, HarnessError> {
    let map = experiment_workspace_map(config, jobs)?;
    let rows = map.cells.iter().map(|c| {
        vec![
            fmt_f64(c.pose.r),
            fmt_f64(c.pose.alpha),
            fmt_f64(c.pose.theta),
            fmt_f64(c.point.x),
            fmt_f64(c.point.y),
            fmt_f64(c.point.z),
            u8::from(c.in_workspace).to_string(),
            u8::from(c.reachable).to_string(),
        ]
    });
    let csv = write_table(&[], WORKSPACE_HEADER, rows);
    let inside = map.cells.iter().filter(|c| c.in_workspace).count();
    let reach = map
        .cells
        .iter()
        .filter(|c| c.in_workspace && c.reachable)
        .count();
    let dz: Vec<_> = map
        .dead_zones
        .iter()
        .map(|(a, w)| json!({"alpha_deg": a, "dead_zone_below_seam_deg": w}))
        .collect();
    let summary_json = json!({
        "experiment": "workspace-map",
        "cells": map.cells.len(),
        "in_workspace": inside,
        "in_workspace_and_reachable": reach,
        "dead_zones": dz,
    });
    let mut summary = vec![
        ("cells".to_string(), map.cells.len().to_string()),
        ("in workspace".to_string(), inside.to_string()),
        ("in workspace and reachable".to_string(), reach.to_string()),
    ];
    for (a, w) in &map.dead_zones {
        if *w > 0.0 {
            summary.push((
                format!("dead zone at alpha={a}"),
                format!("{w} deg below 360"),
            ));
        }
    }
    Ok(ExperimentOutput {
        artifacts: vec![
            Artifact {
                file_name: "workspace_map.csv".into(),
                contents: csv,
            },
            Artifact {
                file_name: "workspace_map_summary.json".into(),
                contents: pretty(&summary_json),
            },
        ],
        summary,
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// Runs one experiment and returns the files it produced.
pub fn run_experiment(
    name: ExperimentName,
    config: &Config,
    jobs: usize,
) -> Result<ExperimentOutput, HarnessError> {
    match name {
        ExperimentName::EstimateK => estimate_k_output(config),
        ExperimentName::CircleSweep => circle_sweep_output(config, jobs),
        ExperimentName::StepCompare => step_compare_output(config),
        ExperimentName::WorkspaceMap => workspace_output(config, jobs),
    }
}
