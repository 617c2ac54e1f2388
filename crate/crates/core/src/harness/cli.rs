use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{Config, CONFIG_ENV};
use super::experiments::{
    default_start, run_experiment, run_step, seam_hold_state, workspace_cell, Artifact,
    ExperimentName,
};
use super::runlog::write_runlog;
use super::HarnessError;
use crate::calibration::{
    estimate_k, group_by_condition, parse_mocap_csv, pressure_length_independence,
    CalibrationError, DEFAULT_INDEPENDENCE_THRESHOLD,
};
use crate::control::{settling_metrics, Settling};
use crate::kinematics::{
    cartesian_to_polar, forward_model, inverse_model, CartesianPoint, ModelCoefficient,
    MotorAngles, PolarPose,
};

#[derive(Debug, Parser)]
#[command(
    name = "everkin",
    version,
    about = "Soft growing arm kinematics, simulation and calibration"
)]
struct Cli {
    /// JSON configuration file. Falls back to $EVERKIN_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Runs the steering controller without the inverse-model feedforward.
    #[arg(long, global = true)]
    no_feedforward: bool,
    /// Overrides the plant's gravity sag magnitude, degrees; 0 disables it.
    #[arg(long, global = true, value_name = "DEG")]
    sag: Option<f64>,
    /// Prints a metrics table after a run.
    #[arg(long, global = true)]
    summary: bool,
    /// Worker threads for grid and sweep experiments.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Motor angles to steering angles.
    Fk {
        #[arg(long, num_args = 3, value_names = ["PHI1", "PHI2", "PHI3"], allow_negative_numbers = true)]
        phi: Vec<f64>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Steering angles to motor angles.
    Ik {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Workspace and reachability check for one pose or point.
    Workspace(WorkspaceArgs),
    /// One closed-loop run, written to sim.csv.
    Sim {
        #[arg(long, num_args = 3, value_names = ["R", "ALPHA", "THETA"], allow_negative_numbers = true)]
        target: Option<Vec<f64>>,
        /// Starts from the tip held on the seam at this pitch.
        #[arg(long)]
        hold_seam: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Runs a scripted experiment.
    Experiment {
        /// estimate-k, circle-sweep, step-compare or workspace-map.
        name: String,
    },
    /// Fits the steering coefficient to a mocap CSV.
    Calibrate {
        csv: PathBuf,
        #[arg(long, default_value_t = DEFAULT_INDEPENDENCE_THRESHOLD)]
        threshold: f64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct WorkspaceArgs {
    #[arg(long, num_args = 3, value_names = ["R", "ALPHA", "THETA"], allow_negative_numbers = true)]
    pose: Option<Vec<f64>>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    point: Option<Vec<f64>>,
}

/// Fixed nine-decimal rendering with trailing zeros trimmed.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn kin(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Validation(e.to_string())
}

fn load_config(cli: &Cli) -> Result<Config, HarnessError> {
    let path = cli.config.clone().or_else(|| {
        std::env::var_os(CONFIG_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    let mut config = match path {
        Some(p) => Config::load(&p)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        config.experiment.seed = seed;
    }
    if cli.no_feedforward {
        config.loop_settings.feedforward = false;
    }
    if let Some(mag) = cli.sag {
        config.plant.gravity_sag_mag = mag;
    }
    config.validate()?;
    Ok(config)
}

fn coefficient(k: Option<f64>, config: &Config) -> Result<ModelCoefficient<f64>, HarnessError> {
    match k {
        Some(k) => ModelCoefficient::new(k).map_err(kin),
        None => Ok(config.model_k()),
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.file_name);
            fs::write(&path, &a.contents)
                .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

fn print_table(rows: &[(String, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        println!("{k:<width$}  {v}");
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let config = load_config(&cli)?;
    match &cli.command {
        Command::Fk { phi, k } => {
            let k = coefficient(*k, &config)?;
            let angles = MotorAngles::new(phi[0], phi[1], phi[2]);
            let s = forward_model(&angles, k).map_err(kin)?;
            if s.theta_defined {
                println!("alpha={} theta={}", fmt_num(s.alpha), fmt_num(s.theta));
            } else {
                println!(
                    "alpha={} theta={} theta_undefined",
                    fmt_num(s.alpha),
                    fmt_num(s.theta)
                );
            }
        }
        Command::Ik { alpha, theta, k } => {
            let k = coefficient(*k, &config)?;
            let m = inverse_model(*alpha, *theta, k).map_err(kin)?;
            println!(
                "phi={} {} {}",
                fmt_num(m.phi[0]),
                fmt_num(m.phi[1]),
                fmt_num(m.phi[2])
            );
        }
        Command::Workspace(args) => {
            let pose = match (&args.pose, &args.point) {
                (Some(p), _) => {
                    let pose = PolarPose::new(p[0], p[1], p[2]);
                    pose.validate().map_err(kin)?;
                    pose
                }
                (None, Some(p)) => {
                    cartesian_to_polar(&CartesianPoint::new(p[0], p[1], p[2])).map_err(kin)?
                }
                (None, None) => unreachable!("clap requires one of --pose or --point"),
            };
            let cell = workspace_cell(&config.plant, pose);
            println!(
                "r={} alpha={} theta={} in_workspace={} reachable={}",
                fmt_num(pose.r),
                fmt_num(pose.alpha),
                fmt_num(pose.theta),
                cell.in_workspace,
                cell.reachable
            );
        }
        Command::Sim {
            target,
            hold_seam,
            duration,
        } => {
            let mut config = config.clone();
            if let Some(d) = duration {
                config.loop_settings.duration = *d;
                config.validate()?;
            }
            let target = match target {
                Some(t) => PolarPose::new(t[0], t[1], t[2]),
                None => config.experiment.target.pose(),
            };
            let start = match hold_seam {
                Some(a) => seam_hold_state(&config, target.r, *a).ok_or_else(|| {
                    HarnessError::Validation(format!(
                        "--hold-seam {a}: pose not reachable under sag"
                    ))
                })?,
                None => default_start(&config),
            };
            let log = run_step(
                &config,
                start,
                target,
                config.loop_settings.feedforward,
                "sim",
            )?;
            let paths = write_artifacts(
                &cli.out,
                &[Artifact {
                    file_name: "sim.csv".into(),
                    contents: write_runlog(&log),
                }],
            )?;
            for p in paths {
                println!("wrote {}", p.display());
            }
            if cli.summary {
                let m = settling_metrics(&log, config.loop_settings.settle_band).map_err(kin)?;
                let last = log.rows.last().expect("at least one tick").measured;
                let settling = match m.settling {
                    Settling::At(t) => format!("{t:.3} s"),
                    Settling::NotSettled => "not settled".into(),
                };
                print_table(&[
                    (
                        "feedforward".into(),
                        config.loop_settings.feedforward.to_string(),
                    ),
                    ("settling".into(), settling),
                    ("sse R m".into(), format!("{:.6}", m.steady_state_error.r)),
                    (
                        "sse alpha deg".into(),
                        format!("{:.6}", m.steady_state_error.alpha),
                    ),
                    (
                        "sse theta deg".into(),
                        format!("{:.6}", m.steady_state_error.theta),
                    ),
                    (
                        "final pose".into(),
                        format!(
                            "{} {} {}",
                            fmt_num(last.r),
                            fmt_num(last.alpha),
                            fmt_num(last.theta)
                        ),
                    ),
                ]);
            }
        }
        Command::Experiment { name } => {
            let name: ExperimentName = name.parse()?;
            let out = run_experiment(name, &config, cli.jobs.max(1))?;
            for p in write_artifacts(&cli.out, &out.artifacts)? {
                println!("wrote {}", p.display());
            }
            if cli.summary {
                print_table(&out.summary);
            }
        }
        Command::Calibrate { csv, threshold } => {
            let samples = parse_mocap_csv(csv).map_err(|e| match e {
                CalibrationError::Io { .. } => HarnessError::Io(e.to_string()),
                other => HarnessError::Validation(other.to_string()),
            })?;
            let fit = estimate_k(&samples).map_err(kin)?;
            println!(
                "k_hat={} r_squared={} residual_max={} n={}",
                fmt_num(fit.k_hat),
                fmt_num(fit.r_squared),
                fmt_num(fit.residual_max),
                fit.n_samples
            );
            let groups = group_by_condition(&samples);
            if groups.len() > 1 {
                let report = pressure_length_independence(&groups, *threshold).map_err(kin)?;
                for g in &report.groups {
                    println!(
                        "pressure={} length={} k_hat={} n={}",
                        fmt_num(g.pressure),
                        fmt_num(g.length),
                        fmt_num(g.fit.k_hat),
                        g.fit.n_samples
                    );
                }
                println!(
                    "max_difference={} flagged={}",
                    fmt_num(report.max_pairwise_difference),
                    report.flagged
                );
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status.
pub fn cli_main<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
