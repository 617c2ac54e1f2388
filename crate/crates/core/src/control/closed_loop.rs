use super::{ControlError, ControllerState};
use crate::kinematics::{ModelCoefficient, MotorAngles, PolarPose};
use crate::plant::{step, MotorCommand, PlantConfig, PlantState};
use crate::scalar::Scalar;

/// Bit flags recorded per log row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct RunFlags(pub u32);

impl RunFlags {
    pub const CLAMPED: u32 = 1;
    pub const BUCKLED: u32 = 2;
    pub const THETA_UNDEFINED: u32 = 4;
    pub const TARGET_OUTSIDE_WORKSPACE: u32 = 8;

    pub fn has(self, bit: u32) -> bool {
        self.0 & bit != 0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetadata {
    pub experiment: String,
    pub seed: u64,
    /// Configuration the run was produced from, as JSON.
    pub config: String,
}

/// One control tick: the command issued and the plant state it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRow<T> {
    pub time: T,
    pub desired: PolarPose<T>,
    pub measured: PolarPose<T>,
    pub command: MotorCommand<T>,
    pub phi: MotorAngles<T>,
    /// `desired - measured` for this row's measured pose.
    pub error: ControlError<T>,
    pub flags: RunFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog<T> {
    pub metadata: RunMetadata,
    pub dt: T,
    pub start_time: T,
    /// Measured pose before the first tick.
    pub initial: PolarPose<T>,
    pub rows: Vec<RunRow<T>>,
}

impl<T: Scalar> RunLog<T> {
    pub fn new(dt: T, start_time: T, initial: PolarPose<T>) -> Self {
        RunLog {
            metadata: RunMetadata::default(),
            dt,
            start_time,
            initial,
            rows: Vec::new(),
        }
    }

    pub fn final_row(&self) -> Option<&RunRow<T>> {
        self.rows.last()
    }
}

/// Log row for the state just reached under `command`.
pub fn row_for<T: Scalar>(
    state: &PlantState<T>,
    desired: PolarPose<T>,
    command: MotorCommand<T>,
    target_in_workspace: bool,
) -> RunRow<T> {
    let mut flags = 0;
    if state.clamped {
        flags |= RunFlags::CLAMPED;
    }
    if state.buckled {
        flags |= RunFlags::BUCKLED;
    }
    if !state.theta_defined {
        flags |= RunFlags::THETA_UNDEFINED;
    }
    if !target_in_workspace {
        flags |= RunFlags::TARGET_OUTSIDE_WORKSPACE;
    }
    RunRow {
        time: state.time,
        desired,
        measured: state.measured_pose,
        command,
        phi: state.motor_angles,
        error: ControlError::between(&desired, &state.measured_pose),
        flags: RunFlags(flags),
    }
}

/// Number of fixed steps of `dt` that fit in `duration`, at least one.
pub fn tick_count<T: Scalar>(duration: T, dt: T) -> usize {
    let n = (duration / dt + T::lit(1e-9))
        .floor()
        .to_usize()
        .unwrap_or(0);
    n.max(1)
}

/// Alternates controller ticks and plant steps at a fixed `dt`. The
/// controller's model uses `model_k`, which need not match the plant.
///
/// # Panics
///
/// If `dt` is outside the plant's accepted range.
pub fn run_closed_loop<T: Scalar>(
    plant: PlantState<T>,
    ctrl: &mut ControllerState<T>,
    config: &PlantConfig<T>,
    model_k: ModelCoefficient<T>,
    duration: T,
    dt: T,
) -> RunLog<T> {
    let n = tick_count(duration, dt);
    let mut log = RunLog::new(dt, plant.time, plant.measured_pose);
    log.rows.reserve(n);
    let mut state = plant;
    for _ in 0..n {
        let out = ctrl.compute_command(&state.measured_pose, model_k);
        state = step(&state, &out.command, dt, config);
        log.rows.push(row_for(
            &state,
            ctrl.desired(),
            out.command,
            ctrl.target_in_workspace(),
        ));
    }
    log
}
