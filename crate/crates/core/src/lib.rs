//! Kinematic model, feedforward position control and plant simulation for
//! a cable-steered everting (soft-growing) arm.
//!
//! The core math is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the calibration and harness layers
//! use.

pub mod calibration;
pub mod control;
pub mod csvio;
pub mod harness;
pub mod kinematics;
pub mod plant;
pub mod scalar;

pub use scalar::Scalar;

pub type PolarPose = kinematics::PolarPose<f64>;
pub type CartesianPoint = kinematics::CartesianPoint<f64>;
pub type MotorAngles = kinematics::MotorAngles<f64>;
pub type ModelCoefficient = kinematics::ModelCoefficient<f64>;
pub type SteeringAngles = kinematics::SteeringAngles<f64>;
pub type PlantConfig = plant::PlantConfig<f64>;
pub type PlantState = plant::PlantState<f64>;
pub type MotorCommand = plant::MotorCommand<f64>;
pub type PidGains = control::PidGains<f64>;
pub type ControlGains = control::ControlGains<f64>;
pub type ControllerState = control::ControllerState<f64>;
pub type RunLog = control::RunLog<f64>;
pub type RunRow = control::RunRow<f64>;

pub use kinematics::{Motor, SteeringSector};
