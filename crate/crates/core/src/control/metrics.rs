use thiserror::Error;

use super::RunLog;
use crate::scalar::{wrap_deg, Scalar};

pub const DEFAULT_BAND: f64 = 0.05;

/// Absolute tolerance floor, so axes with no commanded change still settle
/// when they sit at the target to rounding.
const BAND_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("run log has no rows")]
    EmptyLog,
    #[error("settling band must lie in (0, 1), got {0}")]
    InvalidBand(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisErrors<T> {
    pub r: T,
    pub alpha: T,
    pub theta: T,
}

impl<T: Scalar> AxisErrors<T> {
    /// Combined pitch and rotation error, degrees.
    pub fn steering(&self) -> T {
        self.alpha + self.theta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Settling<T> {
    /// Seconds from the start of the run.
    At(T),
    NotSettled,
}

impl<T: Scalar> Settling<T> {
    pub fn time(self) -> Option<T> {
        match self {
            Settling::At(t) => Some(t),
            Settling::NotSettled => None,
        }
    }

    /// Strict comparison with `NotSettled` ranked after every finite time.
    pub fn faster_than(self, other: Settling<T>) -> bool {
        match (self, other) {
            (Settling::At(a), Settling::At(b)) => a < b,
            (Settling::At(_), Settling::NotSettled) => true,
            (Settling::NotSettled, _) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettlingMetrics<T> {
    pub settling: Settling<T>,
    /// Mean absolute error over the last 10% of rows.
    pub steady_state_error: AxisErrors<T>,
}

/// Settling time and steady-state error of a run.
///
/// Each axis must stay within `band` times its commanded change (desired
/// minus the pre-run measurement) of the desired value. Rotation is
/// ignored when the desired pitch is zero. The run is `NotSettled` if the
/// final row is outside the band.
pub fn settling_metrics<T: Scalar>(
    log: &RunLog<T>,
    band: T,
) -> Result<SettlingMetrics<T>, MetricsError> {
    if log.rows.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    if !(band > T::zero() && band < T::one()) {
        return Err(MetricsError::InvalidBand(band.as_f64()));
    }
    let desired = log.rows[0].desired;
    let floor = T::lit(BAND_FLOOR);
    let tol_r = (band * (desired.r - log.initial.r).abs()).max(floor);
    let tol_a = (band * (desired.alpha - log.initial.alpha).abs()).max(floor);
    let tol_t = (band * wrap_deg(desired.theta - log.initial.theta).abs()).max(floor);
    let check_theta = desired.alpha > T::zero();

    let inside = |i: usize| {
        let e = log.rows[i].error;
        e.e_r.abs() <= tol_r
            && e.e_alpha.abs() <= tol_a
            && (!check_theta || e.e_theta.abs() <= tol_t)
    };

    let n = log.rows.len();
    let settling = match (0..n).rev().find(|&i| !inside(i)) {
        None => Settling::At(T::zero()),
        Some(i) if i + 1 == n => Settling::NotSettled,
        Some(i) => Settling::At(log.rows[i + 1].time - log.start_time),
    };

    let tail = (n / 10).max(1);
    let count = T::from_usize(tail).unwrap();
    let mut sse = AxisErrors::default();
    for row in &log.rows[n - tail..] {
        sse.r = sse.r + row.error.e_r.abs();
        sse.alpha = sse.alpha + row.error.e_alpha.abs();
        sse.theta = sse.theta + row.error.e_theta.abs();
    }
    sse.r = sse.r / count;
    sse.alpha = sse.alpha / count;
    sse.theta = sse.theta / count;

    Ok(SettlingMetrics {
        settling,
        steady_state_error: sse,
    })
}

/// First measured rotation change, relative to the pre-run pose, whose
/// magnitude exceeds `threshold` degrees. Positive means the same direction
/// as the shortest turn toward the target.
pub fn initial_theta_excursion<T: Scalar>(log: &RunLog<T>, threshold: T) -> Option<T> {
    let desired = log.rows.first()?.desired;
    let toward = wrap_deg(desired.theta - log.initial.theta);
    let sign = if toward < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    log.rows
        .iter()
        .map(|r| wrap_deg(r.measured.theta - log.initial.theta))
        .find(|d| d.abs() > threshold)
        .map(|d| d * sign)
}
