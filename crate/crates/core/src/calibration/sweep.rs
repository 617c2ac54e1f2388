use super::CalibrationError;
use crate::kinematics::{sector_of, PolarPose, SteeringSector};
use crate::scalar::wrap_deg;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepErrorReport {
    /// `(desired - measured)` per sample: pitch, then wrapped rotation.
    pub errors: Vec<(f64, f64)>,
    /// Signed mean rotation error, degrees.
    pub mean_theta_bias: f64,
    pub mean_abs_theta: f64,
    pub mean_abs_alpha: f64,
    pub max_abs_theta: f64,
}

/// Per-sample pitch and rotation errors between time-aligned pose lists.
pub fn sweep_error_field(
    desired: &[PolarPose<f64>],
    measured: &[PolarPose<f64>],
) -> Result<SweepErrorReport, CalibrationError> {
    if desired.len() != measured.len() {
        return Err(CalibrationError::LengthMismatch {
            desired: desired.len(),
            measured: measured.len(),
        });
    }
    let errors: Vec<(f64, f64)> = desired
        .iter()
        .zip(measured)
        .map(|(d, m)| (d.alpha - m.alpha, wrap_deg(d.theta - m.theta)))
        .collect();
    let n = errors.len().max(1) as f64;
    let mean_theta_bias = errors.iter().map(|e| e.1).sum::<f64>() / n;
    let mean_abs_theta = errors.iter().map(|e| e.1.abs()).sum::<f64>() / n;
    let mean_abs_alpha = errors.iter().map(|e| e.0.abs()).sum::<f64>() / n;
    let max_abs_theta = errors.iter().fold(0.0_f64, |m, e| m.max(e.1.abs()));
    Ok(SweepErrorReport {
        errors,
        mean_theta_bias,
        mean_abs_theta,
        mean_abs_alpha,
        max_abs_theta,
    })
}

/// Width in degrees of the arc just below the 0/360 seam that samples
/// commanded in sector S3 never reach, or `None` if the measured poses get
/// as close to the seam as the commands themselves did.
///
/// Rotations are compared on the branch `(-180, 180]` around the seam;
/// only the near half (`< 90`) is considered.
pub fn dead_zone_below_seam(
    commanded: &[PolarPose<f64>],
    measured: &[PolarPose<f64>],
) -> Option<f64> {
    let near_seam = |u: &f64| *u < 90.0;
    let mut top_cmd = f64::NEG_INFINITY;
    let mut top_seen = f64::NEG_INFINITY;
    for (c, m) in commanded.iter().zip(measured) {
        if !(c.alpha > 0.0 && m.alpha > 0.0 && sector_of(c.theta) == SteeringSector::S3) {
            continue;
        }
        let uc = wrap_deg(c.theta);
        let um = wrap_deg(m.theta);
        if near_seam(&uc) {
            top_cmd = top_cmd.max(uc);
        }
        if near_seam(&um) {
            top_seen = top_seen.max(um);
        }
    }
    if top_seen.is_finite() && top_seen < 0.0 && top_seen < top_cmd - 1e-9 {
        Some(-top_seen)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(alpha: f64) -> Vec<PolarPose<f64>> {
        (0..360)
            .map(|t| PolarPose::new(1.0, alpha, t as f64))
            .collect()
    }

    #[test]
    fn identical_lists_give_zero() {
        let c = circle(10.0);
        let r = sweep_error_field(&c, &c).unwrap();
        assert!(r.errors.iter().all(|e| *e == (0.0, 0.0)));
        assert_eq!(r.mean_abs_theta, 0.0);
    }

    #[test]
    fn length_mismatch() {
        let c = circle(10.0);
        assert!(matches!(
            sweep_error_field(&c, &c[..10]),
            Err(CalibrationError::LengthMismatch {
                desired: 360,
                measured: 10
            })
        ));
    }

    #[test]
    fn no_dead_zone_when_s3_reaches_seam() {
        let c = circle(10.0);
        assert_eq!(dead_zone_below_seam(&c, &c), None);
        let shifted: Vec<_> = c
            .iter()
            .map(|p| PolarPose::new(1.0, 10.0, p.theta - 20.0))
            .collect();
        let w = dead_zone_below_seam(&c, &shifted).unwrap();
        assert!((w - 21.0).abs() < 1e-9);
    }
}
