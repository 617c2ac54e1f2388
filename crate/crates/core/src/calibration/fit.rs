use super::{CalibrationError, MocapSample};
use crate::kinematics::cartesian_to_polar;

pub const DEFAULT_INDEPENDENCE_THRESHOLD: f64 = 0.01;

/// Line through the origin fitted to (motor angle, pitch) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub k_hat: f64,
    pub r_squared: f64,
    /// Largest absolute pitch residual, degrees.
    pub residual_max: f64,
    pub n_samples: usize,
}

/// Least-squares slope of measured pitch against the single pulled motor.
///
/// Pitch comes from the mocap position. Samples with all motors slack
/// count as zero angle; samples with two or more active motors are
/// rejected.
pub fn estimate_k(samples: &[MocapSample]) -> Result<FitResult, CalibrationError> {
    let mut pairs = Vec::with_capacity(samples.len());
    for (index, s) in samples.iter().enumerate() {
        if s.motor_angles.active_count() > 1 {
            return Err(CalibrationError::MultiMotorData { index });
        }
        let phi: f64 = s.motor_angles.phi.iter().sum();
        let pose = cartesian_to_polar(&s.position)
            .map_err(|source| CalibrationError::Kinematics { index, source })?;
        pairs.push((phi, pose.alpha));
    }
    fit_through_origin(&pairs)
}

fn fit_through_origin(pairs: &[(f64, f64)]) -> Result<FitResult, CalibrationError> {
    let n = pairs.len();
    if n < 2 {
        return Err(CalibrationError::InsufficientData);
    }
    let first = pairs[0].0;
    if pairs.iter().all(|(p, _)| *p == first) {
        return Err(CalibrationError::InsufficientData);
    }
    let sxy: f64 = pairs.iter().map(|(p, a)| p * a).sum();
    let sxx: f64 = pairs.iter().map(|(p, _)| p * p).sum();
    let k_hat = sxy / sxx;

    let mean = pairs.iter().map(|(_, a)| a).sum::<f64>() / n as f64;
    let mut ssr = 0.0;
    let mut sst = 0.0;
    let mut residual_max: f64 = 0.0;
    for (p, a) in pairs {
        let r = a - k_hat * p;
        ssr += r * r;
        sst += (a - mean) * (a - mean);
        residual_max = residual_max.max(r.abs());
    }
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else if ssr == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(FitResult {
        k_hat,
        r_squared,
        residual_max,
        n_samples: n,
    })
}

/// Samples sharing one (pressure, length) condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroup {
    pub pressure: f64,
    pub length: f64,
    pub samples: Vec<MocapSample>,
}

/// Splits samples by their logged (pressure, length), in order of first appearance.
pub fn group_by_condition(samples: &[MocapSample]) -> Vec<SampleGroup> {
    let mut groups: Vec<SampleGroup> = Vec::new();
    for s in samples {
        match groups
            .iter_mut()
            .find(|g| g.pressure == s.pressure && g.length == s.arm_length)
        {
            Some(g) => g.samples.push(*s),
            None => groups.push(SampleGroup {
                pressure: s.pressure,
                length: s.arm_length,
                samples: vec![*s],
            }),
        }
    }
    groups
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupFit {
    pub pressure: f64,
    pub length: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub groups: Vec<GroupFit>,
    /// Fit over all groups pooled together.
    pub pooled: FitResult,
    pub max_pairwise_difference: f64,
    pub threshold: f64,
    /// The spread of per-group estimates exceeds `threshold`.
    pub flagged: bool,
}

/// Fits each condition separately and checks the estimates agree.
pub fn pressure_length_independence(
    groups: &[SampleGroup],
    threshold: f64,
) -> Result<IndependenceReport, CalibrationError> {
    if groups.len() < 2 {
        return Err(CalibrationError::InsufficientData);
    }
    let mut fits = Vec::with_capacity(groups.len());
    for g in groups {
        fits.push(GroupFit {
            pressure: g.pressure,
            length: g.length,
            fit: estimate_k(&g.samples)?,
        });
    }
    let all: Vec<MocapSample> = groups
        .iter()
        .flat_map(|g| g.samples.iter().copied())
        .collect();
    let pooled = estimate_k(&all)?;
    let (lo, hi) = fits
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
            (lo.min(g.fit.k_hat), hi.max(g.fit.k_hat))
        });
    let spread = hi - lo;
    Ok(IndependenceReport {
        groups: fits,
        pooled,
        max_pairwise_difference: spread,
        threshold,
        flagged: spread > threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{polar_to_cartesian, Motor, MotorAngles, PolarPose};

    fn sample(motor: Motor, phi: f64, alpha: f64, pressure: f64, length: f64) -> MocapSample {
        let mut m = MotorAngles::zero();
        m.set(motor, phi);
        let pose = PolarPose::new(length, alpha, motor.bearing());
        MocapSample {
            time: 0.0,
            position: polar_to_cartesian(&pose),
            motor_angles: m,
            pressure,
            arm_length: length,
        }
    }

    #[test]
    fn noiseless_recovery_any_motor() {
        for motor in Motor::ALL {
            let s: Vec<_> = (0..20)
                .map(|i| {
                    let phi = 15.0 * i as f64;
                    sample(motor, phi, 0.104 * phi, 8.0, 1.0)
                })
                .collect();
            let fit = estimate_k(&s).unwrap();
            assert!((fit.k_hat - 0.104).abs() < 1e-9, "{motor:?}: {}", fit.k_hat);
            assert!((fit.r_squared - 1.0).abs() < 1e-12);
            assert!(fit.residual_max < 1e-9);
            assert_eq!(fit.n_samples, 20);
        }
    }

    #[test]
    fn identical_samples_are_insufficient() {
        let s = sample(Motor::M1, 100.0, 10.4, 8.0, 1.0);
        assert!(matches!(
            estimate_k(&[s, s]),
            Err(CalibrationError::InsufficientData)
        ));
        assert!(matches!(
            estimate_k(&[s]),
            Err(CalibrationError::InsufficientData)
        ));
    }

    #[test]
    fn two_active_motors_rejected() {
        let mut s = sample(Motor::M1, 100.0, 10.4, 8.0, 1.0);
        let ok = sample(Motor::M1, 50.0, 5.2, 8.0, 1.0);
        s.motor_angles.set(Motor::M2, 5.0);
        assert!(matches!(
            estimate_k(&[ok, s]),
            Err(CalibrationError::MultiMotorData { index: 1 })
        ));
    }

    #[test]
    fn groups_from_same_coefficient_agree() {
        let mut all = Vec::new();
        for (p, l) in [(3.0, 0.6), (9.0, 1.2)] {
            for i in 1..10 {
                let phi = 20.0 * i as f64;
                all.push(sample(Motor::M2, phi, 0.104 * phi, p, l));
            }
        }
        let groups = group_by_condition(&all);
        assert_eq!(groups.len(), 2);
        let report = pressure_length_independence(&groups, DEFAULT_INDEPENDENCE_THRESHOLD).unwrap();
        assert!(report.max_pairwise_difference <= 1e-9);
        assert!(!report.flagged);
        assert!(matches!(
            pressure_length_independence(&groups[..1], 0.01),
            Err(CalibrationError::InsufficientData)
        ));
    }

    #[test]
    fn disagreeing_groups_flagged() {
        let mut all = Vec::new();
        for (p, k) in [(3.0, 0.10), (9.0, 0.12)] {
            for i in 1..10 {
                let phi = 20.0 * i as f64;
                all.push(sample(Motor::M1, phi, k * phi, p, 1.0));
            }
        }
        let report = pressure_length_independence(&group_by_condition(&all), 0.01).unwrap();
        assert!(report.flagged);
        assert!((report.max_pairwise_difference - 0.02).abs() < 1e-9);
    }
}
