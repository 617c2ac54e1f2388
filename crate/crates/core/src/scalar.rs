//! Scalar abstraction shared by the geometry, plant and controller code.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Normalizes an angle in degrees into `[0, 360)`.
pub fn normalize_deg<T: Scalar>(angle: T) -> T {
    let full = T::lit(360.0);
    let r = angle % full;
    let r = if r < T::zero() { r + full } else { r };
    // -1e-17 + 360 rounds to 360
    if r >= full {
        T::zero()
    } else {
        r
    }
}

/// Wraps an angle difference in degrees into `(-180, 180]`.
pub fn wrap_deg<T: Scalar>(angle: T) -> T {
    let d = normalize_deg(angle);
    if d > T::lit(180.0) {
        d - T::lit(360.0)
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_edges() {
        assert_eq!(normalize_deg(360.0_f64), 0.0);
        assert_eq!(normalize_deg(-90.0_f64), 270.0);
        assert_eq!(normalize_deg(-1e-17_f64), 0.0);
        assert_eq!(normalize_deg(725.0_f32), 5.0);
    }

    #[test]
    fn wrap_branch() {
        assert_eq!(wrap_deg(5.0_f64 - 355.0), 10.0);
        assert_eq!(wrap_deg(180.0_f64), 180.0);
        assert_eq!(wrap_deg(-180.0_f64), 180.0);
        assert_eq!(wrap_deg(190.0_f64), -170.0);
    }
}
