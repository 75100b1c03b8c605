//! Lossless mirror amplitude coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance accepted by [`MirrorCoefficients::validate`].
///
/// Looser than construction accuracy so coefficients read back from decimal
/// text still pass.
pub const VALIDATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MirrorError {
    #[error("power reflectance {0} is outside [0, 1)")]
    ReflectanceOutOfRange(f64),
    #[error("mirror coefficient is not finite")]
    NonFinite,
    #[error("energy conservation |r|^2 + |t|^2 = 1 violated by {residual:e}")]
    EnergyNotConserved { residual: f64 },
    #[error("phase condition t r* + r t* = 0 violated by {residual:e}")]
    PhaseConditionViolated { residual: f64 },
}

/// Intensity reflectance `R ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PowerReflectance(f64);

impl PowerReflectance {
    pub fn new(value: f64) -> Result<Self, MirrorError> {
        if value.is_finite() && (0.0..1.0).contains(&value) {
            Ok(PowerReflectance(value))
        } else {
            Err(MirrorError::ReflectanceOutOfRange(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PowerReflectance {
    type Error = MirrorError;
    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PowerReflectance> for f64 {
    fn from(r: PowerReflectance) -> f64 {
        r.0
    }
}

/// Amplitude reflection and transmission of a lossless, infinitely thin mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorCoefficients {
    r: Complex64,
    t: Complex64,
}

impl MirrorCoefficients {
    /// `t = i√(1−R)`, `r = −√R`: the phase convention behind every
    /// symmetric single-mode closed form.
    pub fn from_power_reflectance(reflectance: PowerReflectance) -> Self {
        let big_r = reflectance.value();
        MirrorCoefficients {
            r: Complex64::new(-big_r.sqrt(), 0.0),
            t: Complex64::new(0.0, (1.0 - big_r).sqrt()),
        }
    }

    /// Accepts any pair obeying `|r|² + |t|² = 1` and `t r* + r t* = 0`
    /// to within [`VALIDATION_TOLERANCE`].
    pub fn validate(r: Complex64, t: Complex64) -> Result<Self, MirrorError> {
        if !(r.re.is_finite() && r.im.is_finite() && t.re.is_finite() && t.im.is_finite()) {
            return Err(MirrorError::NonFinite);
        }
        let energy = (r.norm_sqr() + t.norm_sqr() - 1.0).abs();
        if energy > VALIDATION_TOLERANCE {
            return Err(MirrorError::EnergyNotConserved { residual: energy });
        }
        let phase = (t * r.conj() + r * t.conj()).norm();
        if phase > VALIDATION_TOLERANCE {
            return Err(MirrorError::PhaseConditionViolated { residual: phase });
        }
        Ok(MirrorCoefficients { r, t })
    }

    #[inline]
    pub fn r(&self) -> Complex64 {
        self.r
    }

    #[inline]
    pub fn t(&self) -> Complex64 {
        self.t
    }

    /// `|r|²`.
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }
}
