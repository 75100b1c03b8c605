use num_complex::Complex64;

use super::quadrature::FrequencyGrid;
use super::{PhotonStateError, NORMALIZATION_TOLERANCE};

/// Detector-side spectral amplitude `η(ω)` sampled on a grid, unit norm
/// under the grid's trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEnvelope {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SpectralEnvelope {
    /// Accepts samples that are already normalized.
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self, PhotonStateError> {
        let norm = squared_norm(&grid, &values)?;
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(PhotonStateError::NotNormalized { what: "envelope", norm });
        }
        Ok(SpectralEnvelope { grid, values })
    }

    /// Rescales arbitrary nonzero samples to unit norm.
    pub fn normalized(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self, PhotonStateError> {
        let norm = squared_norm(&grid, &values)?;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(PhotonStateError::ZeroNorm { what: "envelope" });
        }
        let scale = norm.sqrt().recip();
        Ok(SpectralEnvelope { grid, values: values.into_iter().map(|v| v * scale).collect() })
    }

    /// Real Gaussian amplitude; `|η|²` has standard deviation `width`.
    pub fn gaussian(grid: FrequencyGrid, center: f64, width: f64) -> Result<Self, PhotonStateError> {
        check_width(width)?;
        let values = gaussian_profile(&grid, center, width);
        Self::normalized(grid, values)
    }

    /// Lorentzian amplitude `1/(γ/2 − i(ω − ω₀))`; `|η|²` has full width `width`.
    pub fn lorentzian(grid: FrequencyGrid, center: f64, width: f64) -> Result<Self, PhotonStateError> {
        check_width(width)?;
        let values = lorentzian_profile(&grid, center, width);
        Self::normalized(grid, values)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_squared(&self) -> f64 {
        // grid and values lengths are checked at construction
        squared_norm(&self.grid, &self.values).unwrap_or(f64::NAN)
    }
}

pub(crate) fn check_width(width: f64) -> Result<(), PhotonStateError> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(PhotonStateError::InvalidWidth(width))
    }
}

pub(crate) fn gaussian_at(w: f64, center: f64, width: f64) -> Complex64 {
    let u = (w - center) / width;
    Complex64::new((-0.25 * u * u).exp(), 0.0)
}

pub(crate) fn lorentzian_at(w: f64, center: f64, width: f64) -> Complex64 {
    Complex64::new(0.5 * width, -(w - center)).inv()
}

pub(crate) fn gaussian_profile(grid: &FrequencyGrid, center: f64, width: f64) -> Vec<Complex64> {
    grid.points().iter().map(|&w| gaussian_at(w, center, width)).collect()
}

pub(crate) fn lorentzian_profile(grid: &FrequencyGrid, center: f64, width: f64) -> Vec<Complex64> {
    grid.points().iter().map(|&w| lorentzian_at(w, center, width)).collect()
}

pub(crate) fn squared_norm(grid: &FrequencyGrid, values: &[Complex64]) -> Result<f64, PhotonStateError> {
    let mags: Vec<f64> = values.iter().map(|v| v.norm_sqr()).collect();
    grid.integrate_real(&mags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factories_are_normalized() {
        let grid = FrequencyGrid::uniform(-5.0, 5.0, 257).unwrap();
        let g = SpectralEnvelope::gaussian(grid.clone(), 0.3, 0.7).unwrap();
        assert!((g.norm_squared() - 1.0).abs() < 1e-12);
        let l = SpectralEnvelope::lorentzian(grid.clone(), -0.2, 0.5).unwrap();
        assert!((l.norm_squared() - 1.0).abs() < 1e-12);
        assert!(SpectralEnvelope::new(grid.clone(), l.values().to_vec()).is_ok());
    }

    #[test]
    fn rejects_bad_inputs() {
        let grid = FrequencyGrid::uniform(0.0, 1.0, 11).unwrap();
        assert!(matches!(
            SpectralEnvelope::new(grid.clone(), vec![Complex64::new(2.0, 0.0); 11]),
            Err(PhotonStateError::NotNormalized { .. })
        ));
        assert!(matches!(
            SpectralEnvelope::normalized(grid.clone(), vec![Complex64::new(0.0, 0.0); 11]),
            Err(PhotonStateError::ZeroNorm { .. })
        ));
        assert_eq!(SpectralEnvelope::gaussian(grid, 0.5, 0.0), Err(PhotonStateError::InvalidWidth(0.0)));
    }
}
