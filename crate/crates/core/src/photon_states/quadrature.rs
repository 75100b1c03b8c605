//! Composite trapezoidal quadrature on tabulated frequency grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PhotonStateError;

/// Strictly increasing, finite sample points (rad/s), at least two of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, PhotonStateError> {
        if points.len() < 2 {
            return Err(PhotonStateError::GridTooShort(points.len()));
        }
        if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
            return Err(PhotonStateError::GridNotIncreasing { index: bad });
        }
        if let Some(i) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(PhotonStateError::GridNotIncreasing { index: i + 1 });
        }
        let n = points.len();
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let half = 0.5 * (points[i + 1] - points[i]);
            weights[i] += half;
            weights[i + 1] += half;
        }
        Ok(FrequencyGrid { points, weights })
    }

    /// `count` equally spaced points from `start` to `stop` inclusive.
    pub fn uniform(start: f64, stop: f64, count: usize) -> Result<Self, PhotonStateError> {
        if count < 2 {
            return Err(PhotonStateError::GridTooShort(count));
        }
        let step = (stop - start) / (count - 1) as f64;
        Self::new((0..count).map(|i| start + step * i as f64).collect())
    }

    #[inline]
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Trapezoid weights; `Σ wᵢ fᵢ` is the rule.
    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates complex samples, summing in grid-index order.
    pub fn integrate(&self, samples: &[Complex64]) -> Result<Complex64, PhotonStateError> {
        trapezoid(samples, self)
    }

    pub fn integrate_real(&self, samples: &[f64]) -> Result<f64, PhotonStateError> {
        trapezoid_real(samples, self)
    }
}

impl TryFrom<Vec<f64>> for FrequencyGrid {
    type Error = PhotonStateError;
    fn try_from(points: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(points)
    }
}

impl From<FrequencyGrid> for Vec<f64> {
    fn from(grid: FrequencyGrid) -> Self {
        grid.points
    }
}

pub fn trapezoid(samples: &[Complex64], grid: &FrequencyGrid) -> Result<Complex64, PhotonStateError> {
    if samples.len() != grid.len() {
        return Err(PhotonStateError::LengthMismatch { expected: grid.len(), found: samples.len() });
    }
    Ok(samples
        .iter()
        .zip(&grid.weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (f, w)| acc + f * w))
}

pub fn trapezoid_real(samples: &[f64], grid: &FrequencyGrid) -> Result<f64, PhotonStateError> {
    if samples.len() != grid.len() {
        return Err(PhotonStateError::LengthMismatch { expected: grid.len(), found: samples.len() });
    }
    Ok(samples.iter().zip(&grid.weights).fold(0.0, |acc, (f, w)| acc + f * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_exact() {
        let grid = FrequencyGrid::uniform(0.0, 1.0, 101).unwrap();
        let v = grid.integrate_real(&vec![1.0; 101]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_integral() {
        let grid = FrequencyGrid::uniform(0.0, std::f64::consts::PI, 1001).unwrap();
        let samples: Vec<f64> = grid.points().iter().map(|w| w.sin()).collect();
        assert!((grid.integrate_real(&samples).unwrap() - 2.0).abs() < 1e-5);
    }

    #[test]
    fn nonuniform_grid_linear_exact() {
        let grid = FrequencyGrid::new(vec![0.0, 0.1, 0.5, 0.55, 2.0]).unwrap();
        let samples: Vec<Complex64> = grid.points().iter().map(|&w| Complex64::new(3.0 * w, -w)).collect();
        let v = grid.integrate(&samples).unwrap();
        assert!((v - Complex64::new(6.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn error_paths() {
        assert_eq!(FrequencyGrid::new(vec![1.0]), Err(PhotonStateError::GridTooShort(1)));
        assert_eq!(
            FrequencyGrid::new(vec![0.0, 1.0, 1.0]),
            Err(PhotonStateError::GridNotIncreasing { index: 2 })
        );
        let grid = FrequencyGrid::uniform(0.0, 1.0, 3).unwrap();
        assert_eq!(
            grid.integrate_real(&[1.0, 2.0]),
            Err(PhotonStateError::LengthMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn second_order_convergence() {
        // ∫₀² e^{−ω} cos 3ω dω, closed form via (e^{(−1+3i)ω})/(−1+3i)
        let exact = {
            let k = Complex64::new(-1.0, 3.0);
            (((k * 2.0).exp() - 1.0) / k).re
        };
        let err = |n: usize| {
            let grid = FrequencyGrid::uniform(0.0, 2.0, n).unwrap();
            let s: Vec<f64> = grid.points().iter().map(|w| (-w).exp() * (3.0 * w).cos()).collect();
            (grid.integrate_real(&s).unwrap() - exact).abs()
        };
        let coarse = err(101);
        let fine = err(201);
        let ratio = coarse / fine;
        assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
    }
}
