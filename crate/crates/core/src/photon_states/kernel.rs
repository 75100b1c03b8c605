use num_complex::Complex64;

use super::quadrature::FrequencyGrid;
use super::{PhotonStateError, NORMALIZATION_TOLERANCE};
use crate::linalg::ModeMatrix;

/// Largest grid accepted for a materialized kernel (points per axis).
pub const MAX_GRIDDED_POINTS: usize = 512;

/// Tolerance of the exchange symmetry `K_ij(ω, ω′) = K_ji(ω′, ω)`, relative
/// to the largest kernel entry.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// `K_ij(ω, ω′) = c_ij φ_i(ω) φ_j(ω′)` with symmetric `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableKernel {
    grid: FrequencyGrid,
    coefficients: ModeMatrix,
    profiles: [Vec<Complex64>; 2],
}

impl SeparableKernel {
    pub fn new(
        grid: FrequencyGrid,
        coefficients: ModeMatrix,
        profiles: [Vec<Complex64>; 2],
    ) -> Result<Self, PhotonStateError> {
        for p in &profiles {
            if p.len() != grid.len() {
                return Err(PhotonStateError::LengthMismatch { expected: grid.len(), found: p.len() });
            }
        }
        let scale = coefficients.frobenius_norm();
        let asym = (coefficients.get(0, 1) - coefficients.get(1, 0)).norm();
        if asym > SYMMETRY_TOLERANCE * scale {
            return Err(PhotonStateError::KernelNotSymmetric { residual: asym });
        }
        Ok(SeparableKernel { grid, coefficients, profiles })
    }

    /// Same profile for both modes.
    pub fn with_shared_profile(
        grid: FrequencyGrid,
        coefficients: ModeMatrix,
        profile: Vec<Complex64>,
    ) -> Result<Self, PhotonStateError> {
        Self::new(grid, coefficients, [profile.clone(), profile])
    }

    pub fn coefficients(&self) -> &ModeMatrix {
        &self.coefficients
    }

    pub fn profiles(&self) -> &[Vec<Complex64>; 2] {
        &self.profiles
    }

    fn profile_norms(&self) -> [f64; 2] {
        self.profiles.each_ref().map(|p| {
            let mags: Vec<f64> = p.iter().map(|v| v.norm_sqr()).collect();
            self.grid.integrate_real(&mags).unwrap_or(f64::NAN)
        })
    }
}

/// Materialized `K_ij(ω_a, ω_b)`, row-major per mode pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedKernel {
    grid: FrequencyGrid,
    /// index `2i + j`, element `a·n + b`
    values: [Vec<Complex64>; 4],
}

impl GriddedKernel {
    pub fn new(grid: FrequencyGrid, values: [Vec<Complex64>; 4]) -> Result<Self, PhotonStateError> {
        let n = grid.len();
        if n > MAX_GRIDDED_POINTS {
            return Err(PhotonStateError::GridTooLarge { points: n, max: MAX_GRIDDED_POINTS });
        }
        for v in &values {
            if v.len() != n * n {
                return Err(PhotonStateError::LengthMismatch { expected: n * n, found: v.len() });
            }
        }
        let scale = values.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut residual: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..n {
                    for b in 0..n {
                        let d = values[2 * i + j][a * n + b] - values[2 * j + i][b * n + a];
                        residual = residual.max(d.norm());
                    }
                }
            }
        }
        if residual > SYMMETRY_TOLERANCE * scale {
            return Err(PhotonStateError::KernelNotSymmetric { residual });
        }
        Ok(GriddedKernel { grid, values })
    }

    /// Samples `f(i, j, ω, ω′)` on the grid (mode indices are 0-based).
    pub fn from_fn<F>(grid: FrequencyGrid, f: F) -> Result<Self, PhotonStateError>
    where
        F: Fn(usize, usize, f64, f64) -> Complex64,
    {
        let n = grid.len();
        if n > MAX_GRIDDED_POINTS {
            return Err(PhotonStateError::GridTooLarge { points: n, max: MAX_GRIDDED_POINTS });
        }
        let pts = grid.points();
        let values = [(0, 0), (0, 1), (1, 0), (1, 1)].map(|(i, j)| {
            let mut v = Vec::with_capacity(n * n);
            for &wa in pts {
                for &wb in pts {
                    v.push(f(i, j, wa, wb));
                }
            }
            v
        });
        Self::new(grid, values)
    }

    /// `K_ij(ω_a, ω_b)`.
    #[inline]
    pub fn value(&self, i: usize, j: usize, a: usize, b: usize) -> Complex64 {
        self.values[2 * i + j][a * self.grid.len() + b]
    }

    /// The 2×2 block at `(ω_a, ω_b)`.
    pub fn block(&self, a: usize, b: usize) -> ModeMatrix {
        let n = self.grid.len();
        let at = |k: usize| self.values[k][a * n + b];
        ModeMatrix::from_entries([[at(0), at(1)], [at(2), at(3)]])
    }
}

/// The symmetric coefficient function of a two-photon inside state.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoPhotonKernel {
    Separable(SeparableKernel),
    Gridded(GriddedKernel),
}

impl TwoPhotonKernel {
    pub fn grid(&self) -> &FrequencyGrid {
        match self {
            TwoPhotonKernel::Separable(k) => &k.grid,
            TwoPhotonKernel::Gridded(k) => &k.grid,
        }
    }

    /// `Σ_ij ∬ |K_ij|² dω dω′`.
    pub fn norm_squared(&self) -> f64 {
        match self {
            TwoPhotonKernel::Separable(k) => {
                let norms = k.profile_norms();
                let mut total = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        total += k.coefficients.get(i, j).norm_sqr() * norms[i] * norms[j];
                    }
                }
                total
            }
            TwoPhotonKernel::Gridded(k) => {
                let n = k.grid.len();
                let w = k.grid.weights();
                let mut total = 0.0;
                for a in 0..n {
                    let mut inner = 0.0;
                    for (b, wb) in w.iter().enumerate() {
                        let s: f64 = (0..4).map(|p| k.values[p][a * n + b].norm_sqr()).sum();
                        inner += wb * s;
                    }
                    total += w[a] * inner;
                }
                total
            }
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let f = Complex64::new(factor, 0.0);
        match self {
            TwoPhotonKernel::Separable(k) => TwoPhotonKernel::Separable(SeparableKernel {
                grid: k.grid.clone(),
                coefficients: k.coefficients.scale(f),
                profiles: k.profiles.clone(),
            }),
            TwoPhotonKernel::Gridded(k) => TwoPhotonKernel::Gridded(GriddedKernel {
                grid: k.grid.clone(),
                values: k.values.each_ref().map(|v| v.iter().map(|z| z * f).collect()),
            }),
        }
    }
}

impl From<SeparableKernel> for TwoPhotonKernel {
    fn from(k: SeparableKernel) -> Self {
        TwoPhotonKernel::Separable(k)
    }
}

impl From<GriddedKernel> for TwoPhotonKernel {
    fn from(k: GriddedKernel) -> Self {
        TwoPhotonKernel::Gridded(k)
    }
}

/// Rescales the kernel so that `Σ_ij ∬ |K_ij|² = 1`.
pub fn normalize_kernel(kernel: &TwoPhotonKernel) -> Result<TwoPhotonKernel, PhotonStateError> {
    let norm = kernel.norm_squared();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(PhotonStateError::ZeroNorm { what: "kernel" });
    }
    Ok(kernel.scaled(norm.sqrt().recip()))
}
