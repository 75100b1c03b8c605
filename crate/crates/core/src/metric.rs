//! Diagonalization of the intracavity commutator metric `G(ω)` and the
//! transform that restores canonical commutators.

use num_complex::Complex64;
use thiserror::Error;

use crate::cavity::{CavityError, CavitySpec};
use crate::linalg::{LinalgError, ModeMatrix, HERMITIAN_TOLERANCE};
use crate::photon_states::{FrequencyGrid, PhotonStateError};

/// `λ₂` at or below this fraction of `λ₁` is treated as a degenerate metric.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("metric diagonal entries differ by {residual:e}")]
    AsymmetricDiagonal { residual: f64 },
    #[error("metric is degenerate (smallest eigenvalue {lambda2:e}); mirrors are perfectly reflecting")]
    Degenerate { lambda2: f64 },
    #[error(transparent)]
    Cavity(#[from] CavityError),
    #[error(transparent)]
    Quadrature(#[from] PhotonStateError),
}

/// `G = U diag(λ₁, λ₂) U†` with `λ₁ = G₁₁ + |G₁₂|`, `λ₂ = G₁₁ − |G₁₂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEigensystem {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `arg G₂₁`, or 0 when the off-diagonal entry vanishes
    pub phi: f64,
    /// columns `(e^{−iφ/2}, ±e^{iφ/2})/√2`
    pub diagonalizer: ModeMatrix,
}

impl MetricEigensystem {
    pub fn eigenvalues(&self) -> [f64; 2] {
        [self.lambda1, self.lambda2]
    }
}

fn check_structure(g: &ModeMatrix) -> Result<(), MetricError> {
    if !g.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 }.into());
    }
    let scale = g.frobenius_norm();
    let allowed = HERMITIAN_TOLERANCE * scale;
    let asymmetry = g.distance(&g.adjoint());
    if asymmetry > allowed {
        return Err(LinalgError::NotHermitian { asymmetry, allowed }.into());
    }
    let residual = (g.get(0, 0) - g.get(1, 1)).norm();
    if residual > HERMITIAN_TOLERANCE * scale {
        return Err(MetricError::AsymmetricDiagonal { residual });
    }
    Ok(())
}

/// `a² − |z|²` with the products split exactly, so the small eigenvalue
/// keeps full relative precision near resonance.
fn difference_of_squares(a: f64, z: Complex64) -> f64 {
    let split = |u: f64, v: f64| {
        let p = u * v;
        (p, u.mul_add(v, -p))
    };
    let (p, ep) = split(a, a);
    let (q, eq) = split(z.re, z.re);
    let (r, er) = split(z.im, z.im);
    let sum = |u: f64, v: f64| {
        let s = u + v;
        let w = s - u;
        (s, (u - (s - w)) + (v - w))
    };
    let (s1, e1) = sum(p, -q);
    let (s2, e2) = sum(s1, -r);
    s2 + (((e1 + e2) + ep) - (eq + er))
}

pub fn eigen_metric(g: &ModeMatrix) -> Result<MetricEigensystem, MetricError> {
    check_structure(g)?;
    let g11 = 0.5 * (g.get(0, 0).re + g.get(1, 1).re);
    let g21 = 0.5 * (g.get(1, 0) + g.get(0, 1).conj());
    let modulus = g21.norm();
    let phi = if modulus == 0.0 { 0.0 } else { g21.arg() };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let lo = Complex64::from_polar(s, -0.5 * phi);
    let hi = Complex64::from_polar(s, 0.5 * phi);
    let lambda1 = g11 + modulus;
    let lambda2 = if lambda1 > 0.0 { difference_of_squares(g11, g21) / lambda1 } else { g11 - modulus };
    Ok(MetricEigensystem {
        lambda1,
        lambda2,
        phi,
        diagonalizer: ModeMatrix::from_entries([[lo, lo], [hi, -hi]]),
    })
}

/// `E U†` with `E = diag(λ₁^{−1/2}, λ₂^{−1/2})`; maps inside operators to
/// ones obeying `[b′_i, b′_j†] = δ_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalizingMap {
    pub entries: ModeMatrix,
}

impl CanonicalizingMap {
    pub fn apply(&self, g: &ModeMatrix) -> ModeMatrix {
        self.entries * *g * self.entries.adjoint()
    }
}

pub fn canonicalizing_map(g: &ModeMatrix) -> Result<CanonicalizingMap, MetricError> {
    let eig = eigen_metric(g)?;
    if !(eig.lambda2 > DEGENERACY_TOLERANCE * eig.lambda1) {
        return Err(MetricError::Degenerate { lambda2: eig.lambda2 });
    }
    let row = |lambda: f64, sign: f64| {
        let s = (2.0 * lambda).sqrt().recip();
        [Complex64::from_polar(s, 0.5 * eig.phi), Complex64::from_polar(sign * s, -0.5 * eig.phi)]
    };
    Ok(CanonicalizingMap { entries: ModeMatrix::from_entries([row(eig.lambda1, 1.0), row(eig.lambda2, -1.0)]) })
}

/// `⟨φ|φ⟩ = ∫ K†(ω) G(ω) K(ω) dω` for one-photon coefficients `K = (C_R, C_L)`.
pub fn one_photon_metric_norm(
    spec: &CavitySpec,
    grid: &FrequencyGrid,
    coeffs: &[[Complex64; 2]],
) -> Result<f64, MetricError> {
    if coeffs.len() != grid.len() {
        return Err(PhotonStateError::LengthMismatch { expected: grid.len(), found: coeffs.len() }.into());
    }
    let samples = grid
        .points()
        .iter()
        .zip(coeffs)
        .map(|(&w, k)| Ok(spec.commutator_metric(w)?.quadratic_form(k).re))
        .collect::<Result<Vec<f64>, CavityError>>()?;
    Ok(grid.integrate_real(&samples)?)
}
