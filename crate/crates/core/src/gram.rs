//! Gram matrix of the two-photon inside kets `|2,0⟩, |1,1⟩, |0,2⟩` in a
//! symmetric cavity, its orthogonal basis, and the `N(α)` matrix family.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use thiserror::Error;

use crate::linalg::{ModeMatrix, TripleMatrix};
use crate::mirror::PowerReflectance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error("basis is degenerate for |rho| = 1 (rho = {rho})")]
    DegenerateBasis { rho: f64 },
    #[error("composition undefined: 1 + alpha*beta = 0 (alpha = {alpha}, beta = {beta})")]
    SingularComposition { alpha: f64, beta: f64 },
    #[error("N(alpha) is singular for |alpha| = 1 (alpha = {alpha})")]
    SingularInverse { alpha: f64 },
}

/// `Δ = G₁₁` and `ρ = G₁₂/G₁₁` of a symmetric cavity at phase `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramParameters {
    pub delta: f64,
    pub rho: f64,
}

/// `Δ = (1 − R²)/(1 − 2R cos 2x + R²)`, `ρ = −2√R cos x/(1 + R)`.
pub fn gram_parameters(reflectance: PowerReflectance, x: f64) -> GramParameters {
    let big_r = reflectance.value();
    let s = x.sin();
    // 1 − 2R cos 2x + R² = (1 − R)² + 4R sin²x
    let den = (1.0 - big_r).powi(2) + 4.0 * big_r * s * s;
    GramParameters {
        delta: (1.0 - big_r) * (1.0 + big_r) / den,
        rho: -2.0 * big_r.sqrt() * x.cos() / (1.0 + big_r),
    }
}

/// `S₀`, `S₁`, `S₂` with `N(α) = S₀ + α²S₁ + √2 α S₂`.
pub fn s_matrices() -> [TripleMatrix; 3] {
    [
        TripleMatrix::identity(),
        real3([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]),
        real3([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]),
    ]
}

fn real3(m: [[f64; 3]; 3]) -> TripleMatrix {
    TripleMatrix::from_real(m).expect("finite entries")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NAlpha {
    pub alpha: f64,
    pub matrix: TripleMatrix,
}

impl NAlpha {
    /// `(1 − α²)³`
    pub fn determinant(&self) -> f64 {
        (1.0 - self.alpha * self.alpha).powi(3)
    }

    /// `3 + α²`
    pub fn trace(&self) -> f64 {
        3.0 + self.alpha * self.alpha
    }

    /// Eigenvalues for `n₊`, `n₀`, `n₋`: `(1+α)²`, `1−α²`, `(1−α)²`.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let a = self.alpha;
        [(1.0 + a).powi(2), 1.0 - a * a, (1.0 - a).powi(2)]
    }
}

pub fn n_alpha(alpha: f64) -> NAlpha {
    let s = alpha * SQRT_2;
    let a2 = alpha * alpha;
    NAlpha { alpha, matrix: real3([[1.0, s, a2], [s, 1.0 + a2, s], [a2, s, 1.0]]) }
}

/// `scale · N(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledN {
    pub scale: f64,
    pub n: NAlpha,
}

impl ScaledN {
    pub fn matrix(&self) -> TripleMatrix {
        self.n.matrix.scale(self.scale.into())
    }
}

/// `N(α)N(β) = (1 + αβ)² N((α + β)/(1 + αβ))`.
pub fn n_compose(alpha: f64, beta: f64) -> Result<ScaledN, GramError> {
    let k = 1.0 + alpha * beta;
    if k == 0.0 {
        return Err(GramError::SingularComposition { alpha, beta });
    }
    Ok(ScaledN { scale: k * k, n: n_alpha((alpha + beta) / k) })
}

/// `N⁻¹(α) = N(−α)/(1 − α²)²`.
pub fn n_inverse(alpha: f64) -> Result<ScaledN, GramError> {
    let d = 1.0 - alpha * alpha;
    if d == 0.0 {
        return Err(GramError::SingularInverse { alpha });
    }
    Ok(ScaledN { scale: (d * d).recip(), n: n_alpha(-alpha) })
}

/// `G̃ = Δ² N(ρ)`, in the order `|2,0⟩, |1,1⟩, |0,2⟩`.
pub fn gram_matrix(p: GramParameters) -> TripleMatrix {
    n_alpha(p.rho).matrix.scale((p.delta * p.delta).into())
}

/// `Δ⁶(1 − ρ²)³`
pub fn gram_determinant(p: GramParameters) -> f64 {
    p.delta.powi(6) * (1.0 - p.rho * p.rho).powi(3)
}

/// The `G̃`-orthogonal basis `n₊, n₀, n₋` with its metric norms `Δ²λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalBasis {
    /// raw coefficient vectors (Euclidean unit norm)
    pub vectors: [[f64; 3]; 3],
    pub metric_norms: [f64; 3],
}

impl OrthogonalBasis {
    /// Vectors divided by `√(Δ²λ)`, so that `v† G̃ v = 1`.
    pub fn normalized(&self) -> [[f64; 3]; 3] {
        let mut out = self.vectors;
        for (v, n) in out.iter_mut().zip(self.metric_norms) {
            let s = n.sqrt().recip();
            v.iter_mut().for_each(|c| *c *= s);
        }
        out
    }
}

pub const BASIS_VECTORS: [[f64; 3]; 3] = [
    [0.5, FRAC_1_SQRT_2, 0.5],
    [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2],
    [0.5, -FRAC_1_SQRT_2, 0.5],
];

pub fn orthonormal_basis(p: GramParameters) -> Result<OrthogonalBasis, GramError> {
    if !(p.rho.abs() < 1.0) {
        return Err(GramError::DegenerateBasis { rho: p.rho });
    }
    let d2 = p.delta * p.delta;
    let metric_norms = n_alpha(p.rho).eigenvalues().map(|l| d2 * l);
    Ok(OrthogonalBasis { vectors: BASIS_VECTORS, metric_norms })
}

/// `N₂(α) = σ₀ + ασ₁`, the two-dimensional counterpart of `N(α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliAnalogue {
    pub alpha: f64,
    pub matrix: ModeMatrix,
}

impl PauliAnalogue {
    pub fn determinant(&self) -> f64 {
        1.0 - self.alpha * self.alpha
    }

    pub fn trace(&self) -> f64 {
        2.0
    }

    /// `((1,1)/√2, 1+α)` and `((−1,1)/√2, 1−α)`.
    pub fn eigenpairs(&self) -> [([f64; 2], f64); 2] {
        let s = FRAC_1_SQRT_2;
        [([s, s], 1.0 + self.alpha), ([-s, s], 1.0 - self.alpha)]
    }
}

pub fn pauli_analogue(alpha: f64) -> PauliAnalogue {
    PauliAnalogue { alpha, matrix: ModeMatrix::from_real([[1.0, alpha], [alpha, 1.0]]).expect("finite entries") }
}

/// `N₂(α)N₂(β) = (1 + αβ) N₂((α + β)/(1 + αβ))`; returns `(scale, N₂)`.
pub fn pauli_compose(alpha: f64, beta: f64) -> Result<(f64, PauliAnalogue), GramError> {
    let k = 1.0 + alpha * beta;
    if k == 0.0 {
        return Err(GramError::SingularComposition { alpha, beta });
    }
    Ok((k, pauli_analogue((alpha + beta) / k)))
}
