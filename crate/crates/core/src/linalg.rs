//! Small fixed-size complex matrices.
//!
//! Everything in the cavity formalism lives in 2×2 (mode doublets) or 3×3
//! (two-photon kets of two modes) complex matrices, so the matrix type is a
//! const-generic array wrapper rather than a general dense type.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Complex amplitude used throughout the crate.
pub type ComplexScalar = Complex64;

/// 2×2 complex matrix: B, C, M, G, K and P.
pub type ModeMatrix = Matrix<2>;

/// 3×3 complex matrix: the two-photon Gram matrix and the S/N(α) algebra.
pub type TripleMatrix = Matrix<3>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance for the Hermiticity check in [`hermitian_eig2`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: ||h - h^dagger||_F = {asymmetry:e} exceeds {allowed:e}")]
    NotHermitian { asymmetry: f64, allowed: f64 },
    #[error("matrix is singular (determinant {determinant:e})")]
    Singular { determinant: f64 },
}

#[derive(Clone, Copy, PartialEq)]
pub struct Matrix<const N: usize> {
    entries: [[Complex64; N]; N],
}

impl<const N: usize> Matrix<N> {
    /// Builds a matrix, rejecting NaN or infinite entries.
    pub fn new(entries: [[Complex64; N]; N]) -> Result<Self, LinalgError> {
        for (row, line) in entries.iter().enumerate() {
            for (col, z) in line.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(LinalgError::NonFinite { row, col });
                }
            }
        }
        Ok(Matrix { entries })
    }

    pub(crate) const fn from_entries(entries: [[Complex64; N]; N]) -> Self {
        Matrix { entries }
    }

    pub fn from_real(entries: [[f64; N]; N]) -> Result<Self, LinalgError> {
        Self::new(entries.map(|row| row.map(|v| Complex64::new(v, 0.0))))
    }

    pub fn zeros() -> Self {
        Matrix { entries: [[ZERO; N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.entries[i][i] = ONE;
        }
        m
    }

    #[inline]
    pub fn entries(&self) -> &[[Complex64; N]; N] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Standard matrix product `self · other`.
    pub fn mat_mul(&self, other: &Self) -> Self {
        let mut out = [[ZERO; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += self.entries[i][k] * other.entries[k][j];
                }
                *cell = acc;
            }
        }
        Matrix { entries: out }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.entries[j][i].conj();
            }
        }
        Matrix { entries: out }
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[ZERO; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.entries[j][i];
            }
        }
        Matrix { entries: out }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Matrix { entries: self.entries.map(|row| row.map(|z| z * factor)) }
    }

    pub fn trace(&self) -> Complex64 {
        (0..N).map(|i| self.entries[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).frobenius_norm()
    }

    /// `‖self − I‖_F`.
    pub fn distance_from_identity(&self) -> f64 {
        self.distance(&Self::identity())
    }

    /// Quadratic form `v† · self · v`.
    pub fn quadratic_form(&self, v: &[Complex64; N]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..N {
            for j in 0..N {
                acc += v[i].conj() * self.entries[i][j] * v[j];
            }
        }
        acc
    }

    /// Sesquilinear form `u† · self · v`.
    pub fn inner(&self, u: &[Complex64; N], v: &[Complex64; N]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..N {
            for j in 0..N {
                acc += u[i].conj() * self.entries[i][j] * v[j];
            }
        }
        acc
    }

    pub fn apply(&self, v: &[Complex64; N]) -> [Complex64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += self.entries[i][j] * vj;
            }
        }
        out
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> fmt::Debug for Matrix<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

impl<const N: usize> Mul for Matrix<N> {
    type Output = Matrix<N>;
    fn mul(self, rhs: Self) -> Self::Output {
        self.mat_mul(&rhs)
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Matrix<N>;
    fn add(self, rhs: Self) -> Self::Output {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += rhs.entries[i][j];
            }
        }
        Matrix { entries: out }
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Matrix<N>;
    fn sub(self, rhs: Self) -> Self::Output {
        let mut out = self.entries;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell -= rhs.entries[i][j];
            }
        }
        Matrix { entries: out }
    }
}

impl Matrix<2> {
    pub fn determinant(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        let det = self.determinant();
        if det.norm() <= f64::MIN_POSITIVE * self.frobenius_norm().powi(2).max(1.0) {
            return Err(LinalgError::Singular { determinant: det.norm() });
        }
        let e = &self.entries;
        let inv = det.inv();
        Ok(Matrix {
            entries: [[e[1][1] * inv, -e[0][1] * inv], [-e[1][0] * inv, e[0][0] * inv]],
        })
    }
}

impl Matrix<3> {
    /// Cofactor expansion along the first row.
    pub fn determinant(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    }
}

/// Eigendecomposition of a 2×2 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianEigen2 {
    /// Descending.
    pub values: [f64; 2],
    /// `vectors[k]` belongs to `values[k]`; unit norm, mutually orthogonal.
    pub vectors: [[Complex64; 2]; 2],
}

impl HermitianEigen2 {
    /// Unitary matrix whose columns are the eigenvectors.
    pub fn diagonalizer(&self) -> ModeMatrix {
        let [u, v] = self.vectors;
        Matrix::from_entries([[u[0], v[0]], [u[1], v[1]]])
    }

    /// `U Λ U†`.
    pub fn reconstruct(&self) -> ModeMatrix {
        let u = self.diagonalizer();
        let lambda = Matrix::from_entries([
            [Complex64::new(self.values[0], 0.0), ZERO],
            [ZERO, Complex64::new(self.values[1], 0.0)],
        ]);
        u * lambda * u.adjoint()
    }
}

/// Closed-form eigensystem of a Hermitian 2×2 matrix.
///
/// Eigenvalues are returned in descending order. When the off-diagonal
/// entry vanishes the canonical basis vectors are returned, ordered by
/// their diagonal entries (first basis vector first on ties).
pub fn hermitian_eig2(h: &ModeMatrix) -> Result<HermitianEigen2, LinalgError> {
    if !h.is_finite() {
        return Err(LinalgError::NonFinite { row: 0, col: 0 });
    }
    let scale = h.frobenius_norm();
    let asymmetry = h.distance(&h.adjoint());
    let allowed = HERMITIAN_TOLERANCE * scale;
    if asymmetry > allowed {
        return Err(LinalgError::NotHermitian { asymmetry, allowed });
    }

    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    // average the two off-diagonal readings so tiny asymmetries do not bias the result
    let b = 0.5 * (h.get(0, 1) + h.get(1, 0).conj());

    let e1 = [ONE, ZERO];
    let e2 = [ZERO, ONE];
    if b == ZERO {
        return Ok(if a >= d {
            HermitianEigen2 { values: [a, d], vectors: [e1, e2] }
        } else {
            HermitianEigen2 { values: [d, a], vectors: [e2, e1] }
        });
    }

    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());

    // Two algebraically equivalent kernels of (h − λ₁); pick the one free of cancellation.
    let (p, q) = if half_gap >= 0.0 {
        (Complex64::new(half_gap + radius, 0.0), b.conj())
    } else {
        (b, Complex64::new(radius - half_gap, 0.0))
    };
    let norm = (p.norm_sqr() + q.norm_sqr()).sqrt();
    let v1 = [p / norm, q / norm];
    let v2 = [-v1[1].conj(), v1[0].conj()];

    Ok(HermitianEigen2 { values: [mean + radius, mean - radius], vectors: [v1, v2] })
}
