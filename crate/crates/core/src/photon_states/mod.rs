//! Continuous-mode one- and two-photon detection amplitudes outside the cavity.
//!
//! An inside state is projected onto outside number states built from the
//! detector envelopes `η₁` (behind mirror 2, "right") and `η₂` (behind
//! mirror 1, "left"). All frequency integrals use the grid's trapezoid rule.

pub mod envelope;
pub mod kernel;
pub mod quadrature;

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cavity::{CavityError, CavitySpec};
use crate::linalg::ModeMatrix;

pub use envelope::SpectralEnvelope;
pub use kernel::{normalize_kernel, GriddedKernel, SeparableKernel, TwoPhotonKernel};
pub use quadrature::{trapezoid, trapezoid_real, FrequencyGrid};

/// Tolerance on unit norms of envelopes, kernels and one-photon coefficients.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

/// A ratio whose denominator amplitude is below this fraction of the
/// numerator (in squared modulus) is reported as infinite.
pub const INFINITE_RATIO_THRESHOLD: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhotonStateError {
    #[error("frequency grid needs at least two points, got {0}")]
    GridTooShort(usize),
    #[error("frequency grid must be finite and strictly increasing (index {index})")]
    GridNotIncreasing { index: usize },
    #[error("expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("{what} is not normalized (norm {norm})")]
    NotNormalized { what: &'static str, norm: f64 },
    #[error("{what} has zero norm")]
    ZeroNorm { what: &'static str },
    #[error("envelope width must be finite and > 0, got {0}")]
    InvalidWidth(f64),
    #[error("kernel violates exchange symmetry by {residual:e}")]
    KernelNotSymmetric { residual: f64 },
    #[error("gridded kernel has {points} points per axis, limit is {max}")]
    GridTooLarge { points: usize, max: usize },
    #[error("envelopes, coefficients and kernel must share one frequency grid")]
    GridMismatch,
    #[error("ratio is 0/0: both amplitudes vanish")]
    IndeterminateRatio,
    #[error("distribution undefined: both coincidence ratios are zero")]
    UndefinedDistribution,
    #[error(transparent)]
    Cavity(#[from] CavityError),
}

/// Outside detection port. `Right` is mode 1 (`c_R`, behind mirror 2),
/// `Left` is mode 2 (`a_L`, behind mirror 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Right,
    Left,
}

impl Port {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Port::Right => 0,
            Port::Left => 1,
        }
    }
}

/// A nonnegative probability ratio that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    /// `|numerator / denominator|²`.
    pub fn from_amplitudes(numerator: Complex64, denominator: Complex64) -> Result<Self, PhotonStateError> {
        let n2 = numerator.norm_sqr();
        let d2 = denominator.norm_sqr();
        if n2 == 0.0 && d2 == 0.0 {
            return Err(PhotonStateError::IndeterminateRatio);
        }
        if d2 <= INFINITE_RATIO_THRESHOLD * n2 {
            return Ok(Ratio::Infinite);
        }
        Ok(Ratio::Finite(n2 / d2))
    }

    /// `numerator / denominator` for nonnegative reals.
    pub fn from_quotient(numerator: f64, denominator: f64) -> Result<Self, PhotonStateError> {
        if numerator == 0.0 && denominator == 0.0 {
            return Err(PhotonStateError::IndeterminateRatio);
        }
        if denominator.abs() <= INFINITE_RATIO_THRESHOLD * numerator.abs() {
            return Ok(Ratio::Infinite);
        }
        Ok(Ratio::Finite(numerator / denominator))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(v),
            Ratio::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ratio::Infinite)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(v) => s.serialize_f64(*v),
            Ratio::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Normalized two-photon outside counting statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    /// both photons behind mirror 2
    pub p_rr: f64,
    /// one photon on each side
    pub p_rl: f64,
    /// both photons behind mirror 1
    pub p_ll: f64,
}

impl OutcomeDistribution {
    pub fn sum(&self) -> f64 {
        self.p_rr + self.p_rl + self.p_ll
    }

    /// Direct normalization of the three squared amplitudes.
    pub fn from_amplitudes(rr: Complex64, rl: Complex64, ll: Complex64) -> Result<Self, PhotonStateError> {
        let (a, b, c) = (rr.norm_sqr(), rl.norm_sqr(), ll.norm_sqr());
        let total = a + b + c;
        if total == 0.0 {
            return Err(PhotonStateError::UndefinedDistribution);
        }
        Ok(OutcomeDistribution { p_rr: a / total, p_rl: b / total, p_ll: c / total })
    }
}

/// Distribution from the coincidence ratios `R₁ = P(R,L)/P(R,R)` and
/// `R₂ = P(R,L)/P(L,L)`; infinite ratios use the algebraic limits.
pub fn outcome_distribution(r1: Ratio, r2: Ratio) -> Result<OutcomeDistribution, PhotonStateError> {
    use Ratio::{Finite, Infinite};
    let d = match (r1, r2) {
        (Finite(a), Finite(b)) => {
            if a == 0.0 && b == 0.0 {
                return Err(PhotonStateError::UndefinedDistribution);
            }
            let s = a + b + a * b;
            OutcomeDistribution { p_rr: b / s, p_rl: a * b / s, p_ll: a / s }
        }
        (Infinite, Finite(b)) => OutcomeDistribution { p_rr: 0.0, p_rl: b / (1.0 + b), p_ll: 1.0 / (1.0 + b) },
        (Finite(a), Infinite) => OutcomeDistribution { p_rr: 1.0 / (1.0 + a), p_rl: a / (1.0 + a), p_ll: 0.0 },
        (Infinite, Infinite) => OutcomeDistribution { p_rr: 0.0, p_rl: 1.0, p_ll: 0.0 },
    };
    Ok(d)
}

/// Per-frequency factors `𝓛ᵢ = tᵢ/D` and `αᵢ = rᵢ e^{iωl/c}`; together they
/// give the rows of `M(ω) G(ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationFactors {
    pub transit: [Complex64; 2],
    pub reflection: [Complex64; 2],
}

impl PropagationFactors {
    pub fn new(spec: &CavitySpec, omega: f64) -> Result<Self, CavityError> {
        Self::at_phase(spec, spec.phase(omega).x)
    }

    pub fn at_phase(spec: &CavitySpec, x: f64) -> Result<Self, CavityError> {
        let d = spec.denominator_at_phase(x).value;
        if d.norm() < crate::cavity::MIN_INVERTIBLE_DENOMINATOR {
            return Err(CavityError::ResonanceSingular { x, modulus: d.norm() });
        }
        let e = Complex64::from_polar(1.0, x);
        Ok(PropagationFactors {
            transit: [spec.mirror1().t() / d, spec.mirror2().t() / d],
            reflection: [spec.mirror1().r() * e, spec.mirror2().r() * e],
        })
    }

    /// `M G = [[𝓛₂, 𝓛₂α₁], [𝓛₁α₂, 𝓛₁]]`.
    pub fn metric_rows(&self) -> ModeMatrix {
        let [l1, l2] = self.transit;
        let [a1, a2] = self.reflection;
        ModeMatrix::from_entries([[l2, l2 * a1], [l1 * a2, l1]])
    }
}

/// Closed-form `P(ω, ω′) = M(ω)G(ω) K Gᵀ(ω′)Mᵀ(ω′)` from the factors at both frequencies.
pub fn amplitude_matrix_from_factors(
    at: &PropagationFactors,
    at_prime: &PropagationFactors,
    k: &ModeMatrix,
) -> ModeMatrix {
    let [l1, l2] = at.transit;
    let [a1, a2] = at.reflection;
    let [l1p, l2p] = at_prime.transit;
    let [a1p, a2p] = at_prime.reflection;
    let (k11, k12, k21, k22) = (k.get(0, 0), k.get(0, 1), k.get(1, 0), k.get(1, 1));
    let p11 = l2 * l2p * (k11 + k22 * a1 * a1p + k12 * a1p + k21 * a1);
    let p12 = l2 * l1p * (k11 * a2p + k22 * a1 + k12 + k21 * a1 * a2p);
    let p21 = l1 * l2p * (k22 * a1p + k11 * a2 + k21 + k12 * a2 * a1p);
    let p22 = l1 * l1p * (k22 + k11 * a2 * a2p + k21 * a2p + k12 * a2);
    ModeMatrix::from_entries([[p11, p12], [p21, p22]])
}

/// `P_ab(ω, ω′)` for a kernel value `K` at `(ω, ω′)`.
pub fn amplitude_matrix(
    spec: &CavitySpec,
    omega: f64,
    omega_prime: f64,
    k: &ModeMatrix,
) -> Result<ModeMatrix, CavityError> {
    let f = PropagationFactors::new(spec, omega)?;
    let g = PropagationFactors::new(spec, omega_prime)?;
    Ok(amplitude_matrix_from_factors(&f, &g, k))
}

/// Statistical weight `2·(2^{−1/2})^{δ_ab}` of the outside two-photon projection.
#[inline]
pub(crate) fn pair_weight(a: Port, b: Port) -> f64 {
    if a == b {
        std::f64::consts::SQRT_2
    } else {
        2.0
    }
}

/// All four outside two-photon amplitudes `⟨F_a(η), F_b(η); Out|ψ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonAmplitudes {
    /// indexed by `[a][b]` with [`Port::index`]
    pub values: [[Complex64; 2]; 2],
}

impl TwoPhotonAmplitudes {
    pub fn get(&self, a: Port, b: Port) -> Complex64 {
        self.values[a.index()][b.index()]
    }
}

fn check_inputs(envelopes: &[SpectralEnvelope; 2], grid: &FrequencyGrid) -> Result<(), PhotonStateError> {
    for env in envelopes {
        if env.grid() != grid {
            return Err(PhotonStateError::GridMismatch);
        }
        let norm = env.norm_squared();
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(PhotonStateError::NotNormalized { what: "envelope", norm });
        }
    }
    Ok(())
}

fn factors_on_grid(spec: &CavitySpec, grid: &FrequencyGrid) -> Result<Vec<PropagationFactors>, CavityError> {
    grid.points().iter().map(|&w| PropagationFactors::new(spec, w)).collect()
}

/// Projects a normalized inside two-photon state onto every outside pair state.
///
/// Gridded kernels are integrated row by row in parallel; each row and the
/// final reduction are summed in grid order, so results do not depend on the
/// number of threads.
pub fn two_photon_amplitudes(
    spec: &CavitySpec,
    envelopes: &[SpectralEnvelope; 2],
    kernel: &TwoPhotonKernel,
) -> Result<TwoPhotonAmplitudes, PhotonStateError> {
    let grid = kernel.grid();
    check_inputs(envelopes, grid)?;
    let norm = kernel.norm_squared();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(PhotonStateError::NotNormalized { what: "kernel", norm });
    }
    let factors = factors_on_grid(spec, grid)?;
    let weights = grid.weights();
    let eta: [Vec<Complex64>; 2] = envelopes.each_ref().map(|e| e.values().iter().map(|v| v.conj()).collect());

    let mut raw = [[Complex64::new(0.0, 0.0); 2]; 2];
    match kernel {
        TwoPhotonKernel::Separable(k) => {
            // I_ai = ∫ η_a*(ω) [MG(ω)]_ai φ_i(ω) dω
            let mut partial = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (p, f) in factors.iter().enumerate() {
                let mg = f.metric_rows();
                for a in 0..2 {
                    for i in 0..2 {
                        partial[a][i] += weights[p] * eta[a][p] * mg.get(a, i) * k.profiles()[i][p];
                    }
                }
            }
            let c = k.coefficients();
            for a in 0..2 {
                for b in 0..2 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..2 {
                        for j in 0..2 {
                            acc += c.get(i, j) * partial[a][i] * partial[b][j];
                        }
                    }
                    raw[a][b] = acc;
                }
            }
        }
        TwoPhotonKernel::Gridded(k) => {
            let n = grid.len();
            let rows: Vec<[[Complex64; 2]; 2]> = (0..n)
                .into_par_iter()
                .map(|alpha| {
                    let mut row = [[Complex64::new(0.0, 0.0); 2]; 2];
                    for beta in 0..n {
                        let p = amplitude_matrix_from_factors(&factors[alpha], &factors[beta], &k.block(alpha, beta));
                        for a in 0..2 {
                            for b in 0..2 {
                                row[a][b] += weights[beta] * eta[b][beta] * p.get(a, b);
                            }
                        }
                    }
                    row
                })
                .collect();
            for (alpha, row) in rows.iter().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        raw[a][b] += weights[alpha] * eta[a][alpha] * row[a][b];
                    }
                }
            }
        }
    }

    let ports = [Port::Right, Port::Left];
    let mut values = raw;
    for a in ports {
        for b in ports {
            values[a.index()][b.index()] *= pair_weight(a, b);
        }
    }
    Ok(TwoPhotonAmplitudes { values })
}

/// `⟨F_a(η), F_b(η); Out|ψ⟩`.
pub fn two_photon_amplitude(
    spec: &CavitySpec,
    a: Port,
    b: Port,
    envelopes: &[SpectralEnvelope; 2],
    kernel: &TwoPhotonKernel,
) -> Result<Complex64, PhotonStateError> {
    Ok(two_photon_amplitudes(spec, envelopes, kernel)?.get(a, b))
}

/// `R₁ = P(R,L)/P(R,R)` and `R₂ = P(R,L)/P(L,L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoincidenceRatios {
    pub r1: Ratio,
    pub r2: Ratio,
}

impl CoincidenceRatios {
    pub fn from_amplitudes(amps: &TwoPhotonAmplitudes) -> Result<Self, PhotonStateError> {
        let rl = amps.get(Port::Right, Port::Left);
        Ok(CoincidenceRatios {
            r1: Ratio::from_amplitudes(rl, amps.get(Port::Right, Port::Right))?,
            r2: Ratio::from_amplitudes(rl, amps.get(Port::Left, Port::Left))?,
        })
    }
}

pub fn coincidence_ratios(
    spec: &CavitySpec,
    envelopes: &[SpectralEnvelope; 2],
    kernel: &TwoPhotonKernel,
) -> Result<CoincidenceRatios, PhotonStateError> {
    CoincidenceRatios::from_amplitudes(&two_photon_amplitudes(spec, envelopes, kernel)?)
}

/// Inside one-photon coefficients `C_R(ω)`, `C_L(ω)` with
/// `∫ (|C_R|² + |C_L|²) dω = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OnePhotonCoefficients {
    grid: FrequencyGrid,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
}

impl OnePhotonCoefficients {
    pub fn new(grid: FrequencyGrid, right: Vec<Complex64>, left: Vec<Complex64>) -> Result<Self, PhotonStateError> {
        let norm = Self::raw_norm(&grid, &right, &left)?;
        if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(PhotonStateError::NotNormalized { what: "one-photon coefficients", norm });
        }
        Ok(OnePhotonCoefficients { grid, right, left })
    }

    pub fn normalized(grid: FrequencyGrid, right: Vec<Complex64>, left: Vec<Complex64>) -> Result<Self, PhotonStateError> {
        let norm = Self::raw_norm(&grid, &right, &left)?;
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(PhotonStateError::ZeroNorm { what: "one-photon coefficients" });
        }
        let s = norm.sqrt().recip();
        Ok(OnePhotonCoefficients {
            grid,
            right: right.into_iter().map(|v| v * s).collect(),
            left: left.into_iter().map(|v| v * s).collect(),
        })
    }

    fn raw_norm(grid: &FrequencyGrid, right: &[Complex64], left: &[Complex64]) -> Result<f64, PhotonStateError> {
        if right.len() != grid.len() || left.len() != grid.len() {
            return Err(PhotonStateError::LengthMismatch {
                expected: grid.len(),
                found: if right.len() != grid.len() { right.len() } else { left.len() },
            });
        }
        let mags: Vec<f64> = right.iter().zip(left).map(|(r, l)| r.norm_sqr() + l.norm_sqr()).collect();
        grid.integrate_real(&mags)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn right(&self) -> &[Complex64] {
        &self.right
    }

    pub fn left(&self) -> &[Complex64] {
        &self.left
    }

    /// Per-point vectors `K(ω) = (C_R, C_L)`.
    pub fn vectors(&self) -> Vec<[Complex64; 2]> {
        self.right.iter().zip(&self.left).map(|(&r, &l)| [r, l]).collect()
    }
}

/// Integrand of `⟨F_a(η); Out|φ⟩` at one frequency.
pub fn one_photon_integrand(
    factors: &PropagationFactors,
    port: Port,
    eta: Complex64,
    right: Complex64,
    left: Complex64,
) -> Complex64 {
    let mg = factors.metric_rows();
    let a = port.index();
    eta.conj() * (mg.get(a, 0) * right + mg.get(a, 1) * left)
}

/// `⟨F_a(η); Out|φ⟩ = ∫ η_a*(ω) [M(ω)G(ω)]_{ai} K_i(ω) dω`.
pub fn one_photon_amplitude(
    spec: &CavitySpec,
    port: Port,
    envelope: &SpectralEnvelope,
    coeffs: &OnePhotonCoefficients,
) -> Result<Complex64, PhotonStateError> {
    let grid = coeffs.grid();
    if envelope.grid() != grid {
        return Err(PhotonStateError::GridMismatch);
    }
    let norm = envelope.norm_squared();
    if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(PhotonStateError::NotNormalized { what: "envelope", norm });
    }
    let factors = factors_on_grid(spec, grid)?;
    let samples: Vec<Complex64> = factors
        .iter()
        .enumerate()
        .map(|(p, f)| one_photon_integrand(f, port, envelope.values()[p], coeffs.right[p], coeffs.left[p]))
        .collect();
    grid.integrate(&samples)
}

/// One-photon outside statistics: `𝓡 = P(R)/P(L)`, `p_r = 𝓡/(1+𝓡)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OnePhotonDistribution {
    pub ratio: Ratio,
    pub p_r: f64,
    pub p_l: f64,
}

impl OnePhotonDistribution {
    pub fn from_ratio(ratio: Ratio) -> Self {
        match ratio {
            Ratio::Finite(v) => OnePhotonDistribution { ratio, p_r: v / (1.0 + v), p_l: 1.0 / (1.0 + v) },
            Ratio::Infinite => OnePhotonDistribution { ratio, p_r: 1.0, p_l: 0.0 },
        }
    }

    pub fn from_amplitudes(right: Complex64, left: Complex64) -> Result<Self, PhotonStateError> {
        Ok(Self::from_ratio(Ratio::from_amplitudes(right, left)?))
    }
}

pub fn one_photon_distribution(
    spec: &CavitySpec,
    envelopes: &[SpectralEnvelope; 2],
    coeffs: &OnePhotonCoefficients,
) -> Result<OnePhotonDistribution, PhotonStateError> {
    let right = one_photon_amplitude(spec, Port::Right, &envelopes[0], coeffs)?;
    let left = one_photon_amplitude(spec, Port::Left, &envelopes[1], coeffs)?;
    OnePhotonDistribution::from_amplitudes(right, left)
}
