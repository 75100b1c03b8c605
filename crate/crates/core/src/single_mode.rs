//! Single-mode two-photon states in a symmetric cavity (`r₁ = r₂ = −√R`).
//!
//! A state is the triple `(C_RR, C_RL, C_LL)` of emission amplitudes for both
//! photons right-going, one each way, and both left-going.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use thiserror::Error;

use crate::cavity::{CavityError, CavitySpec};
use crate::linalg::ModeMatrix;
use crate::mirror::PowerReflectance;
use crate::photon_states::{
    amplitude_matrix_from_factors, pair_weight, CoincidenceRatios, OutcomeDistribution, PhotonStateError,
    Port, PropagationFactors, Ratio, TwoPhotonAmplitudes,
};

/// Tolerance on `|C_RR|² + |C_RL|² + |C_LL|² = 1`.
pub const STATE_NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SingleModeError {
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("pole/zero structure needs R > 0")]
    NoResonance,
    #[error(transparent)]
    PhotonState(#[from] PhotonStateError),
    #[error(transparent)]
    Cavity(#[from] CavityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeState {
    pub c_rr: Complex64,
    pub c_rl: Complex64,
    pub c_ll: Complex64,
}

impl SingleModeState {
    pub fn new(c_rr: Complex64, c_rl: Complex64, c_ll: Complex64) -> Result<Self, SingleModeError> {
        let s = SingleModeState { c_rr, c_rl, c_ll };
        let norm = s.norm_squared();
        if !((norm - 1.0).abs() <= STATE_NORM_TOLERANCE) {
            return Err(SingleModeError::NotNormalized { norm });
        }
        Ok(s)
    }

    pub fn normalized(c_rr: Complex64, c_rl: Complex64, c_ll: Complex64) -> Result<Self, SingleModeError> {
        let norm = SingleModeState { c_rr, c_rl, c_ll }.norm_squared();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(SingleModeError::ZeroNorm);
        }
        let s = norm.sqrt().recip();
        Ok(SingleModeState { c_rr: c_rr * s, c_rl: c_rl * s, c_ll: c_ll * s })
    }

    /// The state with `C_RR = C_LL = ζ C_RL`, `ζ = z e^{iy}`.
    pub fn zeta(y: f64, z: ZetaModulus) -> Self {
        match z {
            ZetaModulus::Finite(z) => {
                let c_rl = (1.0 + 2.0 * z * z).sqrt().recip();
                let c = Complex64::from_polar(z * c_rl, y);
                SingleModeState { c_rr: c, c_rl: Complex64::new(c_rl, 0.0), c_ll: c }
            }
            ZetaModulus::Infinite => {
                let c = Complex64::from_polar(FRAC_1_SQRT_2, y);
                SingleModeState { c_rr: c, c_rl: Complex64::new(0.0, 0.0), c_ll: c }
            }
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.c_rr.norm_sqr() + self.c_rl.norm_sqr() + self.c_ll.norm_sqr()
    }

    /// `K̄ = [[C_RR/√2, C_RL/2], [C_RL/2, C_LL/√2]]`.
    pub fn barred_kernel(&self) -> ModeMatrix {
        let half = 0.5 * self.c_rl;
        ModeMatrix::from_entries([[self.c_rr * FRAC_1_SQRT_2, half], [half, self.c_ll * FRAC_1_SQRT_2]])
    }
}

/// Orthonormal single-mode basis diagonalizing the two-photon Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    Plus,
    Zero,
    Minus,
}

impl BasisState {
    pub const ALL: [BasisState; 3] = [BasisState::Plus, BasisState::Zero, BasisState::Minus];

    pub fn state(self) -> SingleModeState {
        let r = |v: f64| Complex64::new(v, 0.0);
        match self {
            BasisState::Plus => SingleModeState { c_rr: r(0.5), c_rl: r(FRAC_1_SQRT_2), c_ll: r(0.5) },
            BasisState::Zero => SingleModeState { c_rr: r(-FRAC_1_SQRT_2), c_rl: r(0.0), c_ll: r(FRAC_1_SQRT_2) },
            BasisState::Minus => SingleModeState { c_rr: r(0.5), c_rl: r(-FRAC_1_SQRT_2), c_ll: r(0.5) },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisState::Plus => "n+",
            BasisState::Zero => "n0",
            BasisState::Minus => "n-",
        }
    }
}

/// `(|n₊⟩, |n₀⟩, |n₋⟩)`.
pub fn basis_states() -> [SingleModeState; 3] {
    BasisState::ALL.map(BasisState::state)
}

/// `|ζ|`, possibly infinite (only `C_RR = C_LL` emission).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZetaModulus {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaParams {
    pub reflectance: PowerReflectance,
    /// round-trip half phase `ωl/c`
    pub x: f64,
    /// `arg ζ`
    pub y: f64,
    pub z: ZetaModulus,
}

fn symmetric_factors(reflectance: PowerReflectance, x: f64) -> Result<PropagationFactors, CavityError> {
    let spec = CavitySpec::symmetric(reflectance, 1.0)?;
    PropagationFactors::at_phase(&spec, x)
}

fn alpha(reflectance: PowerReflectance, x: f64) -> Complex64 {
    Complex64::from_polar(-reflectance.value().sqrt(), x)
}

/// `𝓡 = P(R,L)/P(R,R)` for a single-mode state:
/// `|[√2(C_RR + C_LL)α + C_RL(1 + α²)] / [C_RR + C_LL α² + √2 C_RL α]|²`, `α = −√R e^{ix}`.
pub fn ratio_single_mode(state: &SingleModeState, reflectance: PowerReflectance, x: f64) -> Result<Ratio, SingleModeError> {
    let a = alpha(reflectance, x);
    let a2 = a * a;
    let num = SQRT_2 * (state.c_rr + state.c_ll) * a + state.c_rl * (1.0 + a2);
    let den = state.c_rr + state.c_ll * a2 + SQRT_2 * state.c_rl * a;
    Ok(Ratio::from_amplitudes(num, den)?)
}

/// `1 + 2R cos 2x + R² = |1 + R e^{2ix}|²`.
fn resonance_weight(big_r: f64, x: f64) -> f64 {
    1.0 + 2.0 * big_r * (2.0 * x).cos() + big_r * big_r
}

/// Coefficients `[z², z, 1]` of the numerator and denominator of the ζ-form ratio:
/// `8Rz² − 4√(2R)[cos(x+y) + R cos(x−y)] z + (1 + 2R cos 2x + R²)` over
/// `(1 + 2R cos 2x + R²) z² − 2√(2R)[cos(x−y) + R cos(x+y)] z + 2R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaQuadratics {
    pub numerator: [f64; 3],
    pub denominator: [f64; 3],
}

impl ZetaQuadratics {
    pub fn new(reflectance: PowerReflectance, x: f64, y: f64) -> Self {
        let big_r = reflectance.value();
        let w = resonance_weight(big_r, x);
        let s = (2.0 * big_r).sqrt();
        ZetaQuadratics {
            numerator: [8.0 * big_r, -4.0 * s * ((x + y).cos() + big_r * (x - y).cos()), w],
            denominator: [w, -2.0 * s * ((x - y).cos() + big_r * (x + y).cos()), 2.0 * big_r],
        }
    }

    pub fn eval(&self, z: f64) -> (f64, f64) {
        let q = |c: &[f64; 3]| (c[0] * z + c[1]) * z + c[2];
        (q(&self.numerator), q(&self.denominator))
    }
}

/// Ratio for `C_RR = C_LL = ζ C_RL`.
///
/// The quadratics of [`ZetaQuadratics`] are the squared moduli
/// `|2√2 ζα + 1 + α²|²` and `|ζ(1 + α²) + √2 α|²` with `α = −√R e^{ix}`;
/// evaluating them in that form avoids cancellation near zeros and poles.
pub fn ratio_zeta_form(p: &ZetaParams) -> Result<Ratio, SingleModeError> {
    let ZetaModulus::Finite(z) = p.z else {
        return Ok(limit_large_z(p.reflectance, p.x));
    };
    let a = alpha(p.reflectance, p.x);
    let zeta = Complex64::from_polar(z, p.y);
    let one_plus = 1.0 + a * a;
    let num = 2.0 * SQRT_2 * zeta * a + one_plus;
    let den = zeta * one_plus + SQRT_2 * a;
    Ok(Ratio::from_amplitudes(num, den)?)
}

/// `𝓡₀ = (1 + 2R cos 2x + R²)/(2R)`; infinite for `R = 0`.
pub fn limit_small_z(reflectance: PowerReflectance, x: f64) -> Ratio {
    let big_r = reflectance.value();
    // numerator ≥ (1 − R)² > 0, so the quotient is never 0/0
    Ratio::from_quotient(resonance_weight(big_r, x), 2.0 * big_r).unwrap_or(Ratio::Infinite)
}

/// `𝓡_∞ = 8R/(1 + 2R cos 2x + R²)`; zero for `R = 0`.
pub fn limit_large_z(reflectance: PowerReflectance, x: f64) -> Ratio {
    let big_r = reflectance.value();
    Ratio::Finite(8.0 * big_r / resonance_weight(big_r, x))
}

/// `F = √(2R)/(1 + R)`.
pub fn resonance_f(reflectance: PowerReflectance) -> f64 {
    let big_r = reflectance.value();
    (2.0 * big_r).sqrt() / (1.0 + big_r)
}

/// Parity of the resonance order `N` in `x = πN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `(−1)^N`
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Ratio at `x = πN`:
/// `[4F²z² − (−1)^N 4Fz cos y + 1] / [z² − (−1)^N 2Fz cos y + F²]`.
///
/// Both quadratics are evaluated as `|2Fz − (−1)^N e^{iy}|²` and
/// `|z − (−1)^N F e^{iy}|²`, which keeps the pole at `z = F` exact.
pub fn resonance_ratio(
    reflectance: PowerReflectance,
    z: ZetaModulus,
    y: f64,
    parity: Parity,
) -> Result<Ratio, SingleModeError> {
    let f = resonance_f(reflectance);
    let ZetaModulus::Finite(z) = z else {
        return Ok(Ratio::Finite(4.0 * f * f));
    };
    let e = Complex64::from_polar(parity.sign(), y);
    let num = 2.0 * f * z - e;
    let den = z - f * e;
    Ok(Ratio::from_amplitudes(num, den)?)
}

/// Zeros and poles of the resonance ratio in the complex `z` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceShape {
    pub f: f64,
    /// `z^u_± = −e^{±iy}/(2F)`
    pub zeros: [Complex64; 2],
    /// `z^d_± = −F e^{±iy}`
    pub poles: [Complex64; 2],
    y: f64,
}

impl ResonanceShape {
    /// The real positive (pole, zero) pair, present only for `y ≡ π (mod 2π)`.
    pub fn real_positive_pair(&self) -> Option<(f64, f64)> {
        let offset = (self.y - PI).rem_euclid(2.0 * PI);
        let distance = offset.min(2.0 * PI - offset);
        (distance <= 1e-12).then(|| (self.f, 0.5 / self.f))
    }
}

pub fn pole_zero(reflectance: PowerReflectance, y: f64) -> Result<ResonanceShape, SingleModeError> {
    let f = resonance_f(reflectance);
    if f == 0.0 {
        return Err(SingleModeError::NoResonance);
    }
    let plus = Complex64::from_polar(1.0, y);
    let minus = plus.conj();
    Ok(ResonanceShape {
        f,
        zeros: [-plus / (2.0 * f), -minus / (2.0 * f)],
        poles: [-plus * f, -minus * f],
        y,
    })
}

/// `P(R,L) = 𝓡/(2 + 𝓡)`, `P(R,R) = P(L,L) = 1/(2 + 𝓡)`.
pub fn distribution_symmetric(ratio: Ratio) -> OutcomeDistribution {
    match ratio {
        Ratio::Finite(v) => {
            let side = 1.0 / (2.0 + v);
            OutcomeDistribution { p_rr: side, p_rl: 1.0 - 2.0 * side, p_ll: side }
        }
        Ratio::Infinite => OutcomeDistribution { p_rr: 0.0, p_rl: 1.0, p_ll: 0.0 },
    }
}

/// All outside pair amplitudes `2(2^{−1/2})^{δ_ab} [M G K̄ Gᵀ Mᵀ]_ab`.
pub fn single_mode_amplitudes(
    state: &SingleModeState,
    reflectance: PowerReflectance,
    x: f64,
) -> Result<TwoPhotonAmplitudes, SingleModeError> {
    let f = symmetric_factors(reflectance, x)?;
    let p = amplitude_matrix_from_factors(&f, &f, &state.barred_kernel());
    let ports = [Port::Right, Port::Left];
    let values = ports.map(|a| ports.map(|b| pair_weight(a, b) * p.get(a.index(), b.index())));
    Ok(TwoPhotonAmplitudes { values })
}

pub fn single_mode_amplitude(
    state: &SingleModeState,
    reflectance: PowerReflectance,
    x: f64,
    a: Port,
    b: Port,
) -> Result<Complex64, SingleModeError> {
    Ok(single_mode_amplitudes(state, reflectance, x)?.get(a, b))
}

/// Both coincidence ratios of a single-mode state.
pub fn single_mode_ratios(
    state: &SingleModeState,
    reflectance: PowerReflectance,
    x: f64,
) -> Result<CoincidenceRatios, SingleModeError> {
    Ok(CoincidenceRatios::from_amplitudes(&single_mode_amplitudes(state, reflectance, x)?)?)
}
