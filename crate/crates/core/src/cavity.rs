//! Frequency-dependent matrices of a planar two-mirror cavity.
//!
//! Operators are grouped in doublets: incident `a = (a_R, c_L)`, inside
//! `b = (b_R, b_L)` and outside `c = (c_R, a_L)`. The matrices relate them
//! as `b = B a`, `c = C a`, `c = M b`, and the inside commutators are
//! `[b_i, b_j†] = G_ij` with `G = B B†`.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::ModeMatrix;
use crate::mirror::{MirrorCoefficients, PowerReflectance};

/// Below this modulus `D(ω)` is flagged as resonant.
pub const RESONANCE_FLAG_THRESHOLD: f64 = 1e-12;

/// `D(ω)` is never inverted below this modulus.
pub const MIN_INVERTIBLE_DENOMINATOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    #[error("length_over_c must be finite and > 0, got {0}")]
    InvalidLength(f64),
    #[error("round-trip denominator vanishes at phase x = {x} (|D| = {modulus:e})")]
    ResonanceSingular { x: f64, modulus: f64 },
    #[error("mirror {mirror} has zero transmission; inside-to-outside map is singular")]
    ZeroTransmission { mirror: u8 },
    #[error("linewidth undefined for |r1 r2| = 0")]
    UndefinedLinewidth,
}

/// `1 − r₁ r₂ e^{2ix}` with a resonance flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundTripDenominator {
    pub value: Complex64,
    pub near_resonance: bool,
}

/// A frequency and the single-pass phase it accumulates between the mirrors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub omega: f64,
    /// `ω l / c`
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    mirror1: MirrorCoefficients,
    mirror2: MirrorCoefficients,
    length_over_c: f64,
}

impl CavitySpec {
    pub fn new(
        mirror1: MirrorCoefficients,
        mirror2: MirrorCoefficients,
        length_over_c: f64,
    ) -> Result<Self, CavityError> {
        if !(length_over_c.is_finite() && length_over_c > 0.0) {
            return Err(CavityError::InvalidLength(length_over_c));
        }
        Ok(CavitySpec { mirror1, mirror2, length_over_c })
    }

    /// Two identical mirrors in the `t = i√(1−R)`, `r = −√R` convention.
    pub fn symmetric(reflectance: PowerReflectance, length_over_c: f64) -> Result<Self, CavityError> {
        let m = MirrorCoefficients::from_power_reflectance(reflectance);
        Self::new(m, m, length_over_c)
    }

    pub fn mirror1(&self) -> &MirrorCoefficients {
        &self.mirror1
    }

    pub fn mirror2(&self) -> &MirrorCoefficients {
        &self.mirror2
    }

    pub fn length_over_c(&self) -> f64 {
        self.length_over_c
    }

    pub fn phase(&self, omega: f64) -> PhasePoint {
        PhasePoint { omega, x: omega * self.length_over_c }
    }

    pub fn round_trip_denominator(&self, omega: f64) -> RoundTripDenominator {
        self.denominator_at_phase(self.phase(omega).x)
    }

    pub fn denominator_at_phase(&self, x: f64) -> RoundTripDenominator {
        // D = (1 − |q|) + |q|(1 − e^{iθ}) with q = r₁r₂e^{2ix} = |q|e^{iθ}; both parts
        // are free of cancellation near resonance
        let q = self.mirror1.r() * self.mirror2.r();
        let modulus = q.norm();
        let theta = q.arg() + 2.0 * x;
        let half = (0.5 * theta).sin();
        let gap = self.loss_factor() / (1.0 + modulus);
        let value = Complex64::new(gap + 2.0 * modulus * half * half, -modulus * theta.sin());
        RoundTripDenominator { value, near_resonance: value.norm() < RESONANCE_FLAG_THRESHOLD }
    }

    /// `1 − |r₁r₂|² = |t₁|² + |r₁|²|t₂|²`.
    fn loss_factor(&self) -> f64 {
        let t1 = self.mirror1.t().norm_sqr();
        let t2 = self.mirror2.t().norm_sqr();
        t1 + self.mirror1.r().norm_sqr() * t2
    }

    /// `det G = |t₁t₂|²/|D|²`.
    pub fn metric_determinant_at_phase(&self, x: f64) -> Result<f64, CavityError> {
        let d = self.checked_denominator(x)?;
        Ok((self.mirror1.t() * self.mirror2.t()).norm_sqr() / d.norm_sqr())
    }

    /// `G⁻¹ = adj(G)/det G` with the determinant in closed form.
    pub fn metric_inverse(&self, omega: f64) -> Result<ModeMatrix, CavityError> {
        self.metric_inverse_at_phase(self.phase(omega).x)
    }

    pub fn metric_inverse_at_phase(&self, x: f64) -> Result<ModeMatrix, CavityError> {
        let g = self.commutator_metric_at_phase(x)?;
        let det = self.metric_determinant_at_phase(x)?;
        if det == 0.0 {
            return Err(CavityError::ZeroTransmission { mirror: if self.mirror1.t().norm() == 0.0 { 1 } else { 2 } });
        }
        let inv = Complex64::new(det.recip(), 0.0);
        Ok(ModeMatrix::from_entries([
            [g.get(1, 1) * inv, -g.get(0, 1) * inv],
            [-g.get(1, 0) * inv, g.get(0, 0) * inv],
        ]))
    }

    fn checked_denominator(&self, x: f64) -> Result<Complex64, CavityError> {
        let d = self.denominator_at_phase(x).value;
        if d.norm() < MIN_INVERTIBLE_DENOMINATOR {
            Err(CavityError::ResonanceSingular { x, modulus: d.norm() })
        } else {
            Ok(d)
        }
    }

    /// `B(ω)`: incident → inside.
    pub fn inside_matrix(&self, omega: f64) -> Result<ModeMatrix, CavityError> {
        self.inside_matrix_at_phase(self.phase(omega).x)
    }

    pub fn inside_matrix_at_phase(&self, x: f64) -> Result<ModeMatrix, CavityError> {
        let d = self.checked_denominator(x)?;
        let e = Complex64::from_polar(1.0, x);
        let b11 = self.mirror1.t() / d;
        let b22 = self.mirror2.t() / d;
        Ok(ModeMatrix::from_entries([
            [b11, self.mirror1.r() * e * b22],
            [self.mirror2.r() * e * b11, b22],
        ]))
    }

    /// `C(ω)`: incident → outside. Unitary.
    pub fn outside_matrix(&self, omega: f64) -> Result<ModeMatrix, CavityError> {
        self.outside_matrix_at_phase(self.phase(omega).x)
    }

    pub fn outside_matrix_at_phase(&self, x: f64) -> Result<ModeMatrix, CavityError> {
        let d = self.checked_denominator(x)?;
        let (r1, t1) = (self.mirror1.r(), self.mirror1.t());
        let (r2, t2) = (self.mirror2.r(), self.mirror2.t());
        let forward = Complex64::from_polar(1.0, x);
        let backward = forward.conj();
        let diag = t1 * t2 / d;
        // only e^{2i arg t} enters, so the principal branch is as good as any
        let c12 = (r2 * backward + r1 * Complex64::from_polar(1.0, x + 2.0 * t2.arg())) / d;
        let c21 = (r1 * backward + r2 * Complex64::from_polar(1.0, x + 2.0 * t1.arg())) / d;
        Ok(ModeMatrix::from_entries([[diag, c12], [c21, diag]]))
    }

    /// `M(ω) = C B⁻¹`: inside → outside. Not unitary once either mirror reflects.
    pub fn inside_to_outside_matrix(&self, omega: f64) -> Result<ModeMatrix, CavityError> {
        self.inside_to_outside_matrix_at_phase(self.phase(omega).x)
    }

    pub fn inside_to_outside_matrix_at_phase(&self, x: f64) -> Result<ModeMatrix, CavityError> {
        let (r1, t1) = (self.mirror1.r(), self.mirror1.t());
        let (r2, t2) = (self.mirror2.r(), self.mirror2.t());
        if t1.norm() == 0.0 {
            return Err(CavityError::ZeroTransmission { mirror: 1 });
        }
        if t2.norm() == 0.0 {
            return Err(CavityError::ZeroTransmission { mirror: 2 });
        }
        let backward = Complex64::from_polar(1.0, -x);
        Ok(ModeMatrix::from_entries([
            [t2.conj().inv(), r2 / t2 * backward],
            [r1 / t1 * backward, t1.conj().inv()],
        ]))
    }

    /// `G(ω) = B B†`, the inside commutator metric, in closed form.
    pub fn commutator_metric(&self, omega: f64) -> Result<ModeMatrix, CavityError> {
        self.commutator_metric_at_phase(self.phase(omega).x)
    }

    pub fn commutator_metric_at_phase(&self, x: f64) -> Result<ModeMatrix, CavityError> {
        let d = self.checked_denominator(x)?;
        let d2 = d.norm_sqr();
        let r1 = self.mirror1.r();
        let r2 = self.mirror2.r();
        let forward = Complex64::from_polar(1.0, x);
        let (t1, t2) = (self.mirror1.t().norm_sqr(), self.mirror2.t().norm_sqr());
        let diag = Complex64::new(self.loss_factor() / d2, 0.0);
        let off = (r1 * forward * t2 + r2.conj() * forward.conj() * t1) / d2;
        Ok(ModeMatrix::from_entries([[diag, off], [off.conj(), diag]]))
    }

    /// Inverse photon flight time, `(c/l)(1 − |r₁r₂|)/(2|r₁r₂|^{1/2})`, in rad/s.
    pub fn cavity_linewidth(&self) -> Result<f64, CavityError> {
        let rr = (self.mirror1.r() * self.mirror2.r()).norm();
        if rr == 0.0 {
            return Err(CavityError::UndefinedLinewidth);
        }
        Ok((1.0 - rr) / (2.0 * rr.sqrt()) / self.length_over_c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym(big_r: f64) -> CavitySpec {
        CavitySpec::symmetric(PowerReflectance::new(big_r).unwrap(), 1.0).unwrap()
    }

    fn lossless(big_r: f64, phase: f64) -> MirrorCoefficients {
        MirrorCoefficients::validate(
            Complex64::from_polar(big_r.sqrt(), phase),
            Complex64::from_polar((1.0 - big_r).sqrt(), phase + PI / 2.0),
        )
        .unwrap()
    }

    fn arb_spec() -> impl Strategy<Value = CavitySpec> {
        (0.0..0.99f64, -4.0..4.0f64, 0.0..0.99f64, -4.0..4.0f64, 0.1..3.0f64).prop_map(|(a, pa, b, pb, l)| {
            CavitySpec::new(lossless(a, pa), lossless(b, pb), l).unwrap()
        })
    }

    #[test]
    fn rejects_bad_length() {
        let m = MirrorCoefficients::from_power_reflectance(PowerReflectance::new(0.1).unwrap());
        assert_eq!(CavitySpec::new(m, m, 0.0), Err(CavityError::InvalidLength(0.0)));
        assert!(CavitySpec::new(m, m, f64::NAN).is_err());
    }

    #[test]
    fn empty_cavity() {
        let spec = sym(0.0);
        let d = spec.round_trip_denominator(1.3);
        assert_eq!(d.value, c(1.0, 0.0));
        assert!(!d.near_resonance);
        let b = spec.inside_matrix(1.3).unwrap();
        assert!(b.distance(&ModeMatrix::identity().scale(c(0.0, 1.0))) < 1e-15);
        let cm = spec.outside_matrix(1.3).unwrap();
        assert!(cm.distance(&ModeMatrix::identity().scale(c(-1.0, 0.0))) < 1e-15);
        let m = spec.inside_to_outside_matrix(1.3).unwrap();
        assert!(m.distance(&ModeMatrix::identity().scale(c(0.0, 1.0))) < 1e-15);
        assert!((m * m.adjoint()).distance_from_identity() < 1e-15);
        assert!(spec.commutator_metric(1.3).unwrap().distance_from_identity() < 1e-15);
    }

    #[test]
    fn denominator_examples() {
        let d = sym(0.5).denominator_at_phase(PI / 2.0).value;
        assert!((d - c(1.5, 0.0)).norm() < 1e-15);
        for &(big_r, x) in &[(0.3, 0.2), (0.9, 1.7), (0.5, 3.0)] {
            let d = sym(big_r).denominator_at_phase(x).value;
            let closed = 1.0 - 2.0 * big_r * (2.0 * x).cos() + big_r * big_r;
            assert!((d.norm_sqr() - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn resonance_flagged_and_guarded() {
        // |r| = 1 mirrors at resonance: r1 r2 e^{2ix} = 1
        let m = MirrorCoefficients::validate(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let spec = CavitySpec::new(m, m, 1.0).unwrap();
        let d = spec.denominator_at_phase(0.0);
        assert!(d.near_resonance);
        assert!(matches!(spec.inside_matrix(0.0), Err(CavityError::ResonanceSingular { .. })));
        assert_eq!(spec.inside_to_outside_matrix(0.3), Err(CavityError::ZeroTransmission { mirror: 1 }));
    }

    #[test]
    fn inside_matrix_symmetric_point() {
        let b = sym(0.5).inside_matrix(0.0).unwrap();
        // t/D = i√0.5 / 0.5
        assert!((b.get(0, 0) - c(0.0, 2f64.sqrt())).norm() < 1e-14);
        assert!(b.determinant().norm() > 0.0);
    }

    #[test]
    fn inside_to_outside_not_unitary() {
        let m = sym(0.4).inside_to_outside_matrix(0.7).unwrap();
        assert!((m * m.adjoint()).distance_from_identity() > 0.1);
    }

    #[test]
    fn symmetric_metric_matches_delta_rho() {
        for &(big_r, x) in &[(0.5, 0.0), (0.2, 1.1), (0.95, 2.9)] {
            let g = sym(big_r).commutator_metric_at_phase(x).unwrap();
            let delta = (1.0 - big_r * big_r) / (1.0 - 2.0 * big_r * (2.0 * x).cos() + big_r * big_r);
            let rho = -2.0 * big_r.sqrt() / (1.0 + big_r) * x.cos();
            assert!((g.get(0, 0) - c(delta, 0.0)).norm() < 1e-13 * delta);
            assert!((g.get(0, 1) - c(rho * delta, 0.0)).norm() < 1e-13 * delta);
        }
        let g = sym(0.5).commutator_metric(0.0).unwrap();
        assert!((g.get(0, 0).re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn linewidth() {
        let spec = sym(0.81);
        assert!((spec.cavity_linewidth().unwrap() - 0.19 / 1.8).abs() < 1e-15);
        assert_eq!(sym(0.0).cavity_linewidth(), Err(CavityError::UndefinedLinewidth));
        let near_perfect = sym(1.0 - 1e-12).cavity_linewidth().unwrap();
        assert!(near_perfect < 1e-11);
        let mut previous = f64::INFINITY;
        for k in 1..1000 {
            let rr = k as f64 / 1000.0;
            let gamma = sym(rr).cavity_linewidth().unwrap();
            assert!(gamma < previous);
            previous = gamma;
        }
    }

    proptest! {
        #[test]
        fn outside_matrix_unitary(spec in arb_spec(), omega in 0.0..10.0f64) {
            let cm = spec.outside_matrix(omega).unwrap();
            prop_assert!((cm * cm.adjoint()).distance_from_identity() < 1e-12);
            prop_assert!((cm.get(0,0).norm_sqr() + cm.get(0,1).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn metric_is_b_b_dagger(spec in arb_spec(), omega in 0.0..10.0f64) {
            let b = spec.inside_matrix(omega).unwrap();
            let g = spec.commutator_metric(omega).unwrap();
            prop_assert!(g.distance(&(b * b.adjoint())) <= 1e-12 * g.frobenius_norm());
            prop_assert_eq!(g.get(0, 0).im, 0.0);
        }

        #[test]
        fn m_times_b_is_c(spec in arb_spec(), omega in 0.0..10.0f64) {
            let b = spec.inside_matrix(omega).unwrap();
            let cm = spec.outside_matrix(omega).unwrap();
            let m = spec.inside_to_outside_matrix(omega).unwrap();
            prop_assert!((m * b).distance(&cm) < 1e-12);
        }

        #[test]
        fn stable_denominator_matches_direct_form(spec in arb_spec(), x in -7.0..7.0f64) {
            let direct = c(1.0, 0.0) - spec.mirror1().r() * spec.mirror2().r() * Complex64::from_polar(1.0, 2.0 * x);
            prop_assert!((spec.denominator_at_phase(x).value - direct).norm() < 1e-14);
        }

        #[test]
        fn closed_form_determinant(spec in arb_spec(), x in 0.0..6.3f64) {
            let g = spec.commutator_metric_at_phase(x).unwrap();
            let det = spec.metric_determinant_at_phase(x).unwrap();
            let numeric = g.determinant();
            prop_assert!(numeric.im.abs() < 1e-9 * g.frobenius_norm().powi(2));
            prop_assert!((numeric.re - det).abs() <= 1e-9 * g.frobenius_norm().powi(2), "{} vs {det}", numeric.re);
        }

        #[test]
        fn metric_identities(spec in arb_spec(), omega in 0.0..10.0f64) {
            let g = spec.commutator_metric(omega).unwrap();
            let m = spec.inside_to_outside_matrix(omega).unwrap();
            // rounding of G alone is amplified by ‖M‖² in the product
            let bound = 1e-12f64.max(8.0 * f64::EPSILON * m.frobenius_norm().powi(2) * g.frobenius_norm());
            prop_assert!((m * g * m.adjoint()).distance_from_identity() < bound);
            let g_inv = spec.metric_inverse(omega).unwrap();
            prop_assert!((m.adjoint() * m).distance(&g_inv) < 1e-10);
            prop_assert!((g * g_inv).distance_from_identity() < bound);
        }

        #[test]
        fn photon_number_not_conserved(big_r in 0.05..0.99f64, x in 0.0..6.28f64) {
            let g = sym(big_r).commutator_metric_at_phase(x).unwrap();
            let g_inv = g.inverse().unwrap();
            // G⁻¹ ≠ I, so some basis vector witnesses v†G⁻¹v ≠ v†v
            let witnesses = [[c(1.0, 0.0), c(0.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(-1.0, 0.0)]];
            let max_gap = witnesses
                .iter()
                .map(|v| (g_inv.quadratic_form(v).re - (v[0].norm_sqr() + v[1].norm_sqr())).abs())
                .fold(0.0, f64::max);
            prop_assert!(max_gap > 1e-6);
        }
    }
}
