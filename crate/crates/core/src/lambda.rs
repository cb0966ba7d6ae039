//! The Λ-system → photon-field channel.
//!
//! A qubit stored in the ground pair `{|1⟩, |2⟩}` is mapped by a short
//! resonant two-field pulse `U` (3×2) into the three atomic levels. The
//! excited level `|3⟩` then decays, emitting a photon on either the 3→1 or
//! 3→2 line, which is the isometry `V: atom → atom ⊗ field` (9×3). The
//! channel keeps only the field, spanned by `{|0⟩, |ψ13⟩, |ψ23⟩}`:
//!
//! ```text
//! W = V·U,    (ŝ_mn)_αβ = Σ_k W[(k,α), m] · conj(W[(k,β), n])
//! ```
//!
//! Pulse convention: `Ω1 = Ω sin χ` (carrying the relative phase `e^{iφ}`)
//! drives `|2⟩↔|3⟩` and `Ω2 = Ω cos χ` drives `|1⟩↔|3⟩`, with `θ = Ωτ_p`.
//! So `χ = π/2` excites `|2⟩` and leaves `|1⟩` dark.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelMap};
use crate::linalg::ComplexMatrix;

/// Number of atomic levels.
pub const ATOM_DIM: usize = 3;
/// Number of retained field states `{|0⟩, |ψ13⟩, |ψ23⟩}`.
pub const FIELD_DIM: usize = 3;
/// Ground-pair (input) dimension.
pub const INPUT_DIM: usize = 2;

const ANGLE_SLACK: f64 = 1e-12;
const ALPHA_TOL: f64 = 1e-12;

pub const FIELD_LABELS: [&str; FIELD_DIM] = ["0", "psi13", "psi23"];
pub const ATOM_LABELS: [&str; ATOM_DIM] = ["1", "2", "3"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LambdaError {
    #[error("invalid angle {name} = {value}: {reason}")]
    InvalidAngle {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid branching ratios alpha1 = {alpha1}, alpha2 = {alpha2}")]
    InvalidAlphas { alpha1: f64, alpha2: f64 },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

impl LambdaError {
    /// Name of the offending parameter, when there is one.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Self::InvalidAngle { name, .. } | Self::InvalidParameter { name, .. } => Some(name),
            Self::InvalidAlphas { .. } => Some("gamma13/gamma23"),
            Self::Channel(_) => None,
        }
    }
}

/// Physical and control parameters of one channel use.
///
/// `gamma_t` is the dimensionless elapsed decay `γt`; `f64::INFINITY`
/// stands for the fully emitted limit and maps to `e^{−γt} = 0` exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaParams {
    pub gamma13: f64,
    pub gamma23: f64,
    pub theta: f64,
    pub chi: f64,
    pub phi: f64,
    #[serde(with = "crate::extended_real")]
    pub gamma_t: f64,
    /// Raman detuning; only the two-photon resonant case is modelled.
    pub delta_r: f64,
}

impl Default for LambdaParams {
    /// Symmetric system, `θ = π`, fully emitted photon.
    fn default() -> Self {
        Self {
            gamma13: 1.0,
            gamma23: 1.0,
            theta: std::f64::consts::PI,
            chi: FRAC_PI_2,
            phi: 0.0,
            gamma_t: f64::INFINITY,
            delta_r: 0.0,
        }
    }
}

impl LambdaParams {
    pub fn validate(&self) -> Result<(), LambdaError> {
        for (name, value) in [("gamma13", self.gamma13), ("gamma23", self.gamma23)] {
            if !value.is_finite() || value < 0.0 {
                return Err(LambdaError::InvalidParameter {
                    name,
                    value,
                    reason: "decay rates must be finite and non-negative",
                });
            }
        }
        if self.gamma13 + self.gamma23 <= 0.0 {
            return Err(LambdaError::InvalidParameter {
                name: "gamma13",
                value: self.gamma13,
                reason: "total decay rate gamma13 + gamma23 must be positive",
            });
        }
        if self.gamma_t.is_nan() || self.gamma_t < 0.0 {
            return Err(LambdaError::InvalidParameter {
                name: "gamma_t",
                value: self.gamma_t,
                reason: "elapsed decay must be in [0, inf]",
            });
        }
        if self.delta_r != 0.0 {
            return Err(LambdaError::InvalidParameter {
                name: "delta_r",
                value: self.delta_r,
                reason: "only Raman resonance (delta_r = 0) is supported",
            });
        }
        check_pulse_angles(self.theta, self.chi, self.phi)
    }

    /// Branching ratios `(α1, α2) = (γ13/γ, γ23/γ)`, with `α2 = 1 − α1`.
    pub fn branching(&self) -> (f64, f64) {
        let alpha1 = self.gamma13 / (self.gamma13 + self.gamma23);
        (alpha1, 1.0 - alpha1)
    }

    /// Sets the rates so that `γ23/γ13 = asym`.
    pub fn set_asymmetry(&mut self, asym: f64) {
        self.gamma13 = 1.0;
        self.gamma23 = asym;
    }
}

fn check_pulse_angles(theta: f64, chi: f64, phi: f64) -> Result<(), LambdaError> {
    if !theta.is_finite() {
        return Err(LambdaError::InvalidAngle {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    if !phi.is_finite() {
        return Err(LambdaError::InvalidAngle {
            name: "phi",
            value: phi,
            reason: "must be finite",
        });
    }
    if !chi.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&chi) {
        return Err(LambdaError::InvalidAngle {
            name: "chi",
            value: chi,
            reason: "must lie in [0, pi/2]",
        });
    }
    Ok(())
}

/// `e^{−γt}`, exactly zero in the infinite-time limit.
pub fn survival(gamma_t: f64) -> f64 {
    if gamma_t.is_infinite() {
        0.0
    } else {
        (-gamma_t).exp()
    }
}

/// A matrix with orthonormal columns, plus the labels of its bases.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub matrix: ComplexMatrix,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

impl Isometry {
    /// `‖M†M − I‖_max`.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self.matrix.adjoint().matmul(&self.matrix);
        gram.max_abs_diff(&ComplexMatrix::identity(self.matrix.cols()))
    }

    pub fn compose(&self, first: &Isometry) -> Isometry {
        Isometry {
            matrix: self.matrix.matmul(&first.matrix),
            row_labels: self.row_labels.clone(),
            col_labels: first.col_labels.clone(),
        }
    }
}

fn atom_field_labels() -> Vec<String> {
    ATOM_LABELS
        .iter()
        .flat_map(|k| FIELD_LABELS.iter().map(move |a| format!("{k}|{a}")))
        .collect()
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Resonant two-field pulse of area `θ`, restricted to the ground pair.
///
/// Returns the first two columns of `exp(−i H τ_p)` with
/// `H = ½[Ω1 e^{iφ}|3⟩⟨2| + Ω2 |3⟩⟨1| + h.c.]`. Writing `H = ½Ω(|3⟩⟨B| + h.c.)`
/// with bright state `|B⟩ = cos χ|1⟩ + e^{−iφ} sin χ|2⟩`, the propagator is
/// `1 − (1 − cos θ/2)(|B⟩⟨B| + |3⟩⟨3|) − i sin θ/2 (|3⟩⟨B| + |B⟩⟨3|)`.
pub fn pulse_propagator(theta: f64, chi: f64, phi: f64) -> Result<Isometry, LambdaError> {
    check_pulse_angles(theta, chi, phi)?;
    let chi = chi.clamp(0.0, FRAC_PI_2);
    let bright = [
        Complex64::new(chi.cos(), 0.0),
        Complex64::from_polar(chi.sin(), -phi),
        Complex64::new(0.0, 0.0),
    ];
    let (half_sin, half_cos) = (theta / 2.0).sin_cos();
    let i = Complex64::new(0.0, 1.0);
    let mut u = ComplexMatrix::zeros(ATOM_DIM, INPUT_DIM);
    for row in 0..2 {
        for col in 0..INPUT_DIM {
            let delta = if row == col { 1.0 } else { 0.0 };
            u[(row, col)] = delta - (1.0 - half_cos) * bright[row] * bright[col].conj();
        }
    }
    for col in 0..INPUT_DIM {
        u[(2, col)] = -i * half_sin * bright[col].conj();
    }
    Ok(Isometry {
        matrix: u,
        row_labels: labels(&ATOM_LABELS),
        col_labels: labels(&ATOM_LABELS[..INPUT_DIM]),
    })
}

/// Spontaneous emission as an isometry atom → atom ⊗ field.
///
/// `|1⟩ → |1⟩|0⟩`, `|2⟩ → |2⟩|0⟩` and
/// `|3⟩ → e^{−γt/2}|3⟩|0⟩ + √(1−e^{−γt}) (√α1 |1⟩|ψ13⟩ + √α2 |2⟩|ψ23⟩)`.
/// Row index is `atom · 3 + field`.
pub fn decay_isometry(alpha1: f64, alpha2: f64, gamma_t: f64) -> Result<Isometry, LambdaError> {
    if !(alpha1 >= 0.0 && alpha2 >= 0.0) || (alpha1 + alpha2 - 1.0).abs() > ALPHA_TOL {
        return Err(LambdaError::InvalidAlphas { alpha1, alpha2 });
    }
    if gamma_t.is_nan() || gamma_t < 0.0 {
        return Err(LambdaError::InvalidParameter {
            name: "gamma_t",
            value: gamma_t,
            reason: "elapsed decay must be in [0, inf]",
        });
    }
    let e = survival(gamma_t);
    let emitted = (1.0 - e).sqrt();
    let row = |atom: usize, field: usize| atom * FIELD_DIM + field;
    let mut v = ComplexMatrix::zeros(ATOM_DIM * FIELD_DIM, ATOM_DIM);
    v[(row(0, 0), 0)] = Complex64::new(1.0, 0.0);
    v[(row(1, 0), 1)] = Complex64::new(1.0, 0.0);
    v[(row(2, 0), 2)] = Complex64::new(e.sqrt(), 0.0);
    v[(row(0, 1), 2)] = Complex64::new(emitted * alpha1.sqrt(), 0.0);
    v[(row(1, 2), 2)] = Complex64::new(emitted * alpha2.sqrt(), 0.0);
    Ok(Isometry {
        matrix: v,
        row_labels: atom_field_labels(),
        col_labels: labels(&ATOM_LABELS),
    })
}

/// Ground-pair → atom ⊗ field isometry `W = V·U`.
pub fn full_isometry(params: &LambdaParams) -> Result<Isometry, LambdaError> {
    params.validate()?;
    let (alpha1, alpha2) = params.branching();
    let u = pulse_propagator(params.theta, params.chi, params.phi)?;
    let v = decay_isometry(alpha1, alpha2, params.gamma_t)?;
    Ok(v.compose(&u))
}

/// Transfer operators of the channel, tracing the atom out of `W·ρ·W†`.
pub fn channel_map(params: &LambdaParams) -> Result<ChannelMap, LambdaError> {
    let w = full_isometry(params)?.matrix;
    let mut ops = Vec::with_capacity(INPUT_DIM * INPUT_DIM);
    for m in 0..INPUT_DIM {
        for n in 0..INPUT_DIM {
            let mut s = ComplexMatrix::zeros(FIELD_DIM, FIELD_DIM);
            for a in 0..FIELD_DIM {
                for b in 0..FIELD_DIM {
                    s[(a, b)] = (0..ATOM_DIM)
                        .map(|k| w[(k * FIELD_DIM + a, m)] * w[(k * FIELD_DIM + b, n)].conj())
                        .sum();
                }
            }
            ops.push(s);
        }
    }
    Ok(ChannelMap::new(INPUT_DIM, FIELD_DIM, ops)?)
}

/// Closed-form transfer operators for a single pulse exciting `|1⟩`.
///
/// The phase convention is the one with a `+i sin θ/2` excitation amplitude,
/// so individual elements differ from [`channel_map`] at `χ = 0` by output
/// phases while all spectra agree. The `(ψ13, 0)` element of `ŝ_11` is the
/// conjugate of `(0, ψ13)`, i.e. it carries the `sin θ` factor.
pub fn closed_form_channel(
    theta: f64,
    gamma_t: f64,
    alpha1: f64,
    alpha2: f64,
) -> Result<ChannelMap, LambdaError> {
    if !theta.is_finite() {
        return Err(LambdaError::InvalidAngle {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    // Reuse the parameter checks of the decay isometry.
    decay_isometry(alpha1, alpha2, gamma_t)?;
    let e = survival(gamma_t);
    let emitted = (1.0 - e).sqrt();
    let half_sin = (theta / 2.0).sin();
    let half_cos = (theta / 2.0).cos();
    let sin2 = half_sin * half_sin;
    let i = Complex64::new(0.0, 1.0);
    let re = |x: f64| Complex64::new(x, 0.0);

    let coherence = 0.5 * alpha1.sqrt() * emitted * theta.sin();
    let s11 = ComplexMatrix::from_rows(&[
        vec![re(half_cos * half_cos + e * sin2), -i * coherence, re(0.0)],
        vec![i * coherence, re(alpha1 * (1.0 - e) * sin2), re(0.0)],
        vec![re(0.0), re(0.0), re(alpha2 * (1.0 - e) * sin2)],
    ]);
    let mut s12 = ComplexMatrix::zeros(FIELD_DIM, FIELD_DIM);
    s12[(2, 0)] = i * alpha2.sqrt() * emitted * half_sin;
    let s21 = s12.adjoint();
    let s22 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
    Ok(ChannelMap::new(
        INPUT_DIM,
        FIELD_DIM,
        vec![s11, s12, s21, s22],
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{analyze, validate_channel, DensityMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// exp(−iH) by scaling and squaring of a Taylor series; independent of
    /// the closed-form propagator and of the eigensolver.
    fn expm_minus_i(h: &ComplexMatrix) -> ComplexMatrix {
        let n = h.rows();
        let squarings = 10;
        let a = h.scale(c(0.0, -1.0 / f64::from(1 << squarings)));
        let mut term = ComplexMatrix::identity(n);
        let mut sum = ComplexMatrix::identity(n);
        for k in 1..30 {
            term = term.matmul(&a).scale(c(1.0 / k as f64, 0.0));
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    fn propagator_oracle(theta: f64, chi: f64, phi: f64) -> ComplexMatrix {
        let (o1, o2) = (chi.sin(), chi.cos());
        let mut h = ComplexMatrix::zeros(3, 3);
        h[(2, 1)] = Complex64::from_polar(0.5 * o1, phi);
        h[(2, 0)] = c(0.5 * o2, 0.0);
        h[(1, 2)] = h[(2, 1)].conj();
        h[(0, 2)] = h[(2, 0)].conj();
        expm_minus_i(&h.scale(c(theta, 0.0)))
    }

    #[test]
    fn no_pulse_is_identity_embedding() {
        let u = pulse_propagator(0.0, 0.3, 1.1).unwrap().matrix;
        let expected = ComplexMatrix::from_rows(&[
            vec![c(1., 0.), c(0., 0.)],
            vec![c(0., 0.), c(1., 0.)],
            vec![c(0., 0.), c(0., 0.)],
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn pi_pulse_at_right_angle_excites_level_two() {
        let u = pulse_propagator(PI, FRAC_PI_2, 0.0).unwrap().matrix;
        let expected = ComplexMatrix::from_rows(&[
            vec![c(1., 0.), c(0., 0.)],
            vec![c(0., 0.), c(0., 0.)],
            vec![c(0., 0.), c(0., -1.)],
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn pi_pulse_at_quarter_angle_keeps_dark_state() {
        let u = pulse_propagator(PI, PI / 4.0, 0.0).unwrap().matrix;
        let col = u.column(0);
        let expected = [c(0.5, 0.), c(-0.5, 0.), c(0., -FRAC_1_SQRT_2)];
        for (a, b) in col.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn propagator_matches_matrix_exponential() {
        for &theta in &[0.0, 0.4, PI / 2.0, PI, 2.5, 2.0 * PI, 7.0] {
            for &chi in &[0.0, 0.2, PI / 4.0, 1.3, FRAC_PI_2] {
                for &phi in &[0.0, 0.9, -2.0] {
                    let u = pulse_propagator(theta, chi, phi).unwrap();
                    let full = propagator_oracle(theta, chi, phi);
                    for r in 0..3 {
                        for col in 0..2 {
                            assert!((u.matrix[(r, col)] - full[(r, col)]).norm() < 1e-12);
                        }
                    }
                    assert!(u.isometry_defect() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn propagator_rejects_bad_angles() {
        assert!(matches!(
            pulse_propagator(PI, 2.0 * PI, 0.0),
            Err(LambdaError::InvalidAngle { name: "chi", .. })
        ));
        assert!(pulse_propagator(f64::NAN, 0.0, 0.0).is_err());
        assert!(pulse_propagator(PI, -0.1, 0.0).is_err());
    }

    #[test]
    fn decay_isometry_limits() {
        let v0 = decay_isometry(0.5, 0.5, 0.0).unwrap();
        let mut embed = ComplexMatrix::zeros(9, 3);
        embed[(0, 0)] = c(1., 0.);
        embed[(3, 1)] = c(1., 0.);
        embed[(6, 2)] = c(1., 0.);
        assert!(v0.matrix.max_abs_diff(&embed) < 1e-15);

        let vinf = decay_isometry(0.5, 0.5, f64::INFINITY).unwrap().matrix;
        assert_eq!(vinf[(6, 2)], c(0., 0.));
        assert!((vinf[(1, 2)] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        assert!((vinf[(5, 2)] - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
    }

    #[test]
    fn decay_isometry_is_isometric() {
        for &gt in &[0.0, 0.1, 1.0, 3.0, 40.0, f64::INFINITY] {
            for &a1 in &[0.0, 0.2, 0.5, 1.0] {
                let v = decay_isometry(a1, 1.0 - a1, gt).unwrap();
                assert!(v.isometry_defect() < 1e-12);
            }
        }
        assert!(decay_isometry(0.6, 0.6, 1.0).is_err());
        assert!(decay_isometry(-0.1, 1.1, 1.0).is_err());
        assert!(decay_isometry(0.5, 0.5, -1.0).is_err());
    }

    #[test]
    fn excited_population_decays_exponentially() {
        let params = LambdaParams {
            theta: 1.3,
            chi: 0.7,
            phi: 0.4,
            gamma13: 0.3,
            gamma23: 1.1,
            ..LambdaParams::default()
        };
        let u = pulse_propagator(params.theta, params.chi, params.phi)
            .unwrap()
            .matrix;
        let c_in = [c(0.6, 0.0), c(0.0, 0.8)];
        let psi0 = u.mul_vec(&c_in);
        for &gt in &[0.0, 0.5, 2.0, 6.0] {
            let v = decay_isometry(0.3 / 1.4, 1.1 / 1.4, gt).unwrap().matrix;
            let psi_t = v.mul_vec(&psi0);
            let excited: f64 = (0..3).map(|a| psi_t[6 + a].norm_sqr()).sum();
            assert!((excited - psi0[2].norm_sqr() * (-gt).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn no_excitation_channel_is_vacuum() {
        let params = LambdaParams {
            theta: 0.0,
            ..LambdaParams::default()
        };
        let ch = channel_map(&params).unwrap();
        let vac = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(ch.op(0, 0).max_abs_diff(&vac) < 1e-15);
        assert!(ch.op(1, 1).max_abs_diff(&vac) < 1e-15);
        assert!(ch.op(0, 1).max_abs() < 1e-15);
        assert!(ch.op(1, 0).max_abs() < 1e-15);
    }

    #[test]
    fn closed_form_symmetric_pi_pulse() {
        let ch = closed_form_channel(PI, f64::INFINITY, 0.5, 0.5).unwrap();
        let s11 = ComplexMatrix::from_real_diagonal(&[0.0, 0.5, 0.5]);
        assert!(ch.op(0, 0).max_abs_diff(&s11) < 1e-15);
        let s22 = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(ch.op(1, 1).max_abs_diff(&s22) < 1e-15);
        assert!((ch.op(0, 1)[(2, 0)].norm() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn closed_form_trace_identities() {
        for k in 0..10 {
            let theta = 0.7 * k as f64;
            let gt = 0.45 * k as f64;
            let ch = closed_form_channel(theta, gt, 0.5, 0.5).unwrap();
            assert!((ch.op(0, 0).trace().re - 1.0).abs() < 1e-14);
            assert!((ch.op(1, 1).trace().re - 1.0).abs() < 1e-14);
            assert!(ch.op(0, 1).trace().norm() < 1e-14);
            assert!(validate_channel(&ch).passed());
        }
    }

    #[test]
    fn symmetric_pi_pulse_first_operator_spectrum() {
        let params = LambdaParams {
            chi: 0.0,
            ..LambdaParams::default()
        };
        let ch = channel_map(&params).unwrap();
        let spec = DensityMatrix::new(ch.op(0, 0).clone())
            .unwrap()
            .spectrum()
            .unwrap();
        for (a, b) in spec.iter().zip(&[0.5, 0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_map_is_cptp_on_grid() {
        for i in 0..5 {
            for j in 0..5 {
                let params = LambdaParams {
                    theta: 2.0 * PI * i as f64 / 4.0,
                    gamma_t: 2.0 * j as f64,
                    chi: 0.3,
                    phi: 0.8,
                    gamma13: 1.0,
                    gamma23: 0.4,
                    ..LambdaParams::default()
                };
                assert!(validate_channel(&channel_map(&params).unwrap()).passed());
                assert!(full_isometry(&params).unwrap().isometry_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_single_pulse_construction() {
        // At χ = 0 only |1⟩ is driven, exactly the closed-form situation; the
        // spectra then agree for every input, not just Î/2.
        let inputs = [
            DensityMatrix::maximally_mixed(2),
            DensityMatrix::new(ComplexMatrix::from_rows(&[
                vec![c(0.3, 0.), c(0.1, 0.2)],
                vec![c(0.1, -0.2), c(0.7, 0.)],
            ]))
            .unwrap(),
        ];
        for &a1 in &[0.5, 0.2] {
            for &theta in &[0.3, 1.7, PI, 4.0] {
                for &gt in &[0.0, 0.8, 3.0, f64::INFINITY] {
                    let params = LambdaParams {
                        theta,
                        chi: 0.0,
                        gamma_t: gt,
                        gamma13: a1,
                        gamma23: 1.0 - a1,
                        ..LambdaParams::default()
                    };
                    let built = channel_map(&params).unwrap();
                    let closed = closed_form_channel(theta, gt, a1, 1.0 - a1).unwrap();
                    for rho in &inputs {
                        let x = analyze(&built, rho).unwrap();
                        let y = analyze(&closed, rho).unwrap();
                        for (p, q) in x.output_spectrum.iter().zip(&y.output_spectrum) {
                            assert!((p - q).abs() < 1e-10);
                        }
                        for (p, q) in x.joint_spectrum.iter().zip(&y.joint_spectrum) {
                            assert!((p - q).abs() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_level_reduction_has_no_second_photon() {
        for &chi in &[0.0, 0.6, FRAC_PI_2] {
            let params = LambdaParams {
                chi,
                gamma13: 1.0,
                gamma23: 0.0,
                gamma_t: 1.5,
                theta: 2.2,
                ..LambdaParams::default()
            };
            let ch = channel_map(&params).unwrap();
            for m in 0..2 {
                for n in 0..2 {
                    let s = ch.op(m, n);
                    for k in 0..3 {
                        assert!(s[(2, k)].norm() < 1e-15 && s[(k, 2)].norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn params_validation_names_the_key() {
        let bad = LambdaParams {
            chi: 2.0 * PI,
            ..LambdaParams::default()
        };
        assert_eq!(bad.validate().unwrap_err().parameter(), Some("chi"));
        let bad = LambdaParams {
            gamma13: 0.0,
            gamma23: 0.0,
            ..LambdaParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = LambdaParams {
            delta_r: 0.1,
            ..LambdaParams::default()
        };
        assert_eq!(bad.validate().unwrap_err().parameter(), Some("delta_r"));
        let bad = LambdaParams {
            gamma_t: -1.0,
            ..LambdaParams::default()
        };
        assert_eq!(bad.validate().unwrap_err().parameter(), Some("gamma_t"));
    }

    #[test]
    fn branching_ratios_sum_to_one() {
        let p = LambdaParams {
            gamma13: 0.37,
            gamma23: 1.91,
            ..LambdaParams::default()
        };
        let (a1, a2) = p.branching();
        assert_eq!(a1 + a2, 1.0);
    }
}
