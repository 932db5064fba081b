//! Weighted Wigner-Yanase-Dyson skew information.
//!
//! For a state `rho`, parameters `(alpha, beta, gamma)` and an operator `A`,
//!
//! ```text
//! M = (1 - gamma) rho^alpha + gamma rho^beta
//! W = rho^((1 - alpha - beta) / 2)
//! K(A) = 1/2 ||W [M, A]||^2 = -1/2 Tr([M, A]^2 rho^(1 - alpha - beta))
//! ```
//!
//! Every evaluation computes both the norm form and the trace form and fails
//! with [`SkewError::FormulaMismatch`] if they drift apart. The norm form is
//! the returned value. For non-Hermitian `E` the weight sits on the right,
//! `1/2 ||[M, E] W||^2`, and the trace form uses `[M, E^dagger][M, E]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chan_bounds::KrausChannel;
use crate::error::{Result, SkewError};
use crate::matcore::{commutator, hs_norm_sq, ComplexMatrix, DensityMatrix};

/// Allowed `|trace form - norm form|`, scaled by `1 + K`.
pub const AGREEMENT_TOL: f64 = 1e-9;
/// Allowed imaginary part of the trace form.
pub const IMAGINARY_TOL: f64 = 1e-9;
/// Round-off below zero that is reported as zero.
pub const NEGATIVE_ROUNDOFF: f64 = 1e-12;

const PARAM_SLACK: f64 = 1e-12;

/// The `(alpha, beta, gamma)` triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl SkewParams {
    /// Validates `alpha, beta >= 0`, `alpha + beta <= 1`, `0 <= gamma <= 1`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    /// `alpha = beta = 1/2`: the Wigner-Yanase case, for any `gamma`.
    pub fn wigner_yanase(gamma: f64) -> Result<Self> {
        Self::new(0.5, 0.5, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { alpha, beta, gamma } = *self;
        if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
            return Err(SkewError::InvalidParams("parameters must be finite".into()));
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(SkewError::InvalidParams(format!(
                "alpha and beta must be >= 0 (alpha = {alpha}, beta = {beta})"
            )));
        }
        if alpha + beta > 1.0 + PARAM_SLACK {
            return Err(SkewError::InvalidParams(format!(
                "alpha + beta must be <= 1 (got {})",
                alpha + beta
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(SkewError::InvalidParams(format!("gamma must lie in [0, 1] (got {gamma})")));
        }
        Ok(())
    }

    /// `1 - alpha - beta`, clipped at 0.
    pub fn weight_exponent(&self) -> f64 {
        (1.0 - self.alpha - self.beta).max(0.0)
    }
}

/// The operators `M = (1-gamma) rho^alpha + gamma rho^beta` and `W = rho^((1-alpha-beta)/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedPower {
    pub mixed: ComplexMatrix,
    pub weight: ComplexMatrix,
    /// `rho^(1-alpha-beta)`, computed directly rather than as `W^2`; used by the trace forms.
    pub full_weight: ComplexMatrix,
}

impl MixedPower {
    pub fn new(rho: &DensityMatrix, p: &SkewParams) -> Result<Self> {
        p.validate()?;
        let a = rho.pow(p.alpha)?.scale_real(1.0 - p.gamma);
        let b = rho.pow(p.beta)?.scale_real(p.gamma);
        let e = p.weight_exponent();
        Ok(Self { mixed: &a + &b, weight: rho.pow(e / 2.0)?, full_weight: rho.pow(e)? })
    }
}

/// Both forms of one skew evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SkewValue {
    /// The reported value: the norm form with round-off below zero clamped.
    pub value: f64,
    pub norm_form: f64,
    /// Real part of the trace form.
    pub trace_form: f64,
    pub imaginary_residue: f64,
    /// `|trace_form - norm_form|`.
    pub agreement: f64,
}

impl SkewValue {
    fn checked(norm_form: f64, trace: Complex64) -> Result<Self> {
        let agreement = (trace.re - norm_form).abs();
        if agreement > AGREEMENT_TOL * (1.0 + norm_form.abs()) {
            return Err(SkewError::FormulaMismatch {
                norm: norm_form,
                trace: trace.re,
                residual: agreement,
            });
        }
        if trace.im.abs() > IMAGINARY_TOL {
            return Err(SkewError::ImaginaryResidue { residue: trace.im.abs() });
        }
        Ok(Self {
            value: clamp_roundoff(norm_form),
            norm_form,
            trace_form: trace.re,
            imaginary_residue: trace.im.abs(),
            agreement,
        })
    }
}

fn clamp_roundoff(x: f64) -> f64 {
    if (-NEGATIVE_ROUNDOFF..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

/// A state and parameter triple with the mixed powers cached.
///
/// Cheap to share across threads; all evaluation methods take `&self`.
#[derive(Clone, Debug)]
pub struct SkewContext {
    params: SkewParams,
    powers: MixedPower,
}

impl SkewContext {
    pub fn new(rho: &DensityMatrix, params: SkewParams) -> Result<Self> {
        Ok(Self { params, powers: MixedPower::new(rho, &params)? })
    }

    pub fn params(&self) -> &SkewParams {
        &self.params
    }

    pub fn powers(&self) -> &MixedPower {
        &self.powers
    }

    pub fn dim(&self) -> usize {
        self.powers.mixed.dim()
    }

    fn ensure_dim(&self, a: &ComplexMatrix) -> Result<()> {
        if a.dim() == self.dim() {
            Ok(())
        } else {
            Err(SkewError::DimMismatch { left: self.dim(), right: a.dim() })
        }
    }

    /// `W [M, A]`.
    pub fn left_image(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.ensure_dim(a)?;
        Ok(&self.powers.weight * &commutator(&self.powers.mixed, a)?)
    }

    /// `[M, E] W`.
    pub fn right_image(&self, e: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.ensure_dim(e)?;
        Ok(&commutator(&self.powers.mixed, e)? * &self.powers.weight)
    }

    /// Skew information of a Hermitian observable, both forms.
    pub fn evaluate_observable(&self, a: &ComplexMatrix) -> Result<SkewValue> {
        a.ensure_hermitian()?;
        let image = self.left_image(a)?;
        let norm = 0.5 * hs_norm_sq(&image);
        let c = commutator(&self.powers.mixed, a)?;
        let trace = (&(&c * &c) * &self.powers.full_weight).trace() * -0.5;
        SkewValue::checked(norm, trace)
    }

    /// Skew information of an arbitrary operator, both forms.
    pub fn evaluate_operator(&self, e: &ComplexMatrix) -> Result<SkewValue> {
        let image = self.right_image(e)?;
        let norm = 0.5 * hs_norm_sq(&image);
        let c = commutator(&self.powers.mixed, e)?;
        let c_dag = commutator(&self.powers.mixed, &e.adjoint())?;
        let trace = (&(&c_dag * &c) * &self.powers.full_weight).trace() * -0.5;
        SkewValue::checked(norm, trace)
    }

    pub fn observable(&self, a: &ComplexMatrix) -> Result<f64> {
        self.evaluate_observable(a).map(|v| v.value)
    }

    pub fn operator(&self, e: &ComplexMatrix) -> Result<f64> {
        self.evaluate_operator(e).map(|v| v.value)
    }

    /// Sum of [`Self::operator`] over the Kraus operators of `phi`.
    pub fn channel(&self, phi: &KrausChannel) -> Result<f64> {
        self.ensure_dim(&phi.kraus()[0])?;
        phi.kraus().iter().map(|e| self.operator(e)).sum()
    }
}

/// `K(A)` for a Hermitian `A`.
pub fn wwyd_skew(rho: &DensityMatrix, a: &ComplexMatrix, p: SkewParams) -> Result<f64> {
    SkewContext::new(rho, p)?.observable(a)
}

/// `K(E)` for an arbitrary square `E`.
pub fn mwwyd_skew(rho: &DensityMatrix, e: &ComplexMatrix, p: SkewParams) -> Result<f64> {
    SkewContext::new(rho, p)?.operator(e)
}

/// `K(Phi) = sum_i K(E_i)`.
pub fn channel_skew(rho: &DensityMatrix, phi: &KrausChannel, p: SkewParams) -> Result<f64> {
    SkewContext::new(rho, p)?.channel(phi)
}

/// Wigner-Yanase skew information `1/2 ||[sqrt(rho), A]||^2`.
pub fn wy_skew(rho: &DensityMatrix, a: &ComplexMatrix) -> Result<f64> {
    a.ensure_hermitian()?;
    rho.matrix().ensure_same_dim(a)?;
    let c = commutator(&rho.pow(0.5)?, a)?;
    Ok(0.5 * hs_norm_sq(&c))
}

/// Two-parameter extension `-1/2 Tr([(1-gamma) rho^alpha + gamma rho^(1-alpha), A]^2)`,
/// evaluated directly as a trace.
pub fn two_param_skew(rho: &DensityMatrix, a: &ComplexMatrix, alpha: f64, gamma: f64) -> Result<f64> {
    a.ensure_hermitian()?;
    let m = &rho.pow(alpha)?.scale_real(1.0 - gamma) + &rho.pow(1.0 - alpha)?.scale_real(gamma);
    let c = commutator(&m, a)?;
    Ok(clamp_roundoff(-0.5 * (&c * &c).trace().re))
}

/// Weighted WYD skew information with the arithmetic mean `(rho^alpha + rho^(1-alpha)) / 2`.
pub fn mean_weighted_skew(rho: &DensityMatrix, a: &ComplexMatrix, alpha: f64) -> Result<f64> {
    a.ensure_hermitian()?;
    let m = (&rho.pow(alpha)? + &rho.pow(1.0 - alpha)?).scale_real(0.5);
    let c = commutator(&m, a)?;
    Ok(clamp_roundoff(-0.5 * (&c * &c).trace().re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelzoo::{pauli, qubit_from_bloch, standard_channel, BlochVector, ChannelKind};
    use approx::assert_abs_diff_eq;

    fn params(a: f64, b: f64, g: f64) -> SkewParams {
        SkewParams::new(a, b, g).unwrap()
    }

    #[test]
    fn params_domain() {
        assert!(SkewParams::new(-0.1, 0.2, 0.5).is_err());
        assert!(SkewParams::new(0.6, 0.5, 0.5).is_err());
        assert!(SkewParams::new(0.3, 0.3, 1.2).is_err());
        assert!(SkewParams::new(f64::NAN, 0.3, 0.2).is_err());
        assert!(SkewParams::new(0.3, 0.7, 0.0).is_ok());
        assert!(SkewParams::new(0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn maximally_mixed_has_no_skew() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        for p in [params(0.5, 0.5, 0.3), params(0.2, 0.1, 0.9), params(0.0, 1.0, 0.0)] {
            assert_abs_diff_eq!(wwyd_skew(&rho, &pauli(3), p).unwrap(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn pure_zero_state_sigma_x() {
        // sqrt(|0><0|) = |0><0|, [|0><0|, s1] = |0><1| - |1><0|, half its HS norm^2 is 1
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        for g in [0.0, 0.3, 1.0] {
            let k = wwyd_skew(&rho, &pauli(1), params(0.5, 0.5, g)).unwrap();
            assert_abs_diff_eq!(k, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn pauli_sum_matches_closed_form() {
        let r = BlochVector::new(0.3, 0.4, 0.5).unwrap();
        let rho = qubit_from_bloch(&r);
        let t: f64 = 0.5;
        let sum: f64 = (1..=3).map(|k| wwyd_skew(&rho, &pauli(k), params(0.5, 0.5, 0.3)).unwrap()).sum();
        assert_abs_diff_eq!(sum, 2.0 * (1.0 - (1.0 - t).sqrt()), epsilon = 1e-12);
        assert_abs_diff_eq!(sum, 0.585_786_437_626_905, epsilon = 1e-12);
    }

    #[test]
    fn operator_identity_and_hermitian_consistency() {
        let rho = qubit_from_bloch(&BlochVector::new(0.3, 0.4, 0.5).unwrap());
        let p = params(0.3, 0.5, 0.25);
        assert_abs_diff_eq!(mwwyd_skew(&rho, &ComplexMatrix::identity(2), p).unwrap(), 0.0, epsilon = 1e-15);
        let h = mwwyd_skew(&rho, &pauli(2), p).unwrap();
        let k = wwyd_skew(&rho, &pauli(2), p).unwrap();
        assert_abs_diff_eq!(h, k, epsilon = 1e-10);
    }

    #[test]
    fn operator_pinned_lowering_value() {
        // rho = diag(0.7, 0.3), E = |0><1|: M and W are diagonal so
        // [M, E] W = (m0 - m1) w1 |0><1| and K = (m0 - m1)^2 w1^2 / 2 with
        // m_k = 0.75 l_k^0.3 + 0.25 l_k^0.5, w1^2 = 0.3^0.2.
        let m = |l: f64| 0.75 * l.powf(0.3) + 0.25 * l.powf(0.5);
        let oracle = 0.5 * (m(0.7) - m(0.3)).powi(2) * 0.3f64.powf(0.2);
        assert_abs_diff_eq!(oracle, 0.019_630_076_741_065_36, epsilon = 1e-15);

        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        let e = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let k = mwwyd_skew(&rho, &e, params(0.3, 0.5, 0.25)).unwrap();
        assert_abs_diff_eq!(k, oracle, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        let e = ComplexMatrix::identity(3);
        assert!(matches!(
            mwwyd_skew(&rho, &e, params(0.5, 0.5, 0.5)),
            Err(SkewError::DimMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn observable_must_be_hermitian() {
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        let e = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(wwyd_skew(&rho, &e, params(0.5, 0.5, 0.5)), Err(SkewError::NotHermitian { .. })));
        assert!(matches!(wy_skew(&rho, &e), Err(SkewError::NotHermitian { .. })));
    }

    #[test]
    fn identity_and_unitary_channels() {
        let rho = qubit_from_bloch(&BlochVector::new(0.3, 0.4, 0.5).unwrap());
        let p = params(0.4, 0.2, 0.6);
        let id = KrausChannel::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert_abs_diff_eq!(channel_skew(&rho, &id, p).unwrap(), 0.0, epsilon = 1e-15);
        let u = pauli(2);
        let phi = KrausChannel::new(vec![u.clone()]).unwrap();
        assert_abs_diff_eq!(
            channel_skew(&rho, &phi, p).unwrap(),
            mwwyd_skew(&rho, &u, p).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn phase_damping_pinned() {
        // Independent evaluation: trace form summed over both Kraus operators in a
        // separate dense implementation.
        let rho = qubit_from_bloch(&BlochVector::new(0.3, 0.4, 0.5).unwrap());
        let phi = standard_channel(ChannelKind::PhaseDamping, 0.4).unwrap();
        let k = channel_skew(&rho, &phi, params(0.5, 0.5, 0.5)).unwrap();
        assert_abs_diff_eq!(k, 0.016_504_776_769_283_8, epsilon = 1e-12);
    }

    #[test]
    fn wy_on_maximally_mixed_qutrit() {
        let rho = DensityMatrix::new(ComplexMatrix::identity(3).scale_real(1.0 / 3.0)).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[2.0, 0.0, 1.0], &[0.0, 1.0, -1.0]]).unwrap();
        assert_abs_diff_eq!(wy_skew(&rho, &a).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn boundary_weight_uses_identity_convention() {
        // alpha + beta = 1 on a pure state: W = rho^0 = I
        let rho = DensityMatrix::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let ctx = SkewContext::new(&rho, params(0.3, 0.7, 0.4)).unwrap();
        assert_eq!(ctx.powers().weight, ComplexMatrix::identity(2));
        let k = ctx.observable(&pauli(1)).unwrap();
        // M = 0.6 P + 0.4 P = P for a projector P, so K = 1
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-14);
    }
}
