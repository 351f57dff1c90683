//! Lower and upper bounds on reconstruction error under model mismatch.
//!
//! With `E = I - B̃⁻¹B`, the first two diagonals of `E` depend only on the
//! dominant transfer coefficients:
//!
//! ```text
//! e₀ = 1 - b₀/b̃₀
//! e₁ = (1/b̃₀)·(b̃₁·b₀/b̃₀ - b₁)
//! ```
//!
//! Both expressions take the same form whether `b` denotes the Laguerre
//! coefficients of the transfer function or the diagonals of its LTT matrix
//! (the factor `T` and the differencing cancel), so callers may pass either.
//! The leading components of `E·a` give lower bounds; the spectral norm of
//! `E` gives an upper bound that needs every coefficient.

use crate::deconv::{error_operator, norm};
use crate::error::{Error, Result};
use crate::laguerre::{expand, LaguerreBasis, Signal};
use crate::toeplitz::{spectral_norm, LttMatrix};

/// `(e₀, e₁)` of `I - B̃⁻¹B` from the dominant coefficients.
pub fn error_diagonal_closed_form(b0: f64, b1: f64, b0_tilde: f64, b1_tilde: f64) -> Result<(f64, f64)> {
    if b0_tilde == 0.0 {
        return Err(Error::DivisionByZero("b̃₀"));
    }
    let ratio = b0 / b0_tilde;
    Ok((1.0 - ratio, (b1_tilde * ratio - b1) / b0_tilde))
}

/// `|a₀|·|1 - b₀/b̃₀|`; with `a₀ = 1` this is the relative bound for a
/// purely exponential input.
pub fn lower_bound_k1(a0: f64, b0: f64, b0_tilde: f64) -> Result<f64> {
    let (e0, _) = error_diagonal_closed_form(b0, 0.0, b0_tilde, 0.0)?;
    Ok(a0.abs() * e0.abs())
}

/// Norm of the first two components of `E·a`.
pub fn lower_bound_k2(a0: f64, a1: f64, b0: f64, b1: f64, b0_tilde: f64, b1_tilde: f64) -> Result<f64> {
    let (e0, e1) = error_diagonal_closed_form(b0, b1, b0_tilde, b1_tilde)?;
    let first = a0 * e0;
    let second = a0 * e1 + a1 * e0;
    Ok(first.hypot(second))
}

/// `max_l ‖I - B̃_l⁻¹B_l‖₂`, the norm of the block-diagonal error operator.
pub fn upper_bound(pairs: &[(LttMatrix, LttMatrix)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (model, truth) in pairs {
        worst = worst.max(spectral_norm(&error_operator(model, truth)?)?);
    }
    Ok(worst)
}

/// The `n = 0` Laguerre coefficient `(1/T) ∫ b(t) e^(-t/(2T)) dt`.
pub fn green_dominant_coeff(b: Signal<'_>, scale: f64) -> Result<f64> {
    let basis = LaguerreBasis::new(1, scale)?;
    Ok(expand(b, &basis)?.series.coeffs()[0])
}

/// All bounds for one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lower_k1: f64,
    pub lower_k2: f64,
    pub upper: f64,
    /// Values are divided by `‖a‖₂`.
    pub relative: bool,
}

impl BoundReport {
    /// Bounds on `‖a - ã‖₂`.
    pub fn absolute(a: &[f64], model: &LttMatrix, truth: &LttMatrix) -> Result<Self> {
        if a.len() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), found: a.len() });
        }
        let (d, dt) = (truth.diag(), model.diag());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let lower_k1 = lower_bound_k1(a[0], d[0], dt[0])?;
        let lower_k2 = lower_bound_k2(a[0], at(a, 1), d[0], at(d, 1), dt[0], at(dt, 1))?;
        let upper = upper_bound(&[(model.clone(), truth.clone())])? * norm(a);
        Ok(Self { lower_k1, lower_k2, upper, relative: false })
    }

    /// Bounds on `‖a - ã‖₂ / ‖a‖₂`.
    pub fn relative(a: &[f64], model: &LttMatrix, truth: &LttMatrix) -> Result<Self> {
        let a_norm = norm(a);
        if a_norm == 0.0 {
            return Err(Error::DivisionByZero("‖a‖₂"));
        }
        Ok(Self::absolute(a, model, truth)?.scaled(1.0 / a_norm, true))
    }

    fn scaled(self, s: f64, relative: bool) -> Self {
        Self { lower_k1: self.lower_k1 * s, lower_k2: self.lower_k2 * s, upper: self.upper * s, relative }
    }

    /// `lower_k1 ≤ lower_k2 ≤ error ≤ upper` with the given slacks.
    pub fn brackets(&self, error: f64, lower_slack: f64, upper_slack: f64) -> bool {
        self.lower_k1 <= self.lower_k2 + lower_slack
            && self.lower_k2 <= error + lower_slack
            && error <= self.upper + upper_slack
    }
}
