//! Recovery of input coefficients through (imperfect) transfer models.
//!
//! With one observation the estimate is the exact solve `B̃ ã = c`. With `M`
//! observations two estimators are offered: the mean of the single-location
//! solves, and the least-squares minimizer of `Σ_l ‖c_l - B̃_l ã‖²`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::toeplitz::LttMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Averaged,
    LeastSquares,
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Averaged => "averaged",
            Estimator::LeastSquares => "lsq",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "averaged" | "average" | "mean" => Ok(Estimator::Averaged),
            "lsq" | "least_squares" | "least-squares" => Ok(Estimator::LeastSquares),
            other => Err(invalid(format!("unknown estimator `{other}` (expected averaged|lsq)"))),
        }
    }
}

/// One monitoring location.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    /// Observed output coefficients `c_l`.
    pub output: Vec<f64>,
    /// Interpretive transfer matrix `B̃_l`.
    pub model: LttMatrix,
    /// True transfer matrix `B_l`, when known (synthetic studies).
    pub truth: Option<LttMatrix>,
}

impl Observation {
    pub fn new(output: Vec<f64>, model: LttMatrix) -> Self {
        Self { output, model, truth: None }
    }

    /// Synthetic observation `c = B·a` interpreted through `model`.
    pub fn synthetic(a: &[f64], model: LttMatrix, truth: LttMatrix) -> Result<Self> {
        let output = truth.apply(a)?;
        Ok(Self { output, model, truth: Some(truth) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    entries: Vec<Observation>,
}

impl ObservationSet {
    pub fn new(entries: Vec<Observation>) -> Result<Self> {
        let first = entries.first().ok_or_else(|| invalid("an observation set needs at least one entry"))?;
        let n = first.model.dim();
        for (l, e) in entries.iter().enumerate() {
            let dims = [Some(e.output.len()), Some(e.model.dim()), e.truth.as_ref().map(LttMatrix::dim)];
            if let Some(found) = dims.into_iter().flatten().find(|d| *d != n) {
                return Err(Error::DimensionMismatch { expected: n, found });
            }
            if !e.model.is_invertible() {
                return Err(invalid(format!("model of entry {l} is singular")));
            }
        }
        Ok(Self { entries })
    }

    pub fn single(entry: Observation) -> Result<Self> {
        Self::new(vec![entry])
    }

    pub fn entries(&self) -> &[Observation] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].model.dim()
    }
}

/// Recovered input coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub a_hat: Vec<f64>,
    pub method: Estimator,
    /// `‖c_l - B̃_l ã‖₂` per location.
    pub residuals: Vec<f64>,
}

fn residuals(obs: &ObservationSet, a_hat: &[f64]) -> Result<Vec<f64>> {
    obs.entries()
        .iter()
        .map(|e| {
            let fit = e.model.apply(a_hat)?;
            Ok(norm(&sub(&e.output, &fit)))
        })
        .collect()
}

/// `Σ_l ‖c_l - B̃_l a‖²`.
pub fn objective(obs: &ObservationSet, a: &[f64]) -> Result<f64> {
    Ok(residuals(obs, a)?.iter().map(|r| r * r).sum())
}

/// Exact solve `model · ã = c`; the M = 1 case of both estimators.
pub fn solve_single(model: &LttMatrix, c: &[f64]) -> Result<Estimate> {
    let a_hat = model.solve(c)?;
    let fit = model.apply(&a_hat)?;
    Ok(Estimate { residuals: vec![norm(&sub(c, &fit))], a_hat, method: Estimator::Averaged })
}

/// `ã = (1/M) Σ_l B̃_l⁻¹ c_l`.
pub fn solve_multi_averaged(obs: &ObservationSet) -> Result<Estimate> {
    let n = obs.dim();
    let m = obs.len() as f64;
    let mut a_hat = vec![0.0; n];
    for e in obs.entries() {
        let a_l = e.model.solve(&e.output)?;
        for (acc, v) in a_hat.iter_mut().zip(&a_l) {
            *acc += v;
        }
    }
    a_hat.iter_mut().for_each(|v| *v /= m);
    let residuals = residuals(obs, &a_hat)?;
    Ok(Estimate { a_hat, method: Estimator::Averaged, residuals })
}

/// Minimizer of `Σ_l ‖c_l - B̃_l ã‖²`.
///
/// Solved by Householder QR of the stacked `MN×N` system, which yields the
/// solution of the normal equations `(Σ B̃_lᵀB̃_l) ã = Σ B̃_lᵀc_l` without
/// squaring the condition number.
pub fn solve_multi_lsq(obs: &ObservationSet) -> Result<Estimate> {
    let n = obs.dim();
    let m = obs.len();
    let mut stacked = DMatrix::zeros(m * n, n);
    let mut rhs = DVector::zeros(m * n);
    for (l, e) in obs.entries().iter().enumerate() {
        for i in 0..n {
            for j in 0..=i {
                stacked[(l * n + i, j)] = e.model.get(i, j);
            }
            rhs[l * n + i] = e.output[i];
        }
    }
    let qr = stacked.qr();
    let r = qr.r();
    let rmax = (0..n).fold(0.0f64, |acc, i| acc.max(r[(i, i)].abs()));
    if (0..n).any(|i| r[(i, i)].abs() <= f64::EPSILON * n as f64 * rmax) {
        return Err(Error::SingularNormalMatrix);
    }
    let qtb = qr.q().transpose() * rhs;
    let x = r.solve_upper_triangular(&qtb).ok_or(Error::SingularNormalMatrix)?;
    let a_hat: Vec<f64> = x.iter().copied().collect();
    let residuals = residuals(obs, &a_hat)?;
    Ok(Estimate { a_hat, method: Estimator::LeastSquares, residuals })
}

pub fn estimate(obs: &ObservationSet, method: Estimator) -> Result<Estimate> {
    match method {
        Estimator::Averaged => solve_multi_averaged(obs),
        Estimator::LeastSquares => solve_multi_lsq(obs),
    }
}

/// `E = I - B̃⁻¹B`.
pub fn error_operator(model: &LttMatrix, truth: &LttMatrix) -> Result<LttMatrix> {
    Ok(model.invert()?.multiply(truth)?.identity_minus())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionError {
    pub absolute: f64,
    pub relative: f64,
}

/// `‖a - ã‖₂` and `‖a - ã‖₂ / ‖a‖₂`.
pub fn reconstruction_error(a: &[f64], a_hat: &[f64]) -> Result<ReconstructionError> {
    if a.len() != a_hat.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: a_hat.len() });
    }
    let a_norm = norm(a);
    if a_norm == 0.0 {
        return Err(Error::DivisionByZero("‖a‖₂"));
    }
    let absolute = norm(&sub(a, a_hat));
    Ok(ReconstructionError { absolute, relative: absolute / a_norm })
}

/// The error of the averaged estimator next to the two candidate identities
/// relating it to per-location errors `‖E_l a‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragedErrorIdentities {
    /// `‖a - ã_avg‖₂`.
    pub actual: f64,
    /// `(1/M) Σ_l ‖E_l a‖₂`; an upper bound on `actual` (triangle inequality).
    pub arithmetic_mean: f64,
    /// `sqrt((1/M) Σ_l ‖E_l a‖₂²)`.
    pub root_mean_square: f64,
}

/// Requires every entry to carry its `truth`.
pub fn averaged_error_identities(obs: &ObservationSet, a: &[f64]) -> Result<AveragedErrorIdentities> {
    let est = solve_multi_averaged(obs)?;
    let actual = norm(&sub(a, &est.a_hat));
    let mut per_location = Vec::with_capacity(obs.len());
    for e in obs.entries() {
        let truth = e.truth.as_ref().ok_or_else(|| invalid("entry has no truth matrix"))?;
        per_location.push(norm(&error_operator(&e.model, truth)?.apply(a)?));
    }
    let m = per_location.len() as f64;
    Ok(AveragedErrorIdentities {
        actual,
        arithmetic_mean: per_location.iter().sum::<f64>() / m,
        root_mean_square: (per_location.iter().map(|x| x * x).sum::<f64>() / m).sqrt(),
    })
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
