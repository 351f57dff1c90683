use lagdeconv::deconv::{estimate, reconstruction_error};
use lagdeconv::{BoundReport, Estimator, LaguerreBasis, LaguerreSeries, LttMatrix, Observation, ObservationSet, TimeSeries};
use lagdeconv_groundwater::{greens_coeffs, kle_build, sample_field, simulate_impulse, Conductivity, KleBasis};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::StudyConfig;
use crate::error::{Error, Result};
use crate::record::{PeakClass, StudyRecord};
use crate::stats::{classify_bifurcation, quantile, sign_changes, Bifurcation, Histogram};

/// Points of the reconstruction grid on `[0, 4T]`.
pub const RECON_POINTS: usize = 400;
/// Relative dead-band for sign-change counting.
pub const SIGN_DEADBAND: f64 = 1e-3;
pub const HISTOGRAM_BINS: usize = 20;
/// A run aborts when more than this fraction of realizations fail.
pub const MAX_FAILURE_FRACTION: f64 = 0.1;

/// `400` evenly spaced times on `[0, 4T]`.
pub fn reconstruction_grid(scale: f64) -> Vec<f64> {
    let top = 4.0 * scale;
    (0..RECON_POINTS).map(|i| top * i as f64 / (RECON_POINTS - 1) as f64).collect()
}

/// Synthesize a coefficient series on `t_grid`.
pub fn reconstruct_boundary(series: &LaguerreSeries, t_grid: &[f64]) -> Result<TimeSeries> {
    let values = t_grid.iter().map(|&t| series.eval(t)).collect::<lagdeconv::Result<Vec<f64>>>()?;
    Ok(TimeSeries::new(t_grid.to_vec(), values)?)
}

/// The homogeneous model shared by every realization.
#[derive(Debug, Clone)]
pub struct Reference {
    pub coeffs: LaguerreSeries,
    pub matrix: LttMatrix,
    pub peak_time: f64,
    pub warnings: Vec<String>,
}

pub fn reference_model(cfg: &StudyConfig, basis: &LaguerreBasis) -> Result<Reference> {
    let resp = simulate_impulse(Conductivity::Homogeneous, &cfg.domain)?;
    let coeffs = greens_coeffs(&resp, basis)?;
    let matrix = LttMatrix::from_green_series(&coeffs);
    if !matrix.is_invertible() {
        return Err(Error::Reference("reference transfer matrix is singular".into()));
    }
    let mut warnings = resp.warnings.clone();
    if matrix.is_ill_conditioned() {
        warnings.push("reference transfer matrix is ill-conditioned".into());
    }
    Ok(Reference { coeffs, matrix, peak_time: resp.peak_time, warnings })
}

/// One successful realization.
#[derive(Debug, Clone)]
pub struct Realization {
    pub record: StudyRecord,
    pub reconstruction: TimeSeries,
    /// `max |ã_averaged - ã_lsq|`.
    pub estimator_discrepancy: f64,
}

/// Shared, immutable inputs of the per-seed pipeline.
pub struct Context<'a> {
    pub cfg: &'a StudyConfig,
    pub kle: &'a KleBasis,
    pub laguerre: &'a LaguerreBasis,
    pub reference: &'a Reference,
}

impl Context<'_> {
    pub fn input(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.cfg.laguerre_terms];
        a[0] = self.cfg.input_amplitude;
        a
    }

    /// Field → response → coefficients → reconstruction and bounds.
    pub fn realize(&self, seed: u64) -> Result<Realization> {
        let field = sample_field(self.kle, seed);
        let resp = simulate_impulse(Conductivity::Field(&field), &self.cfg.domain)?;
        let b = greens_coeffs(&resp, self.laguerre)?;
        let truth = LttMatrix::from_green_series(&b);
        let model = &self.reference.matrix;

        let a = self.input();
        let c = truth.apply(&a)?;
        let obs = ObservationSet::single(Observation::new(c, model.clone()))?;
        let averaged = estimate(&obs, Estimator::Averaged)?;
        let lsq = estimate(&obs, Estimator::LeastSquares)?;
        let estimator_discrepancy =
            averaged.a_hat.iter().zip(&lsq.a_hat).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let chosen = match self.cfg.estimator {
            Estimator::Averaged => averaged,
            Estimator::LeastSquares => lsq,
        };

        let err = reconstruction_error(&a, &chosen.a_hat)?;
        let bounds = BoundReport::relative(&a, model, &truth)?;
        let series = LaguerreSeries::new(chosen.a_hat, self.cfg.scale_t)?;
        let reconstruction = reconstruct_boundary(&series, &reconstruction_grid(self.cfg.scale_t))?;
        let (_, recon_peak_time) = reconstruction.argmax();
        let amplitude = self.cfg.input_amplitude;
        let deviation: Vec<f64> = reconstruction
            .times()
            .iter()
            .zip(reconstruction.values())
            .map(|(&t, &v)| v - amplitude * (-t / (2.0 * self.cfg.scale_t)).exp())
            .collect();

        let record = StudyRecord {
            seed,
            abs_error: err.absolute,
            rel_error: err.relative,
            lower_k1: bounds.lower_k1,
            lower_k2: bounds.lower_k2,
            upper: bounds.upper,
            b0: b.coeffs()[0],
            b0_tilde: self.reference.coeffs.coeffs()[0],
            peak_time_true: resp.peak_time,
            peak_time_model: self.reference.peak_time,
            peak_class: PeakClass::of(resp.peak_time, self.reference.peak_time),
            sign_changes: sign_changes(reconstruction.values(), SIGN_DEADBAND),
            error_sign_changes: sign_changes(&deviation, SIGN_DEADBAND),
            recon_peak_time,
        };
        Ok(Realization { record, reconstruction, estimator_discrepancy })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exclusion {
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub requested: usize,
    pub total: usize,
    pub excluded: usize,
    pub exclusions: Vec<Exclusion>,
    pub histogram: Histogram,
    pub rel_error_quantiles: Option<Quantiles>,
    pub bound_violations: usize,
    pub violating_seeds: Vec<u64>,
    pub bifurcation: Bifurcation,
    pub max_estimator_discrepancy: f64,
    pub warnings: Vec<String>,
}

pub struct StudyOutput {
    pub records: Vec<StudyRecord>,
    pub reconstructions: Vec<TimeSeries>,
    pub summary: StudySummary,
    pub reference: Reference,
}

pub fn summarize(records: &[StudyRecord], exclusions: Vec<Exclusion>, requested: usize, discrepancy: f64, warnings: Vec<String>) -> StudySummary {
    let rel: Vec<f64> = records.iter().map(|r| r.rel_error).collect();
    let rel_error_quantiles = (!rel.is_empty()).then(|| {
        let q = |p| quantile(&rel, p).expect("non-empty");
        Quantiles { p05: q(0.05), p25: q(0.25), p50: q(0.5), p75: q(0.75), p95: q(0.95) }
    });
    let violating_seeds: Vec<u64> = records.iter().filter(|r| !r.bounds_hold()).map(|r| r.seed).collect();
    StudySummary {
        requested,
        total: records.len(),
        excluded: exclusions.len(),
        exclusions,
        histogram: Histogram::new(&rel, HISTOGRAM_BINS),
        rel_error_quantiles,
        bound_violations: violating_seeds.len(),
        violating_seeds,
        bifurcation: classify_bifurcation(records),
        max_estimator_discrepancy: discrepancy,
        warnings,
    }
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let laguerre = LaguerreBasis::new(cfg.laguerre_terms, cfg.scale_t)?;
    let kle = kle_build(&cfg.covariance, &cfg.domain)?;
    let reference = reference_model(cfg, &laguerre)?;
    let ctx = Context { cfg, kle: &kle, laguerre: &laguerre, reference: &reference };

    let seeds: Vec<u64> = (0..cfg.realizations as u64).map(|i| cfg.base_seed.wrapping_add(i)).collect();
    let results: Vec<(u64, Result<Realization>)> = seeds.par_iter().map(|&s| (s, ctx.realize(s))).collect();

    let mut records = Vec::new();
    let mut reconstructions = Vec::new();
    let mut exclusions = Vec::new();
    let mut discrepancy = 0.0f64;
    for (seed, r) in results {
        match r {
            Ok(real) => {
                discrepancy = discrepancy.max(real.estimator_discrepancy);
                records.push(real.record);
                reconstructions.push(real.reconstruction);
            }
            Err(e) => exclusions.push(Exclusion { seed, reason: e.to_string() }),
        }
    }
    if exclusions.len() as f64 > MAX_FAILURE_FRACTION * cfg.realizations as f64 {
        return Err(Error::TooManyFailures {
            failed: exclusions.len(),
            total: cfg.realizations,
            first_seed: exclusions[0].seed,
            first_reason: exclusions[0].reason.clone(),
        });
    }
    let summary = summarize(&records, exclusions, cfg.realizations, discrepancy, reference.warnings.clone());
    Ok(StudyOutput { records, reconstructions, summary, reference })
}
