//! Laguerre functions and truncated Laguerre series of causal signals.
//!
//! A signal `f` on `[0, ∞)` is represented by coefficients
//! `f_n = (1/T) ∫ f(t) φ_n(t/T) dt`, so that `f(t) = Σ f_n φ_n(t/T)`, where
//! `φ_n(t) = e^(-t/2) L_n(t)` is the orthonormal Laguerre function.
//!
//! Sampled signals are integrated with a composite trapezoid rule on the
//! sample grid plus an exponential tail beyond the last sample. Analytic
//! signals use adaptive Gauss-Kronrod panels on the mapped half line.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::quadrature;

/// Relative tolerance for analytic expansion.
pub const ANALYTIC_REL_TOL: f64 = 1e-9;

/// Tail contribution (relative to the n = 0 integral) above which an
/// expansion is flagged.
pub const TAIL_WARNING_FRACTION: f64 = 1e-3;

/// Fraction of the sampled time span used to fit the exponential tail.
const TAIL_WINDOW_FRACTION: f64 = 0.1;

/// Evaluates `φ_n(t)` by the three-term recurrence.
pub fn eval_basis(n: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    let mut out = vec![0.0; n + 1];
    fill_basis(t, &mut out);
    Ok(out[n])
}

/// Writes `φ_0(t), …, φ_{len-1}(t)` into `out`.
///
/// `t` must be finite and nonnegative; this is not checked.
pub fn fill_basis(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let e = (-0.5 * t).exp();
    out[0] = e;
    if out.len() == 1 {
        return;
    }
    out[1] = (1.0 - t) * e;
    for n in 1..out.len() - 1 {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + 1.0 - t) * out[n] - nf * out[n - 1]) / (nf + 1.0);
    }
}

fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(invalid(format!("time must be finite, got {t}")));
    }
    if t < 0.0 {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

fn check_scale(scale: f64) -> Result<()> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(invalid(format!("time scale must be positive, got {scale}")));
    }
    Ok(())
}

/// Truncation order `N` and time scale `T` of a Laguerre expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreBasis {
    order: usize,
    scale: f64,
}

impl LaguerreBasis {
    pub fn new(order: usize, scale: f64) -> Result<Self> {
        if order == 0 {
            return Err(invalid("basis order must be at least 1"));
        }
        check_scale(scale)?;
        Ok(Self { order, scale })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `φ_n(t/T)` for `n < N`.
    pub fn eval_scaled(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let mut out = vec![0.0; self.order];
        fill_basis(t / self.scale, &mut out);
        Ok(out)
    }
}

/// A sampled signal on `[t_0, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
        }
        if times.len() < 2 {
            return Err(invalid("a time series needs at least 2 samples"));
        }
        if !(times[0].is_finite() && times[0] >= 0.0) {
            return Err(invalid("first sample time must be finite and nonnegative"));
        }
        if let Some(w) = times.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(invalid(format!("sample times must increase strictly (index {})", w + 1)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sample values must be finite"));
        }
        Ok(Self { times, values })
    }

    /// Uniform grid `t_k = k·dt`, `k = 0..values.len()`.
    pub fn uniform(dt: f64, values: Vec<f64>) -> Result<Self> {
        let times = (0..values.len()).map(|k| k as f64 * dt).collect();
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// Index and time of the largest sample (first one on ties).
    pub fn argmax(&self) -> (usize, f64) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best, self.times[best])
    }

    /// Two-column CSV `time,value`; a non-numeric first row is a header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| invalid(format!("csv: {e}")))?;
            if rec.len() != 2 {
                return Err(invalid(format!("row {}: expected 2 columns, found {}", row + 1, rec.len())));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(v)) => {
                    times.push(t);
                    values.push(v);
                }
                _ if row == 0 => continue,
                _ => return Err(invalid(format!("row {}: non-numeric field", row + 1))),
            }
        }
        Self::new(times, values)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| io_error(path, e))?;
        Self::read_csv(file)
    }

    /// Writes `time,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(w, "time,value")?;
        }
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

pub(crate) fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// Truncated Laguerre series with time scale `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerreSeries {
    coeffs: Vec<f64>,
    scale: f64,
}

impl LaguerreSeries {
    pub fn new(coeffs: Vec<f64>, scale: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("a series needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("series coefficients must be finite"));
        }
        check_scale(scale)?;
        Ok(Self { coeffs, scale })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        synthesize(self, t)
    }
}

/// A signal to be expanded.
#[derive(Clone, Copy)]
pub enum Signal<'a> {
    Sampled(&'a TimeSeries),
    Analytic(&'a dyn Fn(f64) -> f64),
}

/// How the part of a sampled signal beyond its last sample was treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Analytic signal; no tail.
    NotApplicable,
    /// `amplitude · e^(-rate·t)` fitted to the end of the record.
    Exponential { amplitude: f64, rate: f64 },
    /// The fit window has nonpositive samples; the tail is taken as zero.
    Vanished,
    /// The fitted rate is not positive; the tail was omitted.
    NotDecaying,
}

/// Coefficients plus quadrature diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub series: LaguerreSeries,
    pub tail: TailModel,
    /// |tail contribution to the n = 0 coefficient| / |n = 0 coefficient|.
    pub tail_fraction: f64,
    /// Set when the tail contributes more than [`TAIL_WARNING_FRACTION`]
    /// or could not be modeled.
    pub tail_warning: bool,
    /// Estimated absolute quadrature error (analytic integrals only).
    pub quadrature_error: f64,
    pub converged: bool,
}

/// Laguerre coefficients of `signal` in `basis`.
pub fn expand(signal: Signal<'_>, basis: &LaguerreBasis) -> Result<Expansion> {
    match signal {
        Signal::Analytic(f) => expand_analytic(f, basis),
        Signal::Sampled(ts) => expand_sampled(ts, basis),
    }
}

/// `(1/T) ∫_a^∞ f(t) φ_n(t/T) dt` for all `n < N`.
fn integrate_tail(f: &dyn Fn(f64) -> f64, a: f64, basis: &LaguerreBasis) -> quadrature::QuadResult {
    let order = basis.order();
    let scale = basis.scale();
    let mut phi = vec![0.0; order];
    // u = t/T; the map scale puts the oscillatory region of φ_{N-1} (u ≲ 4N)
    // in the lower part of the unit interval.
    let map_scale = (2 * order + 2) as f64;
    let a_u = a / scale;
    quadrature::integrate_to_infinity(
        |u, out: &mut [f64]| {
            let v = f(u * scale);
            fill_basis(u, &mut phi);
            for (o, p) in out.iter_mut().zip(&phi) {
                *o = v * p;
            }
        },
        a_u,
        map_scale,
        order,
        ANALYTIC_REL_TOL,
        1e-300,
    )
}

fn expand_analytic(f: &dyn Fn(f64) -> f64, basis: &LaguerreBasis) -> Result<Expansion> {
    let r = integrate_tail(f, 0.0, basis);
    if r.values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("signal produced non-finite Laguerre coefficients"));
    }
    Ok(Expansion {
        series: LaguerreSeries::new(r.values, basis.scale())?,
        tail: TailModel::NotApplicable,
        tail_fraction: 0.0,
        tail_warning: false,
        quadrature_error: r.error,
        converged: r.converged,
    })
}

/// Least-squares fit of `ln v = ln c - λ t` over the final window.
fn fit_tail(ts: &TimeSeries) -> TailModel {
    let times = ts.times();
    let values = ts.values();
    let n = times.len();
    let t0 = times[0];
    let t_max = ts.t_max();
    let cutoff = t_max - TAIL_WINDOW_FRACTION * (t_max - t0);
    let mut start = times.partition_point(|&t| t < cutoff);
    start = start.min(n - 2);
    let window = start..n;
    if values[window.clone()].iter().any(|&v| v <= 0.0) {
        return TailModel::Vanished;
    }
    let m = (n - start) as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for i in window {
        let t = times[i] - t_max;
        let y = values[i].ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let denom = m * stt - st * st;
    let slope = (m * sty - st * sy) / denom;
    let intercept = (sy - slope * st) / m;
    let rate = -slope;
    if !(rate.is_finite() && rate > 0.0) {
        return TailModel::NotDecaying;
    }
    // amplitude is referenced to t_max to avoid overflow of e^(rate·t).
    TailModel::Exponential { amplitude: intercept.exp(), rate }
}

fn expand_sampled(ts: &TimeSeries, basis: &LaguerreBasis) -> Result<Expansion> {
    let order = basis.order();
    let scale = basis.scale();
    let times = ts.times();
    let values = ts.values();
    let n = times.len();

    let mut coeffs = vec![0.0; order];
    let mut phi = vec![0.0; order];
    for i in 0..n {
        let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
        let right = if i + 1 < n { times[i + 1] - times[i] } else { 0.0 };
        let w = 0.5 * (left + right) * values[i] / scale;
        if w == 0.0 {
            continue;
        }
        fill_basis(times[i] / scale, &mut phi);
        for (c, p) in coeffs.iter_mut().zip(&phi) {
            *c += w * p;
        }
    }

    let tail = fit_tail(ts);
    let t_max = ts.t_max();
    let mut tail_fraction = 0.0;
    let tail_warning;
    let mut quadrature_error = 0.0;
    let mut converged = true;
    match tail {
        TailModel::Exponential { amplitude, rate } => {
            let f = move |t: f64| amplitude * (-rate * (t - t_max)).exp();
            let r = integrate_tail(&f, t_max, basis);
            quadrature_error = r.error;
            converged = r.converged;
            for (c, v) in coeffs.iter_mut().zip(&r.values) {
                *c += v;
            }
            tail_fraction = if coeffs[0] != 0.0 {
                (r.values[0] / coeffs[0]).abs()
            } else if r.values[0] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            tail_warning = tail_fraction > TAIL_WARNING_FRACTION;
        }
        TailModel::NotDecaying => tail_warning = true,
        TailModel::Vanished => {
            let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            tail_warning = values[n - 1].abs() > TAIL_WARNING_FRACTION * peak;
        }
        TailModel::NotApplicable => unreachable!(),
    }

    Ok(Expansion {
        series: LaguerreSeries::new(coeffs, scale)?,
        tail,
        tail_fraction,
        tail_warning,
        quadrature_error,
        converged,
    })
}

/// `Σ_n c_n φ_n(t/T)`.
pub fn synthesize(series: &LaguerreSeries, t: f64) -> Result<f64> {
    check_time(t)?;
    let mut phi = vec![0.0; series.len()];
    fill_basis(t / series.scale(), &mut phi);
    Ok(series.coeffs().iter().zip(&phi).map(|(c, p)| c * p).sum())
}

/// `‖a₁ - a₂‖₂`, zero-padding the shorter series.
pub fn coeff_l2_distance(s1: &LaguerreSeries, s2: &LaguerreSeries) -> Result<f64> {
    let (t1, t2) = (s1.scale(), s2.scale());
    if (t1 - t2).abs() > 1e-12 * t1.max(t2) {
        return Err(Error::ScaleMismatch(t1, t2));
    }
    let n = s1.len().max(s2.len());
    let get = |s: &LaguerreSeries, i: usize| s.coeffs().get(i).copied().unwrap_or(0.0);
    Ok((0..n).map(|i| (get(s1, i) - get(s2, i)).powi(2)).sum::<f64>().sqrt())
}
