use serde::Serialize;

use crate::record::{PeakClass, StudyRecord};

/// Sample quantile with linear interpolation between order statistics
/// (`h = (n - 1)p`). `None` for an empty sample.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// Equal-width bins over `[0, max]`; the last bin is closed.
    pub fn new(values: &[f64], bins: usize) -> Self {
        let max = values.iter().cloned().fold(0.0f64, f64::max);
        let top = if max > 0.0 { max } else { 1.0 };
        let width = top / bins as f64;
        let edges = (0..=bins).map(|i| if i == bins { top } else { i as f64 * width }).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let i = ((v.max(0.0) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Empirical density per bin.
    pub fn density(&self) -> Vec<f64> {
        let n = self.total().max(1) as f64;
        self.counts.iter().zip(self.edges.windows(2)).map(|(&c, e)| c as f64 / (n * (e[1] - e[0]))).collect()
    }
}

/// Fewer members than this mark a class as low confidence.
pub const MIN_CLASS_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub count: usize,
    pub median_sign_changes: Option<f64>,
    pub median_error_sign_changes: Option<f64>,
    /// Members whose reconstruction peaks after `t = 0`.
    pub delayed_peaks: usize,
    pub median_recon_peak_time: Option<f64>,
    pub low_confidence: bool,
}

impl ClassStats {
    fn of(records: &[&StudyRecord]) -> Self {
        let sc: Vec<f64> = records.iter().map(|r| r.sign_changes as f64).collect();
        let esc: Vec<f64> = records.iter().map(|r| r.error_sign_changes as f64).collect();
        let pt: Vec<f64> = records.iter().map(|r| r.recon_peak_time).collect();
        Self {
            count: records.len(),
            median_sign_changes: median(&sc),
            median_error_sign_changes: median(&esc),
            delayed_peaks: pt.iter().filter(|&&t| t > 0.0).count(),
            median_recon_peak_time: median(&pt),
            low_confidence: records.len() < MIN_CLASS_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bifurcation {
    pub early: ClassStats,
    pub late: ClassStats,
    /// `median(early) > median(late)`; `None` unless both classes are present.
    pub early_oscillates_more: Option<bool>,
}

pub fn classify_bifurcation(records: &[StudyRecord]) -> Bifurcation {
    let early: Vec<&StudyRecord> = records.iter().filter(|r| r.peak_class == PeakClass::Early).collect();
    let late: Vec<&StudyRecord> = records.iter().filter(|r| r.peak_class == PeakClass::Late).collect();
    let (early, late) = (ClassStats::of(&early), ClassStats::of(&late));
    let early_oscillates_more = match (early.median_sign_changes, late.median_sign_changes) {
        (Some(e), Some(l)) => Some(e > l),
        _ => None,
    };
    Bifurcation { early, late, early_oscillates_more }
}

/// Sign changes of `values`, ignoring samples with `|v| ≤ deadband·max|v|`.
pub fn sign_changes(values: &[f64], deadband: f64) -> usize {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = deadband * max;
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v.abs() <= threshold {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(quantile(&v, 0.0), Some(1.0));
        assert_eq!(quantile(&v, 1.0), Some(4.0));
        assert_eq!(median(&v), Some(2.5));
        assert_eq!(quantile(&v, 0.25), Some(1.75));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn histogram_counts_everything() {
        let v = [0.0, 0.1, 0.5, 1.0, 2.0, 2.0];
        let h = Histogram::new(&v, 20);
        assert_eq!(h.total(), v.len());
        assert_eq!(h.counts[19], 2);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(*h.edges.last().unwrap(), 2.0);
        let area: f64 = h.density().iter().zip(h.edges.windows(2)).map(|(d, e)| d * (e[1] - e[0])).sum();
        assert!((area - 1.0).abs() < 1e-12);
        assert_eq!(Histogram::new(&[0.0, 0.0], 4).counts, vec![2, 0, 0, 0]);
    }

    #[test]
    fn sign_changes_with_deadband() {
        assert_eq!(sign_changes(&[1.0, 2.0, 0.5], 1e-3), 0);
        assert_eq!(sign_changes(&[1.0, -1.0, 1.0, -1.0], 1e-3), 3);
        // roundoff-level wiggles around zero are ignored
        assert_eq!(sign_changes(&[1.0, 1e-6, -1e-6, 1e-6, 0.5], 1e-3), 0);
        assert_eq!(sign_changes(&[1.0, 0.0, -0.5], 1e-3), 1);
        assert_eq!(sign_changes(&[], 1e-3), 0);
    }
}
