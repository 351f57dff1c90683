use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PeakClass {
    /// The true response peaks before the reference model's.
    Early,
    Late,
}

impl PeakClass {
    pub fn of(peak_time_true: f64, peak_time_model: f64) -> Self {
        if peak_time_true < peak_time_model {
            PeakClass::Early
        } else {
            PeakClass::Late
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            PeakClass::Early => "early",
            PeakClass::Late => "late",
        }
    }
}

/// Outcome of one realization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub seed: u64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub lower_k1: f64,
    pub lower_k2: f64,
    pub upper: f64,
    /// Dominant Laguerre coefficient of the true and reference responses.
    pub b0: f64,
    pub b0_tilde: f64,
    pub peak_time_true: f64,
    pub peak_time_model: f64,
    pub peak_class: PeakClass,
    pub sign_changes: usize,
    /// Sign changes of the reconstruction minus the true input, same grid
    /// and dead-band.
    pub error_sign_changes: usize,
    /// Time of the largest value of the reconstructed boundary series.
    pub recon_peak_time: f64,
}

/// Slack on the lower bounds.
pub const LOWER_SLACK: f64 = 1e-8;
/// Slack on the upper bound.
pub const UPPER_SLACK: f64 = 1e-6;

impl StudyRecord {
    /// `lower_k1 ≤ lower_k2 ≤ rel_error ≤ upper` within the slacks.
    pub fn bounds_hold(&self) -> bool {
        self.lower_k1 <= self.lower_k2 + LOWER_SLACK
            && self.lower_k2 <= self.rel_error + LOWER_SLACK
            && self.lower_k1 <= self.rel_error + LOWER_SLACK
            && self.rel_error <= self.upper + UPPER_SLACK
    }
}

pub const RECORD_COLUMNS: [&str; 14] = [
    "seed",
    "abs_error",
    "rel_error",
    "lower_k1",
    "lower_k2",
    "upper",
    "b0",
    "b0_tilde",
    "peak_time_true",
    "peak_time_model",
    "peak_class",
    "sign_changes",
    "error_sign_changes",
    "recon_peak_time",
];

pub(crate) fn float(v: f64) -> String {
    format!("{v:.16e}")
}

impl StudyRecord {
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            float(self.abs_error),
            float(self.rel_error),
            float(self.lower_k1),
            float(self.lower_k2),
            float(self.upper),
            float(self.b0),
            float(self.b0_tilde),
            float(self.peak_time_true),
            float(self.peak_time_model),
            self.peak_class.as_str().to_string(),
            self.sign_changes.to_string(),
            self.error_sign_changes.to_string(),
            float(self.recon_peak_time),
        ]
    }
}
