//! Monte Carlo study of deconvolution error under model mismatch.
//!
//! Each realization draws a heterogeneous log-conductivity field, simulates
//! the impulse response at the probe, and reconstructs a known boundary
//! input through the homogeneous reference model. Records carry the realized
//! error, its analytical bounds, the peak-time class and the number of sign
//! changes of the reconstruction.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod record;
pub mod stats;
mod svg;

pub use config::StudyConfig;
pub use error::{Error, Result};
pub use output::emit_outputs;
pub use pipeline::{reconstruct_boundary, run_study, StudyOutput, StudySummary};
pub use record::{PeakClass, StudyRecord};
pub use stats::{classify_bifurcation, sign_changes, Bifurcation};
