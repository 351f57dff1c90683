//! Random log-conductivity fields and transient groundwater impulse
//! responses on a rectangular aquifer.
//!
//! [`kle_build`] and [`sample_field`] produce `ln K` realizations from a
//! truncated Karhunen-Loève expansion; [`simulate_impulse`] computes the head
//! at a probe point after a unit impulse on the left boundary, and
//! [`greens_coeffs`] turns that response into Laguerre transfer coefficients.

pub mod analytic;
pub mod config;
pub mod error;
pub mod kle;
pub mod response;
pub mod solver;

pub use config::{CovarianceConfig, DomainConfig};
pub use error::{Error, Result};
pub use kle::{kle_build, sample_field, FieldRealization, KleBasis, KleMode};
pub use response::{greens_coeffs, greens_expansion, write_field_csv};
pub use solver::{simulate, simulate_impulse, Conductivity, ImpulseResponse, Run};
