//! Laguerre-spectral deconvolution through imperfectly known transfer
//! functions.
//!
//! Signals on `[0, ∞)` are expanded in Laguerre functions ([`laguerre`]).
//! Causal convolution then becomes multiplication by a lower-triangular
//! Toeplitz matrix ([`toeplitz`]), inverse problems become triangular solves
//! ([`deconv`]), and the effect of using the wrong transfer matrix can be
//! bounded from the dominant coefficients alone ([`bounds`]).

pub mod bounds;
pub mod deconv;
pub mod error;
pub mod laguerre;
mod quadrature;
pub mod toeplitz;

pub use bounds::{lower_bound_k1, lower_bound_k2, upper_bound, BoundReport};
pub use deconv::{Estimate, Estimator, Observation, ObservationSet};
pub use error::{Error, Result};
pub use laguerre::{LaguerreBasis, LaguerreSeries, Signal, TimeSeries};
pub use toeplitz::{spectral_norm, LinearOperator, LttMatrix};
