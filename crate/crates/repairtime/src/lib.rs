//! Prediction of future minimal-repair times for k-component series systems
//! whose component lifetimes follow a two-parameter Rayleigh law, observed
//! under hybrid censoring (the test stops at the r-th failure or at time T,
//! whichever comes first).
//!
//! The future quantity is the m-th repair time of a k-component series
//! system, distributionally the m-th lower record value of the system
//! lifetime law. Two Bayesian models are provided:
//!
//! * [`scaled`]: location known (zero), inverted-gamma-flavoured posterior
//!   on the scale; every predictor and interval is closed form.
//! * [`twoparam`]: unknown location with a normal prior, unknown scale;
//!   predictors are one-dimensional integrals handled by adaptive
//!   quadrature on a log-rescaled integrand.
//!
//! [`classical`] adds maximum-likelihood fitting, a Kolmogorov-Smirnov fit
//! statistic, and plug-in (Wald) prediction intervals; [`montecarlo`] runs
//! the frequentist performance studies and the prior model check; [`cli`]
//! exposes everything as a command-line tool.

pub mod classical;
pub mod cli;
pub mod data;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod predictions;
pub mod report;
pub mod scaled;
#[cfg(test)]
pub(crate) mod testdata;
pub mod twoparam;

pub use error::{Error, Result};
pub use model::{
    extract_hybrid_sample, HybridSample, HybridScheme, PredictionTarget, RayleighParams,
};
pub use predictions::{IntervalKind, PointPredictions, PredictionInterval};
