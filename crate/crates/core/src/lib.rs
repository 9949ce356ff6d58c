//! Forecasting autoregressive time series with the Gibbs aggregation
//! predictor.
//!
//! The crate is organised bottom-up:
//!
//! - [`timeseries`]: stable AR(d) processes, autocovariances and exact
//!   stationary simulation.
//! - [`stable_domain`]: reflection-coefficient maps, uniform sampling on the
//!   stability domain and the sparse order prior over candidate predictors.
//! - [`risk`]: absolute loss, empirical risk and the closed-form risk of a
//!   linear predictor under a Gaussian AR process.
//! - [`gibbs_mcmc`]: the independent Hastings sampler that approximates the
//!   Gibbs estimator, plus an importance-sampling cross-check.
//! - [`bounds`]: calculators for the oracle-inequality constants and MCMC
//!   iteration budgets.
//! - [`harness`]: replicated experiments, quantile curves, CSV/SVG output.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod gibbs_mcmc;
pub mod harness;
pub mod risk;
pub mod stable_domain;
pub mod timeseries;

pub use error::{Error, Result};
