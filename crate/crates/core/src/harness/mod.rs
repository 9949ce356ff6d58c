//! Replicated experiments and their outputs.
//!
//! A run draws one true parameter, simulates one stationary path per
//! replicate, fits a chain for every `(prior, T, n*)` cell and scores the
//! averaged estimator with the exact risk. Every random stream is derived
//! from the master seed and the cell coordinates, so the table does not
//! depend on scheduling or on which other cells are present.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;

pub use config::ExperimentConfig;
pub use experiment::{
    derive_seed, quantile, quantile_curves, run_experiment, run_experiment_observed,
    QuantileCurve, ResultRow, StateVisit,
};
pub use output::{emit_csv, emit_quantiles_csv, read_csv, write_outputs, OutputFiles};
pub use plot::{emit_plot, reference_curve, render_svg};
