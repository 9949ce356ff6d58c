//! Absolute loss, empirical risk and the closed-form risk of linear
//! predictors under a Gaussian AR process.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::timeseries::{covariance_matrix, ArParams, Path};

pub fn absolute_loss(y: f64, z: f64) -> f64 {
    (y - z).abs()
}

/// Index of the last nonzero coefficient (1-based), with the zero vector
/// treated as order 1.
pub fn effective_order(theta: &[f64]) -> usize {
    theta.iter().rposition(|&v| v != 0.0).map_or(1, |i| i + 1)
}

/// Mean absolute one-step-ahead error of `X̂_t = Σ_j θ_j X_{t-j}` over
/// `t = d(θ)+1..T`.
pub fn empirical_risk(theta: &[f64], path: &Path) -> Result<f64> {
    let d = effective_order(theta);
    let x = path.values();
    if d >= x.len() {
        return Err(Error::invalid(format!(
            "predictor order {d} needs more than {} observations",
            x.len()
        )));
    }
    let coeffs = &theta[..d.min(theta.len())];
    let mut total = 0.0;
    for t in d..x.len() {
        let mut pred = 0.0;
        for (j, &c) in coeffs.iter().enumerate() {
            pred += c * x[t - 1 - j];
        }
        total += absolute_loss(pred, x[t]);
    }
    Ok(total / (x.len() - d) as f64)
}

/// Smallest achievable absolute-loss risk, `σ (2/π)^{1/2}`.
pub fn minimal_risk(sigma: f64) -> f64 {
    sigma * (2.0 / PI).sqrt()
}

/// Exact risk evaluator for predictors of dimension `predictor_dim`.
///
/// The covariance matrix spans `max(predictor_dim, d)` lags so that a
/// predictor shorter than the true order is still scored correctly.
#[derive(Debug, Clone)]
pub struct RiskOracle {
    true_params: ArParams,
    predictor_dim: usize,
    gamma_matrix: DMatrix<f64>,
    padded_theta: DVector<f64>,
}

impl RiskOracle {
    pub fn new(true_params: ArParams, predictor_dim: usize) -> Result<Self> {
        if predictor_dim == 0 {
            return Err(Error::invalid("predictor dimension must be at least 1"));
        }
        let dim = predictor_dim.max(true_params.order());
        let gamma_matrix = covariance_matrix(&true_params, dim)?;
        let mut padded_theta = DVector::zeros(dim);
        padded_theta
            .rows_mut(0, true_params.order())
            .copy_from_slice(true_params.theta());
        Ok(Self {
            true_params,
            predictor_dim,
            gamma_matrix,
            padded_theta,
        })
    }

    pub fn true_params(&self) -> &ArParams {
        &self.true_params
    }

    pub fn predictor_dim(&self) -> usize {
        self.predictor_dim
    }

    pub fn gamma_matrix(&self) -> &DMatrix<f64> {
        &self.gamma_matrix
    }

    /// True coefficients zero-padded to the oracle dimension.
    pub fn padded_theta(&self) -> &[f64] {
        self.padded_theta.as_slice()
    }
}

/// `R(θ̂) = [2 (θ̂-θ)' Γ (θ̂-θ) + 2σ²]^{1/2} / π^{1/2}`.
pub fn exact_risk(theta_hat: &[f64], oracle: &RiskOracle) -> Result<f64> {
    if theta_hat.len() != oracle.predictor_dim {
        return Err(Error::invalid(format!(
            "predictor has {} coefficients, oracle expects {}",
            theta_hat.len(),
            oracle.predictor_dim
        )));
    }
    let dim = oracle.padded_theta.len();
    let diff = DVector::from_fn(dim, |i, _| {
        theta_hat.get(i).copied().unwrap_or(0.0) - oracle.padded_theta[i]
    });
    let quad = (diff.transpose() * &oracle.gamma_matrix * &diff)[(0, 0)].max(0.0);
    let sigma = oracle.true_params.sigma();
    Ok(((2.0 * quad + 2.0 * sigma * sigma) / PI).sqrt())
}

/// Excess over the baseline `(2/π)^{1/2} σ²`.
pub fn excess_risk(risk: f64, sigma: f64) -> f64 {
    risk - (2.0 / PI).sqrt() * sigma * sigma
}
