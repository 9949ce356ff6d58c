//! Calculators for the oracle-inequality constants and the MCMC iteration
//! budgets. All logarithms are natural.

use std::f64::consts::{LN_2, PI};

use libm::erfc;

use crate::error::{Error, Result};

/// Ingredients of the oracle constant `𝓔`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// Lipschitz constant of the loss.
    pub k: f64,
    /// `A* = Σ_j A_j`.
    pub a_star: f64,
    /// `Ã* = Σ_j j A_j`.
    pub a_tilde: f64,
    /// `φ(A*) = E[exp(A* |ξ|)]`.
    pub phi_a: f64,
    pub d_lip: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub gamma0: f64,
    pub epsilon: f64,
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("K", self.k),
            ("A*", self.a_star),
            ("Ã*", self.a_tilde),
            ("φ(A*)", self.phi_a),
            ("D", self.d_lip),
            ("γ0", self.gamma0),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.c1 >= 0.0 && self.c1.is_finite()) {
            return Err(Error::invalid(format!("C1 must be nonnegative, got {}", self.c1)));
        }
        for (name, v) in [("C2", self.c2), ("C3", self.c3)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// The constant `𝓔` of the oracle inequality for the exact Gibbs predictor.
pub fn oracle_constant_e(c: &BoundConstants) -> f64 {
    let l2 = LN_2;
    let k = c.k;
    c.c1 + 8.0 + 2.0 / l2 - 2.0 * c.c2.ln() / (l2 * l2) - 4.0 * c.c3.ln() / l2
        + 8.0 * k * k * (c.a_star + c.a_tilde).powi(2) / (c.a_tilde * c.a_tilde)
        + k * c.d_lip * c.c3 / (8.0 * l2.powi(3))
        + 4.0 * k * c.phi_a / l2
        + 2.0 * k * k * c.phi_a / (l2 * l2)
}

fn check_t_eps(t: f64, epsilon: f64) -> Result<()> {
    if !(t >= 4.0) {
        return Err(Error::invalid(format!("sample size must be at least 4, got {t}")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    Ok(())
}

/// `inf_risk + E (ln T)³/√T + 8 (ln T/√T) ln(1/ε)`.
pub fn exact_predictor_bound(t: f64, epsilon: f64, e: f64, inf_risk: f64) -> Result<f64> {
    check_t_eps(t, epsilon)?;
    let lt = t.ln();
    let rt = t.sqrt();
    Ok(inf_risk + e * lt.powi(3) / rt + 8.0 * lt / rt * (1.0 / epsilon).ln())
}

/// Bound for the MCMC approximation once `n ≥ M(T, ε)`: the constant grows
/// to `E + 2/ln 2 + 2`.
pub fn mcmc_predictor_bound(t: f64, epsilon: f64, e: f64, inf_risk: f64) -> Result<f64> {
    exact_predictor_bound(t, epsilon, e + 2.0 / LN_2 + 2.0, inf_risk)
}

/// `M(T, ε) = A² T / (ε² (ln T)⁶)`.
pub fn mcmc_budget_m(t: f64, epsilon: f64, a_eta_t: f64) -> Result<f64> {
    check_t_eps(t, epsilon)?;
    if !(a_eta_t >= 0.0) {
        return Err(Error::invalid(format!("A must be nonnegative, got {a_eta_t}")));
    }
    Ok(a_eta_t * a_eta_t * t / (epsilon * epsilon * t.ln().powi(6)))
}

/// `M*(T, ε) = 9 γ0³ T² exp(γ0 T/16) / (2π ε² (ln T)³)`.
///
/// Evaluated in log space; returns `+inf` once the value leaves the `f64`
/// range.
pub fn ar_budget_m_star(t: f64, epsilon: f64, gamma0: f64) -> Result<f64> {
    check_t_eps(t, epsilon)?;
    if !(gamma0 >= 0.0) {
        return Err(Error::invalid(format!("gamma0 must be nonnegative, got {gamma0}")));
    }
    if gamma0 == 0.0 {
        return Ok(0.0);
    }
    let log_value = 9f64.ln() + 3.0 * gamma0.ln() + 2.0 * t.ln() + gamma0 * t / 16.0
        - (2.0 * PI).ln()
        - 2.0 * epsilon.ln()
        - 3.0 * t.ln().ln();
    Ok(log_value.exp())
}

/// `γ0 ≤ K̄² σ² / (1 - δ1²)`.
pub fn gamma0_upper_bound(sigma: f64, k_bar: f64, delta1: f64) -> Result<f64> {
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::invalid(format!("delta1 must lie in (0, 1), got {delta1}")));
    }
    Ok(k_bar * k_bar * sigma * sigma / (1.0 - delta1 * delta1))
}

/// `(A*, Ã*)` for AR Lipschitz coefficients `A_j = σ K̄ δ1^j`.
pub fn ar_lipschitz_sums(sigma: f64, k_bar: f64, delta1: f64) -> Result<(f64, f64)> {
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::invalid(format!("delta1 must lie in (0, 1), got {delta1}")));
    }
    let scale = sigma * k_bar;
    let a_star = scale / (1.0 - delta1);
    let a_tilde = scale * delta1 / ((1.0 - delta1) * (1.0 - delta1));
    Ok((a_star, a_tilde))
}

/// `E[exp(a |ξ|)]` for standard normal `ξ`: `2 e^{a²/2} Φ(a)`.
pub fn gaussian_abs_mgf(a: f64) -> f64 {
    let cdf = 0.5 * erfc(-a / std::f64::consts::SQRT_2);
    2.0 * (a * a / 2.0).exp() * cdf
}
