//! Independent Hastings sampler for the Gibbs estimator.
//!
//! The target is the prior `π_T` reweighted by `exp(-η r_T(θ | X))`. The
//! proposal is a fresh prior draw, so the acceptance ratio reduces to
//! `exp(η r_T(current) - η r_T(candidate))`. The chain starts at `θ = 0` and
//! its running average over all `n*` states (initial state included) is the
//! numerical Gibbs estimator `θ̄`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::risk::empirical_risk;
use crate::stable_domain::{PriorSampler, PriorSpec};
use crate::timeseries::Path;

/// `η_T = T^{1/2} / (4 ln T)`.
pub fn learning_rate(t: f64) -> Result<f64> {
    if !(t >= 4.0) {
        return Err(Error::invalid(format!("sample size must be at least 4, got {t}")));
    }
    Ok(t.sqrt() / (4.0 * t.ln()))
}

/// `d_T = min(⌊(ln T)^γ⌋, ⌊T/2⌋)`.
pub fn effective_dim(t: usize, gamma: f64) -> Result<usize> {
    if t < 4 {
        return Err(Error::invalid(format!("sample size must be at least 4, got {t}")));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("gamma must be at least 1, got {gamma}")));
    }
    let raw = (t as f64).ln().powf(gamma).floor() as usize;
    Ok(raw.min(t / 2).max(1))
}

/// `α = exp(η (r_current - r_candidate))`, not clipped at one.
pub fn acceptance_ratio(eta: f64, r_current: f64, r_candidate: f64) -> f64 {
    (eta * (r_current - r_candidate)).exp()
}

/// Accept/reject rule shared by every sampler in this module.
pub fn accepts(eta: f64, r_current: f64, r_candidate: f64, u: f64) -> bool {
    u <= acceptance_ratio(eta, r_current, r_candidate)
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub eta: f64,
    pub n_star: usize,
    pub prior: PriorSpec,
    pub seed: u64,
}

impl ChainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!("eta must be nonnegative, got {}", self.eta)));
        }
        if self.n_star < 1 {
            return Err(Error::invalid("n_star must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub theta_bar: Vec<f64>,
    pub acceptance_count: usize,
    pub n_star: usize,
    pub final_state: Vec<f64>,
}

impl ChainSummary {
    /// Fraction of the `n* - 1` proposals that were accepted (0 when no
    /// proposal was made).
    pub fn acceptance_rate(&self) -> f64 {
        if self.n_star > 1 {
            self.acceptance_count as f64 / (self.n_star - 1) as f64
        } else {
            0.0
        }
    }
}

/// Runs the sampler and returns the averaged estimator.
pub fn run_chain(path: &Path, config: &ChainConfig) -> Result<ChainSummary> {
    run_chain_observed(path, config, |_, _| {})
}

/// Like [`run_chain`], calling `observe(i, state)` on every state
/// `i = 0..n*`, including the initial zero vector.
pub fn run_chain_observed<F>(path: &Path, config: &ChainConfig, mut observe: F) -> Result<ChainSummary>
where
    F: FnMut(usize, &[f64]),
{
    config.validate()?;
    let d_t = config.prior.d_t;
    if path.len() < 4 {
        return Err(Error::invalid(format!("path length {} is below 4", path.len())));
    }
    if d_t >= path.len() {
        return Err(Error::invalid(format!(
            "effective dimension {d_t} needs more than {} observations",
            path.len()
        )));
    }
    let sampler = PriorSampler::new(&config.prior)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut state = vec![0.0; d_t];
    let mut state_risk = empirical_risk(&state, path)?;
    let mut sum = vec![0.0; d_t];
    let mut accepted = 0;
    observe(0, &state);

    for i in 1..config.n_star {
        let candidate = sampler.sample(&mut rng);
        let candidate_risk = empirical_risk(&candidate, path)?;
        let u: f64 = rng.random();
        if accepts(config.eta, state_risk, candidate_risk, u) {
            state = candidate;
            state_risk = candidate_risk;
            accepted += 1;
        }
        for (s, v) in sum.iter_mut().zip(&state) {
            *s += v;
        }
        observe(i, &state);
    }

    let n = config.n_star as f64;
    Ok(ChainSummary {
        theta_bar: sum.into_iter().map(|s| s / n).collect(),
        acceptance_count: accepted,
        n_star: config.n_star,
        final_state: state,
    })
}

/// Self-normalised importance-sampling estimate of the Gibbs estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsMeanEstimate {
    pub mean: Vec<f64>,
    /// Delta-method standard error per coordinate.
    pub std_error: Vec<f64>,
    /// Kish effective sample size of the weights.
    pub effective_sample_size: f64,
}

/// Importance-sampling estimate with the prior as proposal and weights
/// `exp(-η r_T)`, re-centred by the largest log-weight.
pub fn gibbs_mean_estimate<R: Rng + ?Sized>(
    path: &Path,
    prior: &PriorSpec,
    eta: f64,
    n_draws: usize,
    rng: &mut R,
) -> Result<GibbsMeanEstimate> {
    if n_draws < 1 {
        return Err(Error::invalid("n_draws must be at least 1"));
    }
    let sampler = PriorSampler::new(prior)?;
    let mut draws = Vec::with_capacity(n_draws);
    let mut log_w = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let theta = sampler.sample(rng);
        log_w.push(-eta * empirical_risk(&theta, path)?);
        draws.push(theta);
    }
    let (mean, std_error, ess) = weighted_moments(&draws, &log_w)?;
    Ok(GibbsMeanEstimate {
        mean,
        std_error,
        effective_sample_size: ess,
    })
}

/// Mean part of [`gibbs_mean_estimate`].
pub fn gibbs_mean_oracle<R: Rng + ?Sized>(
    path: &Path,
    prior: &PriorSpec,
    eta: f64,
    n_draws: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    Ok(gibbs_mean_estimate(path, prior, eta, n_draws, rng)?.mean)
}

/// Normalised weighted mean, its standard error and the effective sample
/// size, from log-weights.
pub fn weighted_moments(draws: &[Vec<f64>], log_w: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Numerical("log-weights are not finite".into()));
    }
    let w: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Numerical("importance weights underflowed".into()));
    }
    let dim = draws.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; dim];
    for (theta, wi) in draws.iter().zip(&w) {
        for (m, v) in mean.iter_mut().zip(theta) {
            *m += wi * v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= total);
    let mut var = vec![0.0; dim];
    for (theta, wi) in draws.iter().zip(&w) {
        for ((s, v), m) in var.iter_mut().zip(theta).zip(&mean) {
            *s += (wi * (v - m)).powi(2);
        }
    }
    let std_error = var.into_iter().map(|s| s.sqrt() / total).collect();
    let ess = total * total / w.iter().map(|x| x * x).sum::<f64>();
    Ok((mean, std_error, ess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable_domain::{sample_prior, PriorKind};
    use crate::timeseries::{is_stable, simulate_stationary, ArParams};
    use approx::assert_relative_eq;

    fn test_path(t: usize, seed: u64) -> Path {
        let params = ArParams::new(vec![0.6, -0.3], 1.0).unwrap();
        simulate_stationary(&params, t, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn learning_rate_examples() {
        let e2 = 2f64.exp();
        assert_relative_eq!(learning_rate(e2).unwrap(), e2.sqrt() / 8.0, epsilon = 1e-15);
        assert_relative_eq!(learning_rate(e2).unwrap(), 0.3398, epsilon = 1e-4);
        assert_relative_eq!(learning_rate(4096.0).unwrap(), 64.0 / (4.0 * 4096f64.ln()), epsilon = 1e-12);
        assert!(learning_rate(3.0).is_err());
        let grid: Vec<f64> = (3..=12).map(|j| 2f64.powi(j)).collect();
        for w in grid.windows(2) {
            assert!(learning_rate(w[1]).unwrap() > learning_rate(w[0]).unwrap());
        }
    }

    #[test]
    fn effective_dim_examples() {
        assert_eq!(effective_dim(4096, 1.0).unwrap(), 8);
        assert_eq!(effective_dim(64, 1.0).unwrap(), 4);
        assert_eq!(effective_dim(4, 1.0).unwrap(), 1);
        assert_eq!(effective_dim(32, 1.0).unwrap(), 3);
        // capped at T/2
        assert_eq!(effective_dim(8, 3.0).unwrap(), 4);
        assert!(effective_dim(3, 1.0).is_err());
        assert!(effective_dim(64, 0.5).is_err());
    }

    #[test]
    fn acceptance_ratio_examples() {
        assert_eq!(acceptance_ratio(1.7, 0.4, 0.4), 1.0);
        assert_relative_eq!(acceptance_ratio(2.0, 0.5, 0.25), 0.5f64.exp(), epsilon = 1e-15);
        assert_relative_eq!(acceptance_ratio(2.0, 0.5, 0.25), 1.6487, epsilon = 1e-4);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let (a, b, eta): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
            assert_relative_eq!(
                acceptance_ratio(eta, a, b) * acceptance_ratio(eta, b, a),
                1.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn single_state_chain_is_zero() {
        let path = test_path(64, 1);
        let prior = PriorSpec::new(PriorKind::InverseSquare, 64, 1.0).unwrap();
        let cfg = ChainConfig { eta: 1.0, n_star: 1, prior, seed: 3 };
        let s = run_chain(&path, &cfg).unwrap();
        assert_eq!(s.theta_bar, vec![0.0; 4]);
        assert_eq!(s.acceptance_count, 0);
        assert_eq!(s.acceptance_rate(), 0.0);
    }

    #[test]
    fn huge_eta_rejects_everything_on_zero_path() {
        // on a zero path every candidate has risk 0 = risk of the start,
        // so use a path where the zero predictor is the unique best one
        let mut x = vec![0.0; 64];
        x[10] = 1e6;
        x[40] = -1e6;
        let path = Path::new(x).unwrap();
        let prior = PriorSpec::new(PriorKind::Exponential, 64, 1.0).unwrap();
        let cfg = ChainConfig { eta: 1e6, n_star: 500, prior, seed: 4 };
        let s = run_chain(&path, &cfg).unwrap();
        assert_eq!(s.acceptance_count, 0);
        assert_eq!(s.theta_bar, vec![0.0; 4]);
    }

    #[test]
    fn zero_eta_accepts_everything_and_matches_prior_mean() {
        let path = test_path(128, 2);
        let prior = PriorSpec::new(PriorKind::InverseSquare, 128, 1.0).unwrap();
        let n = 40_000;
        let cfg = ChainConfig { eta: 0.0, n_star: n, prior: prior.clone(), seed: 5 };
        let s = run_chain(&path, &cfg).unwrap();
        assert_eq!(s.acceptance_count, n - 1);
        assert_eq!(s.acceptance_rate(), 1.0);

        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let draws: Vec<Vec<f64>> = (0..n).map(|_| sample_prior(&prior, &mut rng).unwrap()).collect();
        for j in 0..prior.d_t {
            let col: Vec<f64> = draws.iter().map(|d| d[j]).collect();
            let m = col.iter().sum::<f64>() / n as f64;
            let sd = (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64).sqrt();
            let se = sd * (2.0 / n as f64).sqrt();
            assert!((s.theta_bar[j] - m).abs() < 3.0 * se + 1e-9, "coordinate {j}");
        }
    }

    #[test]
    fn chain_mean_and_invariants() {
        let path = test_path(256, 7);
        let prior = PriorSpec::new(PriorKind::InverseSquare, 256, 1.0).unwrap();
        let radius = prior.radius;
        let cfg = ChainConfig { eta: learning_rate(256.0).unwrap(), n_star: 3_000, prior, seed: 8 };
        let mut states: Vec<Vec<f64>> = Vec::new();
        let s = run_chain_observed(&path, &cfg, |i, st| {
            assert_eq!(i, states.len());
            states.push(st.to_vec());
        })
        .unwrap();
        assert_eq!(states.len(), 3_000);
        for st in &states {
            assert!(is_stable(st, 1.0).unwrap());
            assert!(st.iter().map(|v| v.abs()).sum::<f64>() <= radius + 1e-12);
        }
        for j in 0..s.theta_bar.len() {
            let mean = states.iter().map(|st| st[j]).sum::<f64>() / states.len() as f64;
            assert!((mean - s.theta_bar[j]).abs() < 1e-12);
        }
        assert!(s.theta_bar.iter().map(|v| v.abs()).sum::<f64>() <= radius + 1e-12);
        assert!(s.acceptance_count < s.n_star);
        assert_eq!(&s.final_state, states.last().unwrap());
        assert_eq!(run_chain(&path, &cfg).unwrap(), s);
    }

    #[test]
    fn oracle_at_zero_eta_is_prior_mean() {
        let path = test_path(64, 9);
        let prior = PriorSpec::new(PriorKind::Exponential, 64, 1.0).unwrap();
        let a = gibbs_mean_oracle(&path, &prior, 0.0, 2_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sampler = PriorSampler::new(&prior).unwrap();
        let mut mean = vec![0.0; prior.d_t];
        for _ in 0..2_000 {
            for (m, v) in mean.iter_mut().zip(sampler.sample(&mut rng)) {
                *m += v / 2_000.0;
            }
        }
        for (x, y) in a.iter().zip(&mean) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn weights_invariant_to_risk_shift() {
        let draws = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![-1.0, 1.0]];
        let log_w = vec![-0.3, -1.2, -0.7];
        let shifted: Vec<f64> = log_w.iter().map(|l| l - 700.0).collect();
        let (a, _, _) = weighted_moments(&draws, &log_w).unwrap();
        let (b, _, _) = weighted_moments(&draws, &shifted).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        assert!(weighted_moments(&draws, &[f64::NEG_INFINITY; 3]).is_err());
    }

    /// Same acceptance rule on a two-point space: the chain's occupation
    /// frequencies follow `p_i exp(-η r_i)`.
    #[test]
    fn two_point_detailed_balance() {
        let prior = [0.3, 0.7];
        let risk = [0.2, 1.1];
        let eta = 1.5;
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 200_000;
        let mut state = 0usize;
        let mut visits = [0usize; 2];
        for _ in 0..n {
            let cand = if rng.random::<f64>() < prior[0] { 0 } else { 1 };
            if accepts(eta, risk[state], risk[cand], rng.random()) {
                state = cand;
            }
            visits[state] += 1;
        }
        let w0 = prior[0] * (-eta * risk[0]).exp();
        let w1 = prior[1] * (-eta * risk[1]).exp();
        let target = w0 / (w0 + w1);
        let freq = visits[0] as f64 / n as f64;
        // chain autocorrelation inflates the variance by (1+λ)/(1-λ) with
        // λ = 1 - p01 - p10 ≈ 0.52, below the factor 4 used here
        let se = (target * (1.0 - target) / n as f64 * 4.0).sqrt();
        assert!((freq - target).abs() < 3.0 * se, "{freq} vs {target}");
    }
}
