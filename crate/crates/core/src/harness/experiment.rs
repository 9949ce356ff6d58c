use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gibbs_mcmc::{effective_dim, learning_rate, run_chain_observed, ChainConfig};
use crate::harness::config::ExperimentConfig;
use crate::risk::{exact_risk, excess_risk, RiskOracle};
use crate::stable_domain::{sample_true_theta, PriorKind, PriorSpec};
use crate::timeseries::{simulate_stationary, ArParams, Path};

const STREAM_THETA: u64 = 1;
const STREAM_PATH: u64 = 2;
const STREAM_CHAIN: u64 = 3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes the master seed with a list of coordinates into a stream seed.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(master), |h, &c| splitmix64(h ^ splitmix64(c)))
}

fn prior_index(kind: PriorKind) -> u64 {
    match kind {
        PriorKind::InverseSquare => 1,
        PriorKind::Exponential => 2,
    }
}

/// One fitted chain, scored against the true model.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub prior: PriorKind,
    pub t: usize,
    pub n_star: usize,
    pub replicate: usize,
    pub seed: u64,
    pub theta_bar: Vec<f64>,
    pub risk: f64,
    pub excess_risk: f64,
    pub acceptance_rate: f64,
}

impl ResultRow {
    pub fn sort_key(&self) -> (PriorKind, usize, usize, usize) {
        (self.prior, self.t, self.n_star, self.replicate)
    }
}

/// A chain state as seen by [`run_experiment_observed`].
#[derive(Debug)]
pub struct StateVisit<'a> {
    pub prior: PriorKind,
    pub t: usize,
    pub n_star: usize,
    pub replicate: usize,
    pub step: usize,
    pub d_t: usize,
    pub radius: f64,
    pub state: &'a [f64],
}

/// The true AR model of a run: pinned by the config or drawn from
/// `s_d(delta)` with a dedicated stream.
pub fn true_params(config: &ExperimentConfig) -> Result<ArParams> {
    let theta = match &config.true_theta {
        Some(theta) => theta.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.master_seed, &[STREAM_THETA]));
            sample_true_theta(config.d, config.delta, &mut rng)?
        }
    };
    ArParams::stable(theta, config.sigma)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment_observed(config, |_| {})
}

/// Runs every `(prior, T, n*, replicate)` cell, calling `observe` on each
/// chain state. Rows come back sorted by `(prior, T, n*, replicate)`.
pub fn run_experiment_observed<F>(config: &ExperimentConfig, observe: F) -> Result<Vec<ResultRow>>
where
    F: Fn(&StateVisit<'_>) + Sync,
{
    config.validate()?;
    let params = true_params(config)?;
    let master = config.master_seed;

    let paths: Vec<BTreeMap<usize, Path>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| -> Result<BTreeMap<usize, Path>> {
            let mut by_t = BTreeMap::new();
            if config.independent_paths {
                for &t in &config.t_grid {
                    let seed = derive_seed(master, &[STREAM_PATH, r as u64, t as u64]);
                    let path = simulate_stationary(&params, t, &mut ChaCha8Rng::seed_from_u64(seed))?;
                    by_t.insert(t, path);
                }
            } else {
                let seed = derive_seed(master, &[STREAM_PATH, r as u64]);
                let long = simulate_stationary(&params, config.max_t(), &mut ChaCha8Rng::seed_from_u64(seed))?;
                for &t in &config.t_grid {
                    by_t.insert(t, long.prefix(t)?);
                }
            }
            Ok(by_t)
        })
        .collect::<Result<_>>()?;

    let mut oracles = BTreeMap::new();
    for &t in &config.t_grid {
        let d_t = effective_dim(t, config.gamma)?;
        oracles.insert(t, RiskOracle::new(params.clone(), d_t)?);
    }

    let mut cells = Vec::new();
    for &prior in &config.priors {
        for &t in &config.t_grid {
            for &n_star in &config.n_star_grid {
                for r in 0..config.replicates {
                    cells.push((prior, t, n_star, r));
                }
            }
        }
    }

    let mut rows: Vec<ResultRow> = cells
        .into_par_iter()
        .map(|(prior, t, n_star, r)| -> Result<ResultRow> {
            let spec = PriorSpec::new(prior, t, config.gamma)?;
            let (d_t, radius) = (spec.d_t, spec.radius);
            let seed = derive_seed(
                master,
                &[STREAM_CHAIN, prior_index(prior), r as u64, t as u64, n_star as u64],
            );
            let chain = ChainConfig {
                eta: learning_rate(t as f64)?,
                n_star,
                prior: spec,
                seed,
            };
            let summary = run_chain_observed(&paths[r][&t], &chain, |step, state| {
                observe(&StateVisit {
                    prior,
                    t,
                    n_star,
                    replicate: r,
                    step,
                    d_t,
                    radius,
                    state,
                })
            })?;
            let risk = exact_risk(&summary.theta_bar, &oracles[&t])?;
            Ok(ResultRow {
                prior,
                t,
                n_star,
                replicate: r,
                seed,
                acceptance_rate: summary.acceptance_rate(),
                theta_bar: summary.theta_bar,
                risk,
                excess_risk: excess_risk(risk, config.sigma),
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(ResultRow::sort_key);
    Ok(rows)
}

/// Type-1 empirical quantile: the `⌈qN⌉`-th order statistic.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("quantile of an empty list"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("quantile level must lie in (0, 1), got {q}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let x = q * sorted.len() as f64;
    // q·N that is an integer up to rounding must not be pushed up a rank
    let rank = if (x - x.round()).abs() < 1e-9 { x.round() } else { x.ceil() };
    let idx = (rank as usize).clamp(1, sorted.len()) - 1;
    Ok(sorted[idx])
}

/// Quantile of the excess risk against `T` for one `(prior, n*)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileCurve {
    pub prior: PriorKind,
    pub n_star: usize,
    /// `(T, quantile)` in increasing `T`.
    pub points: Vec<(usize, f64)>,
}

pub fn quantile_curves(rows: &[ResultRow], q: f64) -> Result<Vec<QuantileCurve>> {
    let mut groups: BTreeMap<(PriorKind, usize), BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.prior, row.n_star))
            .or_default()
            .entry(row.t)
            .or_default()
            .push(row.excess_risk);
    }
    groups
        .into_iter()
        .map(|((prior, n_star), by_t)| {
            let points = by_t
                .into_iter()
                .map(|(t, v)| Ok((t, quantile(&v, q)?)))
                .collect::<Result<_>>()?;
            Ok(QuantileCurve { prior, n_star, points })
        })
        .collect()
}
