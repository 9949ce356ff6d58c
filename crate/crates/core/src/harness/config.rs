use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stable_domain::PriorKind;

/// Settings of a replicated experiment. Field names double as the keys of
/// the TOML config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// True AR order.
    pub d: usize,
    /// The true parameter is drawn from `s_d(delta)`.
    pub delta: f64,
    pub sigma: f64,
    #[serde(rename = "T_grid", alias = "t_grid")]
    pub t_grid: Vec<usize>,
    pub n_star_grid: Vec<usize>,
    pub replicates: usize,
    #[serde(alias = "prior_kind")]
    pub priors: Vec<PriorKind>,
    pub gamma: f64,
    pub quantile_q: f64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Simulate a separate path for every `T` instead of reusing prefixes
    /// of one long path per replicate.
    pub independent_paths: bool,
    /// Pins the true parameter instead of drawing it.
    pub true_theta: Option<Vec<f64>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 8,
            delta: 0.75,
            sigma: 1.0,
            t_grid: (6..=12).map(|j| 1usize << j).collect(),
            n_star_grid: vec![100, 1000],
            replicates: 100,
            priors: PriorKind::ALL.to_vec(),
            gamma: 1.0,
            quantile_q: 0.9,
            master_seed: 20_140_101,
            output_dir: PathBuf::from("results"),
            independent_paths: false,
            true_theta: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.true_theta.is_none() && self.d == 0 {
            return fail("d must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return fail(format!("delta must lie in (0, 1], got {}", self.delta));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return fail(format!("sigma must be positive, got {}", self.sigma));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|&t| t < 4) {
            return fail(format!("every T must be at least 4, got {:?}", self.t_grid));
        }
        if self.n_star_grid.is_empty() || self.n_star_grid.contains(&0) {
            return fail(format!("n_star values must be positive, got {:?}", self.n_star_grid));
        }
        if self.replicates < 1 {
            return fail("replicates must be at least 1".into());
        }
        if self.priors.is_empty() {
            return fail("at least one prior kind is required".into());
        }
        if !(self.gamma >= 1.0) {
            return fail(format!("gamma must be at least 1, got {}", self.gamma));
        }
        if !(self.quantile_q > 0.0 && self.quantile_q < 1.0) {
            return fail(format!("quantile_q must lie in (0, 1), got {}", self.quantile_q));
        }
        if let Some(theta) = &self.true_theta {
            if theta.is_empty() {
                return fail("true_theta must not be empty".into());
            }
        }
        Ok(())
    }

    pub fn max_t(&self) -> usize {
        self.t_grid.iter().copied().max().unwrap_or(0)
    }
}
