//! The stability domain `s_k(1)` and the prior over candidate predictors.
//!
//! Stable AR(k) coefficient vectors are parameterised by reflection
//! coefficients in `(-1, 1)^k` through the Levinson step-up recursion.
//! Uniform (Lebesgue) sampling on `s_k(1)` draws each reflection
//! coefficient independently from a shifted Beta law whose exponents cancel
//! the Jacobian of the step-up map:
//!
//! ```text
//! |det ∂θ/∂r| = Π_m (1 - r_m²)^⌊(m-1)/2⌋ · Π_{m even} (1 - r_m)
//! ```
//!
//! so `(r_m + 1)/2 ~ Beta((m+1)/2, (m+1)/2)` for odd `m` and
//! `Beta(m/2, m/2 + 1)` for even `m`.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gibbs_mcmc::effective_dim;
use crate::timeseries::is_stable;

/// Reflection (partial autocorrelation) coefficients, each in `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionCoeffs(Vec<f64>);

impl ReflectionCoeffs {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if let Some(bad) = r.iter().find(|v| !(v.abs() < 1.0)) {
            return Err(Error::domain(format!(
                "reflection coefficient {bad} outside (-1, 1)"
            )));
        }
        Ok(Self(r))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Levinson step-up: reflection coefficients to AR coefficients.
pub fn step_up(r: &ReflectionCoeffs) -> Vec<f64> {
    let r = r.as_slice();
    let mut a: Vec<f64> = Vec::with_capacity(r.len());
    let mut prev = Vec::with_capacity(r.len());
    for (m, &rm) in r.iter().enumerate() {
        prev.clear();
        prev.extend_from_slice(&a);
        for j in 0..m {
            a[j] = prev[j] - rm * prev[m - 1 - j];
        }
        a.push(rm);
    }
    a
}

/// Inverse of [`step_up`]. Fails when `theta` is not strictly stable.
pub fn step_down(theta: &[f64]) -> Result<ReflectionCoeffs> {
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("coefficients must be finite"));
    }
    let mut a = theta.to_vec();
    let mut r = vec![0.0; theta.len()];
    for m in (0..theta.len()).rev() {
        let rm = a[m];
        if rm.abs() >= 1.0 {
            return Err(Error::domain(format!(
                "coefficients {theta:?} are outside the stability domain"
            )));
        }
        r[m] = rm;
        let scale = 1.0 - rm * rm;
        let prev: Vec<f64> = (0..m).map(|j| (a[j] + rm * a[m - 1 - j]) / scale).collect();
        a.truncate(m);
        a.copy_from_slice(&prev);
    }
    ReflectionCoeffs::new(r)
}

/// Beta exponents `(a, b)` of `(r_m + 1)/2` for the 1-based index `m`.
pub fn reflection_beta_exponents(m: usize) -> (f64, f64) {
    assert!(m >= 1, "reflection index is 1-based");
    if m % 2 == 1 {
        let a = (m as f64 + 1.0) / 2.0;
        (a, a)
    } else {
        let half = m as f64 / 2.0;
        (half, half + 1.0)
    }
}

/// Uniform sampler on the interior of `s_k(1)`.
#[derive(Debug, Clone)]
pub struct UniformStableSampler {
    betas: Vec<Beta<f64>>,
}

impl UniformStableSampler {
    pub fn new(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::invalid("order must be at least 1"));
        }
        let betas = (1..=k)
            .map(|m| {
                let (a, b) = reflection_beta_exponents(m);
                Beta::new(a, b).expect("positive Beta exponents")
            })
            .collect();
        Ok(Self { betas })
    }

    pub fn order(&self) -> usize {
        self.betas.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let r: Vec<f64> = self.betas.iter().map(|b| 2.0 * b.sample(rng) - 1.0).collect();
            // Beta draws can round to exactly 0 or 1
            let Ok(r) = ReflectionCoeffs::new(r) else {
                continue;
            };
            let theta = step_up(&r);
            if is_stable(&theta, 1.0).unwrap_or(false) {
                return theta;
            }
        }
    }
}

/// One uniform draw from the interior of `s_k(1)`.
pub fn sample_uniform_stable<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<f64>> {
    Ok(UniformStableSampler::new(k)?.sample(rng))
}

/// Applies `θ_j → λ^j θ_j` with `λ = min(1, radius / ‖θ‖₁)` and pads with
/// zeros to length `d_t`.
pub fn rescale_to_radius(theta: &[f64], radius: f64, d_t: usize) -> Result<Vec<f64>> {
    if theta.len() > d_t {
        return Err(Error::invalid(format!(
            "order {} exceeds effective dimension {d_t}",
            theta.len()
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid(format!("radius must be positive, got {radius}")));
    }
    let l1: f64 = theta.iter().map(|v| v.abs()).sum();
    let lambda = if l1 > radius { radius / l1 } else { 1.0 };
    let mut out = vec![0.0; d_t];
    let mut power = 1.0;
    for (slot, &v) in out.iter_mut().zip(theta) {
        power *= lambda;
        *slot = power * v;
    }
    Ok(out)
}

/// ℓ1 radius `ln T - 1` of the candidate set.
pub fn l1_radius(t: usize) -> Result<f64> {
    if t < 4 {
        return Err(Error::invalid(format!("sample size must be at least 4, got {t}")));
    }
    Ok((t as f64).ln() - 1.0)
}

/// The map `F_{k,T}`: shrink into the ℓ1 ball of radius `ln T - 1`, pad to `d_t`.
pub fn rescale_f(theta: &[f64], t: usize, d_t: usize) -> Result<Vec<f64>> {
    rescale_to_radius(theta, l1_radius(t)?, d_t)
}

/// Order-prior families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorKind {
    /// `c_k = k^-2`
    InverseSquare,
    /// `c_k = e^-k`
    Exponential,
}

impl PriorKind {
    pub const ALL: [PriorKind; 2] = [PriorKind::InverseSquare, PriorKind::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::InverseSquare => "inverse_square",
            PriorKind::Exponential => "exponential",
        }
    }

    fn raw_weight(self, k: usize) -> f64 {
        let k = k as f64;
        match self {
            PriorKind::InverseSquare => 1.0 / (k * k),
            PriorKind::Exponential => (-k).exp(),
        }
    }
}

impl fmt::Display for PriorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse_square" | "inverse-square" => Ok(PriorKind::InverseSquare),
            "exponential" => Ok(PriorKind::Exponential),
            other => Err(Error::invalid(format!("unknown prior kind `{other}`"))),
        }
    }
}

/// Normalised order weights `c_{k,T}`, `k = 1..=d_t`.
pub fn order_prior(kind: PriorKind, d_t: usize) -> Result<Vec<f64>> {
    if d_t < 1 {
        return Err(Error::invalid("effective dimension must be at least 1"));
    }
    let raw: Vec<f64> = (1..=d_t).map(|k| kind.raw_weight(k)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Description of the candidate set `Θ_T` and its prior.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub kind: PriorKind,
    pub t: usize,
    pub gamma: f64,
    pub d_t: usize,
    pub radius: f64,
    pub order_weights: Vec<f64>,
}

impl PriorSpec {
    pub fn new(kind: PriorKind, t: usize, gamma: f64) -> Result<Self> {
        let d_t = effective_dim(t, gamma)?;
        let radius = l1_radius(t)?;
        Ok(Self {
            kind,
            t,
            gamma,
            d_t,
            radius,
            order_weights: order_prior(kind, d_t)?,
        })
    }
}

/// Draws from the prior `π_T = Σ_k c_{k,T} π_{k,T}`.
#[derive(Debug, Clone)]
pub struct PriorSampler {
    spec: PriorSpec,
    orders: WeightedIndex<f64>,
    per_order: Vec<UniformStableSampler>,
}

impl PriorSampler {
    pub fn new(spec: &PriorSpec) -> Result<Self> {
        let orders = WeightedIndex::new(&spec.order_weights)
            .map_err(|e| Error::invalid(format!("bad order weights: {e}")))?;
        let per_order = (1..=spec.d_t)
            .map(UniformStableSampler::new)
            .collect::<Result<_>>()?;
        Ok(Self {
            spec: spec.clone(),
            orders,
            per_order,
        })
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    /// Returns the drawn order together with the padded candidate.
    pub fn sample_with_order<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, Vec<f64>) {
        let k = self.orders.sample(rng) + 1;
        let theta = self.per_order[k - 1].sample(rng);
        let out = rescale_to_radius(&theta, self.spec.radius, self.spec.d_t)
            .expect("order never exceeds d_t");
        (k, out)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.sample_with_order(rng).1
    }
}

/// One draw from the prior described by `spec`.
pub fn sample_prior<R: Rng + ?Sized>(spec: &PriorSpec, rng: &mut R) -> Result<Vec<f64>> {
    Ok(PriorSampler::new(spec)?.sample(rng))
}

/// Uniform draw on `s_d(1)` mapped into `s_d(δ)` by `θ_j → δ^j θ_j`.
pub fn sample_true_theta<R: Rng + ?Sized>(d: usize, delta: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::invalid(format!("delta must lie in (0, 1], got {delta}")));
    }
    let sampler = UniformStableSampler::new(d)?;
    loop {
        let mut theta = sampler.sample(rng);
        let mut power = 1.0;
        for v in theta.iter_mut() {
            power *= delta;
            *v *= power;
        }
        if is_stable(&theta, delta)? {
            return Ok(theta);
        }
    }
}
