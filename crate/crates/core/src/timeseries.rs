//! Stationary AR(d) processes driven by Gaussian innovations.
//!
//! The process is `X_t = θ_1 X_{t-1} + ... + θ_d X_{t-d} + σ ξ_t` with
//! `ξ_t` i.i.d. standard normal. Stability is decided on the eigenvalues of
//! the companion matrix, and simulation starts from an exact draw of the
//! stationary law so no burn-in is needed.

use nalgebra::{DMatrix, DVector, Schur};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::stable_domain::step_down;

const SCHUR_MAX_ITER: usize = 2000;

/// Interior margin used by every stability test.
pub const TOL_STABILITY: f64 = 1e-9;

/// Parameters of an AR(d) model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArParams {
    theta: Vec<f64>,
    sigma: f64,
}

impl ArParams {
    pub fn new(theta: Vec<f64>, sigma: f64) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("AR order must be at least 1"));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("AR coefficients must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { theta, sigma })
    }

    /// Same as [`ArParams::new`] but also rejects coefficients outside the
    /// open stability domain.
    pub fn stable(theta: Vec<f64>, sigma: f64) -> Result<Self> {
        let params = Self::new(theta, sigma)?;
        params.ensure_stable()?;
        Ok(params)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }

    fn ensure_stable(&self) -> Result<()> {
        if is_stable(&self.theta, 1.0)? {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "coefficients {:?} are outside the stability domain",
                self.theta
            )))
        }
    }
}

/// An observed sample `X_1, ..., X_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    values: Vec<f64>,
}

impl Path {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("a path needs at least one observation"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("path values must be finite"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `t` observations.
    pub fn prefix(&self, t: usize) -> Result<Path> {
        if t == 0 || t > self.values.len() {
            return Err(Error::invalid(format!(
                "prefix length {t} out of range 1..={}",
                self.values.len()
            )));
        }
        Ok(Path {
            values: self.values[..t].to_vec(),
        })
    }
}

/// Autocovariances `γ_0, ..., γ_L` of a stationary process.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovSequence {
    gammas: Vec<f64>,
}

impl AutocovSequence {
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn max_lag(&self) -> usize {
        self.gammas.len() - 1
    }

    pub fn gamma(&self, lag: usize) -> f64 {
        self.gammas[lag]
    }

    /// Toeplitz matrix with entry `(i, j) = γ_{|i-j|}`.
    pub fn toeplitz(&self, dim: usize) -> Result<DMatrix<f64>> {
        if dim == 0 || dim > self.gammas.len() {
            return Err(Error::invalid(format!(
                "toeplitz dimension {dim} needs lags up to {}, have {}",
                dim.saturating_sub(1),
                self.max_lag()
            )));
        }
        Ok(DMatrix::from_fn(dim, dim, |i, j| self.gammas[i.abs_diff(j)]))
    }
}

/// Companion matrix: first row `θ'`, ones on the subdiagonal.
pub fn companion_matrix(theta: &[f64]) -> Result<DMatrix<f64>> {
    if theta.is_empty() {
        return Err(Error::invalid("companion matrix of an empty coefficient vector"));
    }
    let d = theta.len();
    let mut a = DMatrix::zeros(d, d);
    for (j, &v) in theta.iter().enumerate() {
        a[(0, j)] = v;
    }
    for i in 1..d {
        a[(i, i - 1)] = 1.0;
    }
    Ok(a)
}

/// Largest eigenvalue modulus of the companion matrix.
pub fn spectral_radius(theta: &[f64]) -> Result<f64> {
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("coefficients must be finite"));
    }
    // trailing zeros only add zero eigenvalues
    let effective = theta.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1);
    match effective {
        0 => Ok(0.0),
        1 => Ok(theta[0].abs()),
        _ => {
            let a = companion_matrix(&theta[..effective])?;
            // unbounded Schur iterations can cycle on some companion matrices
            let schur = Schur::try_new(a, f64::EPSILON, SCHUR_MAX_ITER).ok_or_else(|| {
                Error::Numerical(format!("Schur iteration did not converge for {theta:?}"))
            })?;
            let radius = schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if radius.is_finite() {
                Ok(radius)
            } else {
                Err(Error::Numerical("eigenvalue computation diverged".into()))
            }
        }
    }
}

/// Strict interior test for `s_d(margin)`: every companion eigenvalue has
/// modulus at most `margin - TOL_STABILITY`.
pub fn is_stable(theta: &[f64], margin: f64) -> Result<bool> {
    if !(margin > 0.0 && margin <= 1.0) {
        return Err(Error::invalid(format!("margin must lie in (0, 1], got {margin}")));
    }
    let rho = margin - TOL_STABILITY;
    match spectral_radius(theta) {
        Ok(radius) => Ok(radius <= rho),
        Err(Error::Numerical(_)) => Ok(reflection_test(theta, rho)),
        Err(e) => Err(e),
    }
}

/// Fallback when the eigenvalues are not available: `θ ∈ s_d(ρ)` iff the
/// rescaled coefficients `θ_j / ρ^j` have all reflection coefficients in
/// (-1, 1).
fn reflection_test(theta: &[f64], rho: f64) -> bool {
    let mut scale = 1.0;
    let scaled: Vec<f64> = theta
        .iter()
        .map(|v| {
            scale *= rho;
            v / scale
        })
        .collect();
    step_down(&scaled).is_ok()
}

/// Autocovariances up to `max_lag`, from the Yule–Walker equations.
pub fn autocovariances(params: &ArParams, max_lag: usize) -> Result<AutocovSequence> {
    params.ensure_stable()?;
    let theta = params.theta();
    let d = theta.len();

    // unknowns γ_0..γ_d:
    //   γ_0 - Σ_j θ_j γ_j = σ²
    //   γ_h - Σ_j θ_j γ_|h-j| = 0,  h = 1..d
    let mut system = DMatrix::<f64>::zeros(d + 1, d + 1);
    let mut rhs = DVector::<f64>::zeros(d + 1);
    for h in 0..=d {
        system[(h, h)] += 1.0;
        for (j, &th) in theta.iter().enumerate() {
            let lag = h.abs_diff(j + 1);
            system[(h, lag)] -= th;
        }
    }
    rhs[0] = params.sigma() * params.sigma();
    let solution = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Yule-Walker system".into()))?;

    let len = (max_lag + 1).max(d + 1);
    let mut gammas = Vec::with_capacity(len);
    gammas.extend(solution.iter().copied());
    for h in (d + 1)..len {
        let next = theta
            .iter()
            .enumerate()
            .map(|(j, &th)| th * gammas[h - j - 1])
            .sum();
        gammas.push(next);
    }
    gammas.truncate(max_lag + 1);
    Ok(AutocovSequence { gammas })
}

/// `dim × dim` covariance matrix of `(X_t, ..., X_{t-dim+1})`.
pub fn covariance_matrix(params: &ArParams, dim: usize) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::invalid("covariance dimension must be at least 1"));
    }
    autocovariances(params, dim - 1)?.toeplitz(dim)
}

/// Draws `X_1..X_T` from the stationary law.
///
/// The first `d` values come from a Cholesky draw of the stationary
/// covariance; the rest follow the recursion with `σ ξ_t` innovations.
pub fn simulate_stationary<R: Rng + ?Sized>(
    params: &ArParams,
    t: usize,
    rng: &mut R,
) -> Result<Path> {
    if t == 0 {
        return Err(Error::invalid("path length must be at least 1"));
    }
    let theta = params.theta();
    let d = theta.len();
    let cov = covariance_matrix(params, d)?;
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::Numerical("stationary covariance is not positive definite".into()))?;
    let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let init = chol.l() * z;

    // init[0] plays X_d, init[d-1] plays X_1 (the covariance is symmetric in
    // time so the ordering only fixes the convention)
    let mut values = Vec::with_capacity(t.max(d));
    values.extend(init.iter().rev().copied());
    let sigma = params.sigma();
    while values.len() < t {
        let n = values.len();
        let mean: f64 = theta
            .iter()
            .enumerate()
            .map(|(j, &th)| th * values[n - 1 - j])
            .sum();
        let xi: f64 = rng.sample(StandardNormal);
        values.push(mean + sigma * xi);
    }
    values.truncate(t);
    Path::new(values)
}
