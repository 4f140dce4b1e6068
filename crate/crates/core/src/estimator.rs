//! Normalizing-constant estimation.
//!
//! `Z(m, r)` is split radially into the conditional normalizer `Z̄(s)` over
//! the simplex, evaluated by lattice quadrature, and an outer integral over
//! the total mass `s`, estimated by importance sampling from `Gamma(K, ρ)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BoojumError, Result};
use crate::lattice::simplex_sum_unchecked;
use crate::params::{classify, BoojumParams};
use crate::special_fn::{ln_gamma_pos, log_multivariate_beta, lse, PositiveVector};

pub const DEFAULT_GRID_N: usize = 500;
pub const DEFAULT_SAMPLES_P: usize = 2000;
/// `auto` pivot: ρ = `AUTO_PIVOT_FRACTION · min_k r_k`.
pub const AUTO_PIVOT_FRACTION: f64 = 0.5;

/// `x = s · t` with `s = Σ x_k` and `t` on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPoint {
    pub s: f64,
    pub t: Vec<f64>,
}

impl RadialPoint {
    pub fn recompose(&self) -> Vec<f64> {
        self.t.iter().map(|tk| self.s * tk).collect()
    }
}

pub fn radial_decompose(x: &PositiveVector) -> RadialPoint {
    let s: f64 = x.as_slice().iter().sum();
    RadialPoint { s, t: x.as_slice().iter().map(|v| v / s).collect() }
}

/// `−m log B(x) − Σ r_k x_k`.
pub fn log_unnormalized_density(params: &BoojumParams, x: &PositiveVector) -> Result<f64> {
    if x.len() != params.dim() {
        return Err(BoojumError::LengthMismatch { expected: params.dim(), actual: x.len() });
    }
    let linear: f64 = params.r().iter().zip(x.as_slice()).map(|(r, x)| r * x).sum();
    let beta = if params.m() == 0.0 { 0.0 } else { params.m() * log_multivariate_beta(x) };
    Ok(-beta - linear)
}

/// Importance-distribution rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Pivot {
    #[default]
    Auto,
    Fixed(f64),
}

impl Pivot {
    pub fn resolve(&self, params: &BoojumParams) -> Result<f64> {
        let rho = match *self {
            Pivot::Fixed(rho) => rho,
            Pivot::Auto => {
                AUTO_PIVOT_FRACTION * params.r().iter().copied().fold(f64::INFINITY, f64::min)
            }
        };
        if !(rho.is_finite() && rho > 0.0) {
            return Err(BoojumError::InvalidConfig(format!(
                "pivot rho = {rho} must be a positive finite real"
            )));
        }
        Ok(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub grid_n: usize,
    pub samples_p: usize,
    pub rho: Pivot,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self { grid_n: DEFAULT_GRID_N, samples_p: DEFAULT_SAMPLES_P, rho: Pivot::Auto, seed: 0 }
    }
}

impl EstimatorConfig {
    pub fn new(grid_n: usize, samples_p: usize, rho: Pivot, seed: u64) -> Result<Self> {
        let config = Self { grid_n, samples_p, rho, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(BoojumError::InvalidConfig(format!("grid_n = {} < 2", self.grid_n)));
        }
        if self.samples_p < 1 {
            return Err(BoojumError::InvalidConfig("samples_p must be >= 1".into()));
        }
        if let Pivot::Fixed(rho) = self.rho {
            if !(rho.is_finite() && rho > 0.0) {
                return Err(BoojumError::InvalidConfig(format!("rho = {rho} must be > 0")));
            }
        }
        Ok(())
    }

    /// Same configuration with the pivot pinned to its resolved value.
    pub fn resolved(&self, params: &BoojumParams) -> Result<Self> {
        Ok(Self { rho: Pivot::Fixed(self.rho.resolve(params)?), ..*self })
    }
}

/// Echo of the configuration that produced an estimate, pivot resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub grid_n: usize,
    pub samples_p: usize,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogZEstimate {
    pub log_z: f64,
    /// Delta-method standard error of `log_z`.
    pub std_err: f64,
    pub config: ResolvedConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImproperPolicy {
    #[default]
    Reject,
    /// Estimate anyway; used for divergence probing.
    Allow,
}

/// Log-weights `−m log Γ(s u) − r_k s u` at `u = n/N`.
///
/// `u = 0` carries zero weight whenever `m ≠ 0`: it is the natural limit for
/// `m > 0`. For `−1 < m < 0` the true value is an integrable `+∞`, which is
/// suppressed, biasing the lattice sum down by `O(N^{m})`.
fn conditional_log_weights(m: f64, r: &[f64], s: f64, grid_n: usize) -> Vec<Vec<f64>> {
    let step = s / grid_n as f64;
    let neg_m_lg: Vec<f64> = (0..=grid_n)
        .map(|n| {
            if m == 0.0 {
                0.0
            } else if n == 0 {
                f64::NEG_INFINITY
            } else {
                -m * ln_gamma_pos(step * n as f64)
            }
        })
        .collect();
    r.iter()
        .map(|&rk| {
            neg_m_lg
                .iter()
                .enumerate()
                .map(|(n, &g)| g - rk * step * n as f64)
                .collect()
        })
        .collect()
}

/// `log S_NK(f(·; s))` for the conditional integrand at mass `s`.
fn log_lattice_sum(m: f64, r: &[f64], s: f64, grid_n: usize) -> f64 {
    let weights = conditional_log_weights(m, r, s, grid_n);
    simplex_sum_unchecked(weights.iter().map(Vec::as_slice))
}

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(BoojumError::Domain(format!("total mass s = {s} must be > 0")));
    }
    Ok(())
}

/// Lattice approximation of `log Z̄(s)`, the normalizer of `t | s`.
pub fn log_zbar(params: &BoojumParams, s: f64, grid_n: usize) -> Result<f64> {
    check_s(s)?;
    if grid_n < 1 {
        return Err(BoojumError::InvalidConfig("grid_n must be >= 1".into()));
    }
    let k = params.dim() as f64;
    let m = params.m();
    let sum = log_lattice_sum(m, params.r(), s, grid_n);
    let gamma_term = if m == 0.0 { 0.0 } else { m * ln_gamma_pos(s) };
    Ok(gamma_term + sum - (k - 1.0) * (grid_n as f64).ln())
}

/// Draws of `Gamma(K, 1)`, one counter-based ChaCha stream per sample index.
///
/// Dividing by ρ gives `Gamma(K, ρ)` draws; sharing the unit draws across
/// pivots and rates is what couples estimates through common random numbers.
pub fn unit_gamma_draws(k: usize, seed: u64, count: usize) -> Vec<f64> {
    let dist = Gamma::new(k as f64, 1.0).expect("shape K >= 1 is valid");
    (0..count)
        .into_par_iter()
        .map(|p| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(p as u64);
            dist.sample(&mut rng)
        })
        .collect()
}

/// Per-sample log terms `log S_NK(f(·; s_p)) + m log Γ(s_p) + ρ s_p`.
fn sample_terms(params: &BoojumParams, grid_n: usize, rho: f64, draws: &[f64]) -> Vec<f64> {
    let m = params.m();
    let r = params.r();
    draws
        .par_iter()
        .map(|&g| {
            let s = g / rho;
            let gamma_term = if m == 0.0 { 0.0 } else { m * ln_gamma_pos(s) };
            log_lattice_sum(m, r, s, grid_n) + gamma_term + rho * s
        })
        .collect()
}

/// Combines per-sample terms in index order; returns (log mean, std_err).
fn reduce_terms(terms: &[f64]) -> Result<(f64, f64)> {
    let p = terms.len() as f64;
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(BoojumError::Resolution);
    }
    let log_mean = lse(terms.iter().copied()) - p.ln();
    let std_err = if terms.len() > 1 {
        let w: Vec<f64> = terms.iter().map(|t| (t - max).exp()).collect();
        let mean = w.iter().sum::<f64>() / p;
        let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (p - 1.0);
        var.sqrt() / (p.sqrt() * mean)
    } else {
        0.0
    };
    Ok((log_mean, std_err))
}

/// Shared estimator core: `params` is evaluated at the given unit draws and pivot.
pub(crate) fn estimate_with_draws(
    params: &BoojumParams,
    grid_n: usize,
    rho: f64,
    draws: &[f64],
) -> Result<(f64, f64)> {
    let k = params.dim() as f64;
    let terms = sample_terms(params, grid_n, rho, draws);
    let (log_mean, std_err) = reduce_terms(&terms)?;
    let log_z =
        ln_gamma_pos(k) - k * rho.ln() - (k - 1.0) * (grid_n as f64).ln() + log_mean;
    Ok((log_z, std_err))
}

/// Importance-sampling estimate of `log Z(m, r)`.
///
/// Deterministic in `(params, config)`; thread count does not affect the
/// result since per-sample terms are reduced in index order.
pub fn estimate_log_z(
    params: &BoojumParams,
    config: &EstimatorConfig,
    policy: ImproperPolicy,
) -> Result<LogZEstimate> {
    config.validate()?;
    let verdict = classify(params);
    if !verdict.proper && policy == ImproperPolicy::Reject {
        return Err(BoojumError::Improper { verdict });
    }
    let rho = config.rho.resolve(params)?;
    let draws = unit_gamma_draws(params.dim(), config.seed, config.samples_p);
    let (log_z, std_err) = estimate_with_draws(params, config.grid_n, rho, &draws)?;
    Ok(LogZEstimate {
        log_z,
        std_err,
        config: ResolvedConfig {
            grid_n: config.grid_n,
            samples_p: config.samples_p,
            rho,
            seed: config.seed,
        },
    })
}

/// Runs [`estimate_log_z`] at each configuration with improper parameters
/// allowed, leaving interpretation of the sequence to the caller.
pub fn divergence_probe(
    params: &BoojumParams,
    resolutions: &[EstimatorConfig],
) -> Result<Vec<LogZEstimate>> {
    resolutions
        .iter()
        .map(|config| estimate_log_z(params, config, ImproperPolicy::Allow))
        .collect()
}
