//! Conjugate updates under Dirichlet observations, and moments obtained by
//! differentiating `log Z` with respect to the rates.
//!
//! Every estimate that feeds a difference is computed from the same unit
//! Gamma draws and the same pivot, so Monte Carlo noise largely cancels.

use crate::error::{BoojumError, Result};
use crate::estimator::{estimate_with_draws, unit_gamma_draws, EstimatorConfig};
use crate::params::{classify, BoojumParams};

/// Tolerance on `Σ y_k = 1`.
pub const SIMPLEX_SUM_TOLERANCE: f64 = 1e-12;

/// Relative finite-difference step on each rate.
pub const RELATIVE_STEP: f64 = 1e-3;

/// A point in the interior of the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletObservation {
    y: Vec<f64>,
}

impl DirichletObservation {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if y.is_empty() {
            return Err(BoojumError::EmptyInput);
        }
        for (index, &v) in y.iter().enumerate() {
            if v == 0.0 {
                return Err(BoojumError::ZeroComponent { index });
            }
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                return Err(BoojumError::InvalidObservation(format!(
                    "component {index} = {v} is outside (0, 1]"
                )));
            }
        }
        let total: f64 = y.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_SUM_TOLERANCE {
            return Err(BoojumError::InvalidObservation(format!(
                "components sum to {total}, not 1"
            )));
        }
        Ok(Self { y })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Multi-index `n` of a moment `E[Π x_k^{n_k}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentRequest {
    order: Vec<u32>,
}

impl MomentRequest {
    pub fn new(order: Vec<u32>) -> Result<Self> {
        if order.is_empty() {
            return Err(BoojumError::EmptyInput);
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn total(&self) -> u32 {
        self.order.iter().sum()
    }
}

/// `Boojum(m + N, r − Σ_n log y_n)`.
pub fn posterior(
    prior: &BoojumParams,
    observations: &[DirichletObservation],
) -> Result<BoojumParams> {
    let mut r = prior.r().to_vec();
    let mut m = prior.m();
    // Applied one observation at a time, so a batch update is bit-identical
    // to folding single-observation updates.
    for obs in observations {
        if obs.y.len() != r.len() {
            return Err(BoojumError::LengthMismatch { expected: r.len(), actual: obs.y.len() });
        }
        for (rk, yk) in r.iter_mut().zip(&obs.y) {
            *rk -= yk.ln();
        }
        m += 1.0;
    }
    BoojumParams::new(m, r)
}

fn require_proper(params: &BoojumParams) -> Result<()> {
    let verdict = classify(params);
    if verdict.proper {
        Ok(())
    } else {
        Err(BoojumError::Improper { verdict })
    }
}

/// A group of `log Z` estimates at fixed `m` sharing draws and pivot.
struct Coupled {
    m: f64,
    grid_n: usize,
    rho: f64,
    draws: Vec<f64>,
}

impl Coupled {
    fn new(params: &BoojumParams, config: &EstimatorConfig) -> Result<Self> {
        config.validate()?;
        let rho = config.rho.resolve(params)?;
        Ok(Self {
            m: params.m(),
            grid_n: config.grid_n,
            rho,
            draws: unit_gamma_draws(params.dim(), config.seed, config.samples_p),
        })
    }

    fn log_z(&self, r: Vec<f64>) -> Result<f64> {
        let params = BoojumParams::new(self.m, r)?;
        require_proper(&params)?;
        Ok(estimate_with_draws(&params, self.grid_n, self.rho, &self.draws)?.0)
    }
}

fn shifted(r: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut out = r.to_vec();
    for &(k, delta) in moves {
        out[k] += delta;
    }
    out
}

fn steps(params: &BoojumParams) -> Result<Vec<f64>> {
    params
        .r()
        .iter()
        .enumerate()
        .map(|(index, &rate)| {
            let step = RELATIVE_STEP * rate;
            if rate - step > 0.0 {
                Ok(step)
            } else {
                Err(BoojumError::Step { index, rate, step })
            }
        })
        .collect()
}

/// `log φ(v) = log Z(m, r − v) − log Z(m, r)`, both sides from common random numbers.
pub fn log_mgf(params: &BoojumParams, v: &[f64], config: &EstimatorConfig) -> Result<f64> {
    if v.len() != params.dim() {
        return Err(BoojumError::LengthMismatch { expected: params.dim(), actual: v.len() });
    }
    require_proper(params)?;
    let moved: Vec<f64> = params.r().iter().zip(v).map(|(r, v)| r - v).collect();
    require_proper(&BoojumParams::new(params.m(), moved.clone())?)?;
    let coupled = Coupled::new(params, config)?;
    Ok(coupled.log_z(moved)? - coupled.log_z(params.r().to_vec())?)
}

/// `E[x] = −∇_r log Z(m, r)` by central differences with step `1e-3 · r_k`.
pub fn mean(params: &BoojumParams, config: &EstimatorConfig) -> Result<Vec<f64>> {
    require_proper(params)?;
    let eps = steps(params)?;
    let coupled = Coupled::new(params, config)?;
    mean_coupled(&coupled, params.r(), &eps)
}

fn mean_coupled(coupled: &Coupled, r: &[f64], eps: &[f64]) -> Result<Vec<f64>> {
    eps.iter()
        .enumerate()
        .map(|(k, &e)| {
            let up = coupled.log_z(shifted(r, &[(k, e)]))?;
            let down = coupled.log_z(shifted(r, &[(k, -e)]))?;
            Ok(-(up - down) / (2.0 * e))
        })
        .collect()
}

/// `M_n = (−1)^{|n|} ∂^{|n|} Z / Π ∂r_k^{n_k} / Z` for `|n| ≤ 2`.
///
/// First order goes through [`mean`]; second order uses central second
/// differences of `Z` itself, normalized by `Z(m, r)`.
pub fn moment(params: &BoojumParams, req: &MomentRequest, config: &EstimatorConfig) -> Result<f64> {
    if req.order.len() != params.dim() {
        return Err(BoojumError::LengthMismatch {
            expected: params.dim(),
            actual: req.order.len(),
        });
    }
    let total = req.total();
    if total > 2 {
        return Err(BoojumError::UnsupportedOrder(total));
    }
    require_proper(params)?;
    if total == 0 {
        return Ok(1.0);
    }
    let eps = steps(params)?;
    let coupled = Coupled::new(params, config)?;
    let r = params.r();
    let axes: Vec<usize> = req
        .order
        .iter()
        .enumerate()
        .flat_map(|(k, &n)| std::iter::repeat_n(k, n as usize))
        .collect();
    match axes[..] {
        [k] => Ok(mean_coupled(&coupled, r, &eps)?[k]),
        [i, j] if i == j => {
            let e = eps[i];
            let base = coupled.log_z(r.to_vec())?;
            let up = coupled.log_z(shifted(r, &[(i, e)]))? - base;
            let down = coupled.log_z(shifted(r, &[(i, -e)]))? - base;
            Ok((up.exp() - 2.0 + down.exp()) / (e * e))
        }
        [i, j] => {
            let (ei, ej) = (eps[i], eps[j]);
            let base = coupled.log_z(r.to_vec())?;
            let corner = |si: f64, sj: f64| -> Result<f64> {
                Ok((coupled.log_z(shifted(r, &[(i, si * ei), (j, sj * ej)]))? - base).exp())
            };
            let num = corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                + corner(-1.0, -1.0)?;
            Ok(num / (4.0 * ei * ej))
        }
        _ => unreachable!("total order checked above"),
    }
}
