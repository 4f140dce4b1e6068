//! The `(m, r)` parameter pair and its exact properness classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BoojumError, Result};

/// Shape `m` and rate vector `r`. Improper pairs are representable so they
/// can be classified; only finiteness and `K ≥ 1` are enforced.
///
/// Serializes as the flat record `{"m": <number>, "r": [<number>, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct BoojumParams {
    m: f64,
    r: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParams {
    m: f64,
    r: Vec<f64>,
}

impl TryFrom<RawParams> for BoojumParams {
    type Error = BoojumError;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.m, raw.r)
    }
}

impl BoojumParams {
    pub fn new(m: f64, r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(BoojumError::InvalidParams("rate vector must have K >= 1 entries".into()));
        }
        if !m.is_finite() {
            return Err(BoojumError::InvalidParams(format!("shape m = {m} is not finite")));
        }
        if let Some(bad) = r.iter().find(|v| !v.is_finite()) {
            return Err(BoojumError::InvalidParams(format!("rate entry {bad} is not finite")));
        }
        Ok(Self { m, r })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Dimension `K`.
    pub fn dim(&self) -> usize {
        self.r.len()
    }

    pub fn classify(&self) -> PropernessVerdict {
        classify(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropernessReason {
    RateNonpositive,
    ShapeAtOrBelowMinusOne,
    BoundaryTAtLeastOne,
    Proper,
}

impl fmt::Display for PropernessReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::RateNonpositive => "RateNonpositive",
            Self::ShapeAtOrBelowMinusOne => "ShapeAtOrBelowMinusOne",
            Self::BoundaryTAtLeastOne => "BoundaryTAtLeastOne",
            Self::Proper => "Proper",
        };
        f.write_str(s)
    }
}

/// Outcome of [`classify`]: the first failed condition, if any, and the
/// boundary quantity `T = Σ exp(−r_k/m)` whenever `m > 0` and `r > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropernessVerdict {
    pub proper: bool,
    pub reason: PropernessReason,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_value: Option<f64>,
}

impl fmt::Display for PropernessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.reason, self.t_value) {
            (PropernessReason::BoundaryTAtLeastOne, Some(t)) => {
                write!(f, "{} (T = {t} >= 1)", self.reason)
            }
            (reason, Some(t)) => write!(f, "{reason} (T = {t})"),
            (reason, None) => write!(f, "{reason}"),
        }
    }
}

fn boundary_t(m: f64, r: &[f64]) -> f64 {
    r.iter().map(|rk| (-rk / m).exp()).sum()
}

/// Exact properness test: `r > 0`, `m > −1`, and `m ≤ 0` or `T < 1`.
///
/// Conditions are checked in that order and the first failure is reported.
/// `T = 1` is improper; no tolerance is applied.
pub fn classify(params: &BoojumParams) -> PropernessVerdict {
    let m = params.m;
    if params.r.iter().any(|&rk| rk <= 0.0) {
        return PropernessVerdict {
            proper: false,
            reason: PropernessReason::RateNonpositive,
            t_value: None,
        };
    }
    if m <= -1.0 {
        return PropernessVerdict {
            proper: false,
            reason: PropernessReason::ShapeAtOrBelowMinusOne,
            t_value: None,
        };
    }
    if m <= 0.0 {
        return PropernessVerdict { proper: true, reason: PropernessReason::Proper, t_value: None };
    }
    let t = boundary_t(m, &params.r);
    if t < 1.0 {
        PropernessVerdict { proper: true, reason: PropernessReason::Proper, t_value: Some(t) }
    } else {
        PropernessVerdict {
            proper: false,
            reason: PropernessReason::BoundaryTAtLeastOne,
            t_value: Some(t),
        }
    }
}

/// `1 − T` when `m > 0` and `r > 0`, otherwise `None`.
pub fn boundary_margin(params: &BoojumParams) -> Option<f64> {
    if params.m > 0.0 && params.r.iter().all(|&rk| rk > 0.0) {
        Some(1.0 - boundary_t(params.m, &params.r))
    } else {
        None
    }
}
