//! Log-domain special functions: log Γ, digamma, the multivariate Beta
//! function and a max-shifted log-sum-exp.

use crate::error::{BoojumError, Result};

/// A non-empty vector of strictly positive, finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(BoojumError::EmptyInput);
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(BoojumError::Domain(format!(
                "entry {i} = {v} is not a positive finite real"
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for PositiveVector {
    type Error = BoojumError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl TryFrom<&[f64]> for PositiveVector {
    type Error = BoojumError;

    fn try_from(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }
}

impl AsRef<[f64]> for PositiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(BoojumError::Domain(format!("log_gamma({x})")));
    }
    Ok(ln_gamma_pos(x))
}

/// Unchecked `log Γ` for the hot loops; `x = 0` maps to `+inf`.
#[inline]
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == 0.0 {
        return f64::INFINITY;
    }
    libm::lgamma_r(x).0
}

// Bernoulli coefficients B_{2k} / (2k) for the asymptotic digamma series.
const DIGAMMA_ASYMPTOTIC: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

const DIGAMMA_SHIFT: f64 = 10.0;

/// Digamma Ψ(x) = d/dx log Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(BoojumError::Domain(format!("digamma({x})")));
    }
    let mut x = x;
    let mut acc = 0.0;
    // Ψ(x) = Ψ(x + 1) - 1/x
    while x < DIGAMMA_SHIFT {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_ASYMPTOTIC {
        series += c * pow;
        pow *= inv2;
    }
    Ok(acc + x.ln() - 0.5 / x - series)
}

/// `log B(x) = Σ log Γ(x_k) − log Γ(Σ x_k)`.
pub fn log_multivariate_beta(x: &PositiveVector) -> f64 {
    let values = x.as_slice();
    let total: f64 = values.iter().sum();
    values.iter().map(|&v| ln_gamma_pos(v)).sum::<f64>() - ln_gamma_pos(total)
}

/// `log Σ exp(v_i)` by max-shift. All `-inf` gives `-inf`; `+inf` and NaN are rejected.
pub fn log_sum_exp(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(BoojumError::EmptyInput);
    }
    if let Some(bad) = v.iter().find(|x| x.is_nan() || **x == f64::INFINITY) {
        return Err(BoojumError::Domain(format!("log_sum_exp entry {bad}")));
    }
    Ok(lse(v.iter().copied()))
}

/// Max-shifted log-sum-exp over an iterator of values without `+inf`/NaN.
#[inline]
pub(crate) fn lse<I>(values: I) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn pv(v: &[f64]) -> PositiveVector {
        PositiveVector::try_from(v).unwrap()
    }

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert!((log_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_gamma_domain() {
        for x in [0.0, -1.0, -0.5, f64::NAN, f64::INFINITY] {
            assert!(matches!(log_gamma(x), Err(BoojumError::Domain(_))), "{x}");
        }
    }

    #[test]
    fn log_gamma_matches_reference() {
        // statrs uses a Lanczos approximation, independent of libm's lgamma.
        let mut x = 1e-6;
        while x < 1e6 {
            let ours = log_gamma(x).unwrap();
            let reference = statrs::function::gamma::ln_gamma(x);
            let scale = ours.abs().max(1.0);
            assert!((ours - reference).abs() / scale < 1e-12, "x={x} {ours} {reference}");
            x *= 1.37;
        }
    }

    #[test]
    fn digamma_examples() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-3.0).is_err());
    }

    #[test]
    fn digamma_matches_reference() {
        let mut x = 1e-3;
        while x < 1e6 {
            let ours = digamma(x).unwrap();
            let reference = statrs::function::gamma::digamma(x);
            assert!((ours - reference).abs() < 1e-10, "x={x} {ours} {reference}");
            x *= 1.21;
        }
    }

    #[test]
    fn digamma_is_derivative_of_log_gamma() {
        let h = 1e-5;
        let mut x: f64 = 0.1;
        while x <= 100.0 {
            let fd = (log_gamma(x + h).unwrap() - log_gamma(x - h).unwrap()) / (2.0 * h);
            assert!((fd - digamma(x).unwrap()).abs() < 1e-6, "x={x}");
            x *= 1.1;
        }
    }

    #[test]
    fn multivariate_beta_examples() {
        assert!(log_multivariate_beta(&pv(&[1.0, 1.0])).abs() < 1e-15);
        assert!((log_multivariate_beta(&pv(&[1.0, 1.0, 1.0])) - 0.5f64.ln()).abs() < 1e-14);
        assert!((log_multivariate_beta(&pv(&[2.0, 3.0])) - (1.0f64 / 12.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn positive_vector_rejects_nonpositive() {
        assert!(PositiveVector::new(vec![1.0, 0.0]).is_err());
        assert!(PositiveVector::new(vec![1.0, -2.0]).is_err());
        assert!(PositiveVector::new(vec![f64::NAN]).is_err());
        assert_eq!(PositiveVector::new(vec![]), Err(BoojumError::EmptyInput));
    }

    #[test]
    fn log_sum_exp_examples() {
        assert!((log_sum_exp(&[0.0, 0.0]).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 3.5]).unwrap(), 3.5);
        assert!((log_sum_exp(&[1000.0, 1000.0]).unwrap() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(log_sum_exp(&[]), Err(BoojumError::EmptyInput));
        assert!(log_sum_exp(&[1.0, f64::INFINITY]).is_err());
        assert!(log_sum_exp(&[1.0, f64::NAN]).is_err());
        assert!(log_sum_exp(&[700.0, 700.0, 699.0]).unwrap().is_finite());
    }

    proptest! {
        #[test]
        fn digamma_increasing(a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
            prop_assume!(a != b);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(digamma(lo).unwrap() < digamma(hi).unwrap());
        }

        #[test]
        fn log_gamma_recurrence(x in 1e-3f64..1e5) {
            let upper = log_gamma(x + 1.0).unwrap();
            let lhs = upper - log_gamma(x).unwrap();
            // above x ~ 1e4 one ulp of log Γ(x) alone exceeds 1e-10
            let tol = 1e-10f64.max(4.0 * f64::EPSILON * upper.abs());
            prop_assert!((lhs - x.ln()).abs() <= tol);
        }

        #[test]
        fn log_sum_exp_shift_invariant(
            v in proptest::collection::vec(-50.0f64..50.0, 1..20),
            c in -100.0f64..100.0,
        ) {
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let lhs = log_sum_exp(&shifted).unwrap();
            let rhs = log_sum_exp(&v).unwrap() + c;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn log_beta_decreasing_in_total_mass(
            raw in proptest::collection::vec(0.05f64..1.0, 2..5),
            s in 0.05f64..50.0,
            ds in 0.01f64..10.0,
        ) {
            let total: f64 = raw.iter().sum();
            let t: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let at = |s: f64| log_multivariate_beta(&pv(&t.iter().map(|tk| s * tk).collect::<Vec<_>>()));
            prop_assert!(at(s + ds) < at(s));
        }
    }
}
