//! Lattice quadrature over the simplex for factorized integrands.
//!
//! The grid is the set of nonnegative integer vectors of length `K` summing
//! to `N`, scaled by `1/N`. The sum of a product `Π f_k(x_k / N)` over that
//! grid is entry `N` of the K-fold convolution of the sampled `f_k`, which is
//! evaluated here in the log domain.

use crate::error::{BoojumError, Result};
use crate::special_fn::lse;

/// Resolution `N` and dimension `K` of the simplex grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    n: usize,
    k: usize,
}

impl LatticeSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(BoojumError::Domain(format!("lattice spec N={n}, K={k}: both must be >= 1")));
        }
        Ok(Self { n, k })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }
}

/// Log-domain samples `log f(n/N)` for `n = 0..=N`. `-inf` marks a zero weight.
#[derive(Debug, Clone, PartialEq)]
pub struct LogWeightVector(Vec<f64>);

impl LogWeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(BoojumError::EmptyInput);
        }
        if let Some((i, v)) =
            entries.iter().enumerate().find(|(_, v)| v.is_nan() || **v == f64::INFINITY)
        {
            return Err(BoojumError::Domain(format!("log weight {i} = {v}")));
        }
        Ok(Self(entries))
    }

    /// Samples `log f(n / N)` for `n = 0..=N`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..=n).map(|i| f(i as f64 / n as f64)).collect())
    }

    /// Resolution `N` (one less than the number of entries).
    pub fn resolution(&self) -> usize {
        self.0.len() - 1
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `C(N + K − 1, K − 1)`, the number of grid points.
pub fn lattice_count(spec: LatticeSpec) -> Result<u64> {
    let overflow = || BoojumError::CountOverflow { n: spec.n as u64, k: spec.k as u64 };
    let top = (spec.n as u128).checked_add(spec.k as u128 - 1).ok_or_else(overflow)?;
    let choose = (spec.k - 1).min(spec.n) as u128;
    let mut acc: u128 = 1;
    // acc = C(top - choose + i, i) after step i; exact at every step
    for i in 1..=choose {
        acc = acc.checked_mul(top - choose + i).ok_or_else(overflow)? / i;
        if acc > u64::MAX as u128 {
            return Err(overflow());
        }
    }
    Ok(acc as u64)
}

/// Every nonnegative integer vector of length `K` summing to `N`, in
/// ascending lexicographic order. Materializes nothing up front, but the
/// sequence has [`lattice_count`] elements.
pub fn enumerate_lattice(spec: LatticeSpec) -> LatticePoints {
    let mut first = vec![0; spec.k];
    first[spec.k - 1] = spec.n;
    LatticePoints { next: Some(first) }
}

#[derive(Debug, Clone)]
pub struct LatticePoints {
    next: Option<Vec<usize>>,
}

impl Iterator for LatticePoints {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let k = current.len();
        // Successor: increment the rightmost position i < K-1 that still has
        // mass to its right, then push all remaining mass to the last slot.
        let mut succ = current.clone();
        let mut found = false;
        for i in (0..k.saturating_sub(1)).rev() {
            let tail: usize = succ[i + 1..].iter().sum();
            if tail > 0 {
                succ[i] += 1;
                for v in succ[i + 1..].iter_mut() {
                    *v = 0;
                }
                succ[k - 1] = tail - 1;
                found = true;
                break;
            }
        }
        if found {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Entry `n` of the log-domain convolution: `log Σ_{j ≤ n} exp(a_j + b_{n−j})`.
#[inline]
pub(crate) fn log_conv_entry(a: &[f64], b: &[f64], n: usize) -> f64 {
    let terms = (0..=n).map(|j| a[j] + b[n - j]);
    lse(terms)
}

fn log_conv_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|n| log_conv_entry(a, b, n)).collect()
}

fn check_same_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(BoojumError::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Truncated log-domain convolution `c_n = log Σ_{j=0..n} exp(a_j + b_{n−j})`,
/// i.e. row `n` of the lower-triangular Toeplitz matrix of `a` added to `b`.
pub fn log_conv_exp(a: &LogWeightVector, b: &LogWeightVector) -> Result<LogWeightVector> {
    check_same_len(a.len(), b.len())?;
    Ok(LogWeightVector(log_conv_full(&a.0, &b.0)))
}

/// `log S_NK`: log of the grid sum of `Π_k f_k(x_k / N)`.
///
/// Left fold in index order; only entry `N` of the final convolution is
/// computed, using the same per-entry routine as [`log_conv_exp`].
pub fn factorized_simplex_sum(weights: &[LogWeightVector]) -> Result<f64> {
    let (first, rest) = weights.split_first().ok_or(BoojumError::EmptyInput)?;
    for w in rest {
        check_same_len(first.len(), w.len())?;
    }
    Ok(simplex_sum_unchecked(weights.iter().map(|w| w.entries())))
}

pub(crate) fn simplex_sum_unchecked<'a, I>(weights: I) -> f64
where
    I: ExactSizeIterator<Item = &'a [f64]>,
{
    let mut weights = weights;
    let count = weights.len();
    let first = weights.next().expect("at least one weight vector");
    let n = first.len() - 1;
    if count == 1 {
        return first[n];
    }
    let mut acc = first.to_vec();
    for (idx, w) in weights.enumerate() {
        if idx + 2 == count {
            return log_conv_entry(&acc, w, n);
        }
        acc = log_conv_full(&acc, w);
    }
    unreachable!("loop returns on the last weight vector")
}

/// `log S_NK − (K − 1) log N`, the grid approximation of
/// `log ∫_T Π_k f_k(t_k) dt` with unit cell measure.
pub fn integrate_simplex(weights: &[LogWeightVector], spec: LatticeSpec) -> Result<f64> {
    check_same_len(spec.k, weights.len())?;
    for w in weights {
        check_same_len(spec.n + 1, w.len())?;
    }
    let sum = factorized_simplex_sum(weights)?;
    Ok(sum - (spec.k as f64 - 1.0) * (spec.n as f64).ln())
}
