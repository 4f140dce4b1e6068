//! The Boojum(m, r) family: the conjugate prior of the Dirichlet
//! distribution, with density proportional to `B(x)^{-m} exp(-<r, x>)` on
//! the positive orthant.
//!
//! The crate provides the exact properness test, lattice quadrature over the
//! simplex, a Monte Carlo estimator of `log Z(m, r)`, conjugate posterior
//! updates and moment estimates. Everything is computed in the log domain.

pub mod cli;
pub mod error;
pub mod estimator;
pub mod inference;
pub mod lattice;
pub mod params;
pub mod special_fn;

pub use error::{BoojumError, Result};
pub use estimator::{
    divergence_probe, estimate_log_z, log_unnormalized_density, log_zbar, radial_decompose,
    EstimatorConfig, ImproperPolicy, LogZEstimate, Pivot, RadialPoint, ResolvedConfig,
};
pub use inference::{log_mgf, mean, moment, posterior, DirichletObservation, MomentRequest};
pub use lattice::{
    enumerate_lattice, factorized_simplex_sum, integrate_simplex, lattice_count, log_conv_exp,
    LatticeSpec, LogWeightVector,
};
pub use params::{boundary_margin, classify, BoojumParams, PropernessReason, PropernessVerdict};
pub use special_fn::{digamma, log_gamma, log_multivariate_beta, log_sum_exp, PositiveVector};
