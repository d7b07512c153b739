//! Spectral white-noise tests for functional time series.
//!
//! Curves are stored on a grid of `[0, 1]`; integrals are grid means. The
//! main entry points are [`classical_test`], [`precise_test`] and
//! [`confidence_interval`], all driven by [`SpectralAnalysis`], which
//! computes the distance estimate and both variance estimates from a single
//! functional DFT. [`simulate`] generates the benchmark processes and [`mc`]
//! runs Monte Carlo experiments over them.
//!
//! With the `parallel` feature (on by default) FFT columns, frequency sums and
//! Monte Carlo replications run on rayon. Results do not depend on the number
//! of threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functional;
pub mod inference;
pub mod mc;
pub mod normal;
mod par;
pub mod simulate;
pub mod spectral;

pub use error::{Error, ReplicationFailure, Result};
pub use functional::{
    autocov_kernel, autocov_matrix, inner_product, integrate_bi, mean_curve, BivariateKernel,
    ComplexCurve, FourierFrequency, FunctionalSample, Grid,
};
pub use inference::{
    classical_test, confidence_interval, default_lag_cutoff, m_hat_squared, m_tilde_squared,
    power_approximation, precise_test, var_h0_hat, var_h1_hat_gaussian, ConfidenceInterval,
    Decision, PowerEstimate, SpectralAnalysis, TestMode, TestReport,
};
pub use par::{current_threads, with_threads};
pub use spectral::{fdft, periodogram, s_statistics, FdftTable};

/// Crate version, recorded in Monte Carlo metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
