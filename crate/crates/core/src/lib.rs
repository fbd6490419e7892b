//! Deconvolution kernel density estimation for the measurement-error model
//! `X = Y + σ·Z` where the error scale `σ` is small and may vanish with the
//! sample size.
//!
//! The crate is organised around the pieces of a simulation study:
//!
//! - [`densities`]: target densities of the unobserved `Y` and unit-variance
//!   error models for `Z`, with characteristic functions and samplers.
//! - [`kernels`]: deconvolution kernels whose Fourier transform is supported
//!   on `[-1, 1]`.
//! - [`deconvolver`]: the estimator itself, evaluated through the empirical
//!   characteristic function with linear binning and chirp-z transforms.
//! - [`asymptotics`]: closed-form mean and standard-deviation predictors for
//!   the bounded-ratio, ordinary-smooth and supersmooth regimes.
//! - [`bandwidth`]: exact MISE through characteristic functions and the
//!   grid-search bandwidth selector.
//! - [`simulation`]: a deterministic, parallel Monte Carlo harness with
//!   normality diagnostics.
//! - [`cli`]: the command-line front end used by the `deconv` binary.
//!
//! ```
//! use deconv::prelude::*;
//!
//! let kernel = KernelSpec::FanOrder3;
//! let error = ErrorModel::Gaussian;
//! let sd = sd_thm3_exact(&kernel, &error, 1000, 0.1, 0.1).unwrap();
//! assert!((sd - 0.034477).abs() < 1e-5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod bandwidth;
pub mod chirp;
pub mod cli;
pub mod deconvolver;
pub mod densities;
mod error;
pub mod kernels;
pub mod quadrature;
pub mod simulation;
pub mod special;
pub mod stats;

pub use error::{Error, Result};

/// Commonly used types and functions.
pub mod prelude {
    pub use crate::asymptotics::{
        asnrm2_exact, asnrm2_expansion, mean_theory, sd_thm1, sd_thm2, sd_thm3_exact,
        sd_thm3_expansion, theory_curves, variance_integral_thm1, zeta, LogScaled,
        SupersmoothConstants, TheoryCurves,
    };
    pub use crate::bandwidth::{mise, select_bandwidth, MiseCurve, MiseTerms};
    pub use crate::deconvolver::{
        bin_data, compute_wr, BinnedSample, Deconvolver, DensityEstimate, EcfMethod,
        EstimateConfig, Grid,
    };
    pub use crate::densities::{nsr, ErrorModel, NoiseSpec, Smoothness, TargetDensity};
    pub use crate::kernels::KernelSpec;
    pub use crate::simulation::{
        regime_classifier, run_experiment, BandwidthChoice, ExperimentConfig, Figure, Regime,
        SimulationReport,
    };
    pub use crate::stats::{normality_diagnostics, standardize, NormalityDiagnostics};
    pub use crate::{Error, Result};
}
