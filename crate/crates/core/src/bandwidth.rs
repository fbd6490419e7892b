//! Exact MISE for a known target and the grid-search bandwidth selector.
//!
//! With `E|φ_emp(t)|² = 1/n + (1 - 1/n)|φ_f(t)φ_k(σt)|²` Parseval gives
//!
//! ```text
//! MISE(h) = (1/2π) ∫ [ n⁻¹|φ_w(ht)|²/|φ_k(σt)|²
//!                      + ((1 - n⁻¹)|φ_w(ht)|² - 2φ_w(ht) + 1)|φ_f(t)|² ] dt
//! ```
//!
//! which splits into a variance term
//! `(2πn)⁻¹∫|φ_w(ht)|²(|φ_k(σt)|⁻² - |φ_f(t)|²)dt` and a squared-bias term
//! `(2π)⁻¹∫|1 - φ_w(ht)|²|φ_f(t)|²dt`, both non-negative.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::deconvolver::check_ratio;
use crate::densities::{ErrorModel, TargetDensity};
use crate::kernels::KernelSpec;
use crate::quadrature::integrate;
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 0.01;
pub const DEFAULT_GRID_SIZE: usize = 100;
const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MiseTerms {
    pub variance: f64,
    pub bias_sq: f64,
}

impl MiseTerms {
    pub fn total(&self) -> f64 {
        self.variance + self.bias_sq
    }
}

/// Variance and squared-bias parts of the exact MISE.
pub fn mise_terms(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<MiseTerms> {
    if n == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Config(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    check_ratio(error, sigma / h, 2.0)?;
    let t_max = 1.0 / h;
    let cf2 = |t: f64| target.cf(t).norm_sqr();

    // Substituting s = ht keeps the oscillation-free integrand on [0, 1].
    let variance = integrate(
        |s| {
            let p = kernel.phi(s);
            let t = s * t_max;
            p * p * ((2.0 * error.log_inv_cf(sigma * t)).exp() - cf2(t))
        },
        0.0,
        1.0,
        QUAD_TOL,
    ) * t_max
        / (PI * n as f64);

    let cutoff = target.cf_cutoff();
    let inner_upper = t_max.min(cutoff);
    let inner = integrate(
        |t| {
            let d = 1.0 - kernel.phi(h * t);
            d * d * cf2(t)
        },
        0.0,
        inner_upper,
        QUAD_TOL,
    );
    let tail = if cutoff > t_max {
        integrate(cf2, t_max, cutoff, QUAD_TOL)
    } else {
        0.0
    };
    Ok(MiseTerms {
        variance,
        bias_sq: (inner + tail) / PI,
    })
}

/// Exact MISE of the estimator with bandwidth `h`.
pub fn mise(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<f64> {
    Ok(mise_terms(target, kernel, error, n, sigma, h)?.total())
}

/// MISE over the bandwidth grid `h_k = step·k`, `k = 1..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct MiseCurve {
    pub bandwidths: Vec<f64>,
    /// `+∞` where `σ/h` overflows.
    pub mise: Vec<f64>,
    pub variance: Vec<f64>,
    pub bias_sq: Vec<f64>,
    pub argmin: usize,
}

impl MiseCurve {
    pub fn best_bandwidth(&self) -> f64 {
        self.bandwidths[self.argmin]
    }

    /// CSV `h,mise,variance_term,bias_sq_term`.
    pub fn to_csv(&self) -> String {
        use crate::cli::fmt_sig;
        let mut out = String::from("h,mise,variance_term,bias_sq_term\n");
        for i in 0..self.bandwidths.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_sig(self.bandwidths[i]),
                fmt_sig(self.mise[i]),
                fmt_sig(self.variance[i]),
                fmt_sig(self.bias_sq[i])
            );
        }
        out
    }
}

/// Evaluates the MISE on `step·k`, `k = 1..=grid_size`, in parallel.
/// Bandwidths whose `σ/h` overflows are recorded as `+∞`.
pub fn mise_curve(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    step: f64,
    grid_size: usize,
) -> Result<MiseCurve> {
    if !(step > 0.0) || grid_size == 0 {
        return Err(Error::Config(format!(
            "bandwidth grid needs a positive step and size (step {step}, K {grid_size})"
        )));
    }
    let bandwidths: Vec<f64> = (1..=grid_size).map(|k| step * k as f64).collect();
    let terms: Vec<Option<MiseTerms>> = bandwidths
        .par_iter()
        .map(|&h| match mise_terms(target, kernel, error, n, sigma, h) {
            Ok(t) => Ok(Some(t)),
            Err(Error::Overflow { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let variance: Vec<f64> = terms
        .iter()
        .map(|t| t.map_or(f64::INFINITY, |t| t.variance))
        .collect();
    let bias_sq: Vec<f64> = terms
        .iter()
        .map(|t| t.map_or(f64::INFINITY, |t| t.bias_sq))
        .collect();
    let mise: Vec<f64> = terms
        .iter()
        .map(|t| t.map_or(f64::INFINITY, |t| t.total()))
        .collect();
    // First index attaining the minimum: ties go to the smaller bandwidth.
    let argmin = mise
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v < mise[best] { i } else { best });
    if !mise[argmin].is_finite() {
        return Err(Error::Config(
            "every bandwidth on the grid overflows".into(),
        ));
    }
    Ok(MiseCurve {
        bandwidths,
        mise,
        variance,
        bias_sq,
        argmin,
    })
}

/// Grid-search minimiser of the exact MISE. Fails when the minimum sits on
/// the last grid point.
#[allow(clippy::too_many_arguments)]
pub fn select_bandwidth(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    step: f64,
    grid_size: usize,
) -> Result<(f64, MiseCurve)> {
    let curve = mise_curve(target, kernel, error, n, sigma, step, grid_size)?;
    if curve.argmin + 1 == curve.bandwidths.len() {
        return Err(Error::BoundaryMinimum {
            h: curve.best_bandwidth(),
            k: grid_size,
        });
    }
    Ok((curve.best_bandwidth(), curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_nonnegative_and_sum() {
        let f = TargetDensity::standard_normal();
        for h in [0.05, 0.1, 0.4] {
            let t = mise_terms(
                &f,
                &KernelSpec::FanOrder3,
                &ErrorModel::Gaussian,
                1000,
                0.1,
                h,
            )
            .unwrap();
            assert!(t.variance >= 0.0 && t.bias_sq >= 0.0);
            let m = mise(
                &f,
                &KernelSpec::FanOrder3,
                &ErrorModel::Gaussian,
                1000,
                0.1,
                h,
            )
            .unwrap();
            assert!((m - t.variance - t.bias_sq).abs() <= 1e-12 * m);
        }
    }

    #[test]
    fn large_n_leaves_pure_bias() {
        let f = TargetDensity::standard_normal();
        let k = KernelSpec::FanOrder3;
        let h = 0.3;
        let m = mise(&f, &k, &ErrorModel::Gaussian, usize::MAX / 4, 0.1, h).unwrap();
        let bias = integrate(
            |t| (k.phi(h * t) - 1.0).powi(2) * (-t * t).exp(),
            0.0,
            12.0,
            1e-14,
        ) / PI;
        assert!((m - bias).abs() < 1e-12, "{m} vs {bias}");
    }

    #[test]
    fn mise_nonincreasing_in_n() {
        let f = TargetDensity::bimodal_mixture();
        let k = KernelSpec::FanOrder3;
        let mut prev = f64::INFINITY;
        for n in [10, 100, 1000, 10_000] {
            let m = mise(&f, &k, &ErrorModel::Gaussian, n, 0.2, 0.15).unwrap();
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn boundary_minimum_is_reported() {
        // With a tiny grid the curve is still decreasing at its end.
        let f = TargetDensity::standard_normal();
        let err = select_bandwidth(
            &f,
            &KernelSpec::FanOrder3,
            &ErrorModel::Gaussian,
            1000,
            0.1,
            0.01,
            5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BoundaryMinimum { .. }));
    }

    #[test]
    fn overflowing_bandwidths_are_infinite() {
        let f = TargetDensity::standard_normal();
        let c = mise_curve(
            &f,
            &KernelSpec::FanOrder3,
            &ErrorModel::Gaussian,
            100_000,
            2.0,
            0.01,
            60,
        )
        .unwrap();
        assert!(c.mise[0].is_infinite());
        assert!(c.mise[c.argmin].is_finite());
    }

    #[test]
    fn csv_header() {
        let f = TargetDensity::standard_normal();
        let c = mise_curve(
            &f,
            &KernelSpec::FanOrder3,
            &ErrorModel::Gaussian,
            1000,
            0.1,
            0.05,
            4,
        )
        .unwrap();
        let csv = c.to_csv();
        assert!(csv.starts_with("h,mise,variance_term,bias_sq_term\n"));
        assert_eq!(csv.lines().count(), 5);
    }
}
