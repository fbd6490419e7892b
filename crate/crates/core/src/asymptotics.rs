//! Closed-form mean and standard-deviation predictors for the estimator.
//!
//! - Bounded `r = σ/h`: the estimator is asymptotically normal with variance
//!   `f(x)∫|w_r|² / (n h)`, where `∫|w_r|²` is computed on the Fourier side.
//! - Ordinary-smooth error with `r → ∞`: variance
//!   `f(x)/(2πC²)∫|t|^{2β}|φ_w(t)|² dt / (n h ρ^{2β})`.
//! - Supersmooth error with `σ^λ/h^{λ-1} → ∞`: the standard deviation does
//!   not depend on `x` or `f`. Two forms are provided: the literal asymptotic
//!   expression, and the "exact-integral" form that keeps the endpoint
//!   integral `∫₀¹ φ_w(s) s^{-λ₀} exp(s^λ/(μρ^λ)) ds` instead of its
//!   expansion `AΓ(α+1)(μρ^λ/λ)^{1+α} e^{1/(μρ^λ)}`.
//!
//! The exponential factor `ζ(ρ) = exp(1/(μρ^λ))` overflows for small `ρ`, so
//! those quantities travel as [`LogScaled`] pairs and are exponentiated only
//! at the end.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use crate::deconvolver::{check_ratio, Grid};
use crate::densities::{ErrorModel, Smoothness, TargetDensity};
use crate::kernels::KernelSpec;
use crate::quadrature::integrate;
use crate::special::ln_gamma;
use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-13;

/// `mantissa · exp(log_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl LogScaled {
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.log_scale
    }

    /// The plain value; errors instead of returning infinity.
    pub fn value(&self) -> Result<f64> {
        let v = self.mantissa * self.log_scale.exp();
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::ExponentOverflow {
                exponent: self.ln(),
            })
        }
    }

    /// `self / other` without leaving log space.
    pub fn ratio(&self, other: &LogScaled) -> f64 {
        (self.mantissa / other.mantissa) * (self.log_scale - other.log_scale).exp()
    }
}

/// Constants of a supersmooth error paired with a kernel's edge expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupersmoothConstants {
    pub c: f64,
    pub lambda0: f64,
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub alpha: f64,
}

impl SupersmoothConstants {
    pub fn new(kernel: &KernelSpec, error: &ErrorModel) -> Result<Self> {
        let Smoothness::Supersmooth {
            c,
            lambda0,
            lambda,
            mu,
        } = error.smoothness()
        else {
            return Err(Error::NotSupersmooth(error.name().into()));
        };
        let (a, alpha) = kernel.edge_params()?;
        Self::from_parts(c, lambda0, lambda, mu, a, alpha)
    }

    pub fn from_parts(
        c: f64,
        lambda0: f64,
        lambda: f64,
        mu: f64,
        a: f64,
        alpha: f64,
    ) -> Result<Self> {
        if !(lambda > 1.0 && mu > 0.0 && alpha >= 0.0) || c == 0.0 {
            return Err(Error::Domain(format!(
                "supersmooth constants need λ > 1, μ > 0, α ≥ 0, C ≠ 0 (got λ={lambda}, μ={mu}, α={alpha}, C={c})"
            )));
        }
        Ok(Self {
            c,
            lambda0,
            lambda,
            mu,
            a,
            alpha,
        })
    }

    /// `ln ζ(ρ) = 1/(μρ^λ)`.
    pub fn ln_zeta(&self, rho: f64) -> f64 {
        1.0 / (self.mu * rho.powf(self.lambda))
    }
}

/// `ζ(ρ) = exp(1/(μρ^λ))`.
pub fn zeta(rho: f64, mu: f64, lambda: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ζ needs ρ > 0, got {rho}")));
    }
    let exponent = 1.0 / (mu * rho.powf(lambda));
    if exponent > f64::MAX.ln() {
        return Err(Error::ExponentOverflow { exponent });
    }
    Ok(exponent.exp())
}

/// Smoothed target `(f * w_h)(x) = (1/2π)∫_{|t|≤1/h} e^{-itx} φ_f(t) φ_w(ht) dt`.
pub fn mean_theory(target: &TargetDensity, kernel: &KernelSpec, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Config(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    let upper = (1.0 / h).min(target.cf_cutoff());
    let v = integrate(
        |t| {
            let phase = num_complex::Complex64::from_polar(1.0, -t * x);
            (phase * target.cf(t)).re * kernel.phi(h * t)
        },
        0.0,
        upper,
        QUAD_TOL,
    );
    Ok(v / PI)
}

/// `∫|w_r(u)|² du = (1/2π)∫₋₁¹ |φ_w(t)/φ_k(rt)|² dt`.
pub fn variance_integral_thm1(kernel: &KernelSpec, error: &ErrorModel, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("ratio r must be >= 0, got {r}")));
    }
    check_ratio(error, r, 2.0)?;
    let v = integrate(
        |t| {
            let p = kernel.phi(t);
            p * p * (2.0 * error.log_inv_cf(r * t)).exp()
        },
        0.0,
        1.0,
        QUAD_TOL,
    );
    Ok(v / PI)
}

/// Bounded-ratio predictor `sqrt(f(x)·∫|w_r|² / (n h))`, `r = σ/h`.
#[allow(clippy::too_many_arguments)]
pub fn sd_thm1(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    x: f64,
    n: usize,
    h: f64,
    sigma: f64,
) -> Result<f64> {
    check_n_h(n, h)?;
    let integral = variance_integral_thm1(kernel, error, sigma / h)?;
    Ok((target.pdf(x) * integral / (n as f64 * h)).sqrt())
}

fn check_n_h(n: usize, h: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Config(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    Ok(())
}

/// `∫₀¹ φ_w(s) s^{-λ₀} exp(s^λ/(μρ^λ)) ds`, carried as
/// `exp(1/(μρ^λ)) · ∫₀¹ φ_w(s) s^{-λ₀} exp((s^λ - 1)/(μρ^λ)) ds`.
pub fn asnrm2_exact(
    kernel: &KernelSpec,
    constants: &SupersmoothConstants,
    rho: f64,
) -> Result<LogScaled> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ρ must be positive, got {rho}")));
    }
    if constants.lambda0 >= 1.0 && kernel.phi(0.0) != 0.0 {
        return Err(Error::Domain(format!(
            "s^(-λ₀) with λ₀ = {} is not integrable at 0",
            constants.lambda0
        )));
    }
    let scale = constants.ln_zeta(rho);
    let lambda = constants.lambda;
    let lambda0 = constants.lambda0;
    let integrand = |s: f64| {
        let weight = if lambda0 == 0.0 {
            1.0
        } else {
            s.powf(-lambda0)
        };
        kernel.phi(s) * weight * ((s.powf(lambda) - 1.0) * scale).exp()
    };
    // The integrand is concentrated in a layer of width ~1/scale below s = 1.
    let split = (1.0 - 20.0 / (lambda * scale.max(1e-300))).max(0.0);
    let mantissa = if split > 0.0 {
        integrate(integrand, 0.0, split, QUAD_TOL) + integrate(integrand, split, 1.0, QUAD_TOL)
    } else {
        integrate(integrand, 0.0, 1.0, QUAD_TOL)
    };
    Ok(LogScaled {
        mantissa,
        log_scale: scale,
    })
}

/// `A·Γ(α+1)·(μρ^λ/λ)^{1+α}·exp(1/(μρ^λ))` in log-scaled form.
pub fn asnrm2_expansion_scaled(constants: &SupersmoothConstants, rho: f64) -> Result<LogScaled> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ρ must be positive, got {rho}")));
    }
    let c = constants;
    let log_poly = (1.0 + c.alpha) * (c.mu * rho.powf(c.lambda) / c.lambda).ln();
    Ok(LogScaled {
        mantissa: c.a * (ln_gamma(c.alpha + 1.0) + log_poly).exp(),
        log_scale: c.ln_zeta(rho),
    })
}

/// The expansion as a plain number; errors on overflow.
pub fn asnrm2_expansion(constants: &SupersmoothConstants, rho: f64) -> Result<f64> {
    asnrm2_expansion_scaled(constants, rho)?.value()
}

fn check_sigma(n: usize, sigma: f64, h: f64) -> Result<()> {
    check_n_h(n, h)?;
    if !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "noise scale must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Supersmooth predictor from the exact endpoint integral:
/// `ρ^{λ₀-1} · I(ρ) / (π |C| σ √(2n))`, `ρ = h/σ`. No `x` dependence.
pub fn sd_thm3_exact(
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<f64> {
    let constants = SupersmoothConstants::new(kernel, error)?;
    sd_thm3_exact_with(kernel, &constants, n, sigma, h)
}

pub fn sd_thm3_exact_with(
    kernel: &KernelSpec,
    constants: &SupersmoothConstants,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<f64> {
    check_sigma(n, sigma, h)?;
    let rho = h / sigma;
    let integral = asnrm2_exact(kernel, constants, rho)?;
    let prefactor = (constants.lambda0 - 1.0) * rho.ln()
        - (PI * constants.c.abs() * sigma * SQRT_2 * (n as f64).sqrt()).ln();
    LogScaled {
        mantissa: integral.mantissa,
        log_scale: integral.log_scale + prefactor,
    }
    .value()
}

/// The literal asymptotic form
/// `A/(√2 π C) (μ/λ)^{1+α} Γ(α+1) ρ^{λ(1+α)+λ₀-1} ζ(ρ) / (√n σ)`.
pub fn sd_thm3_expansion(
    kernel: &KernelSpec,
    error: &ErrorModel,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<f64> {
    let constants = SupersmoothConstants::new(kernel, error)?;
    sd_thm3_expansion_scaled(&constants, n, sigma, h)?.value()
}

pub fn sd_thm3_expansion_scaled(
    constants: &SupersmoothConstants,
    n: usize,
    sigma: f64,
    h: f64,
) -> Result<LogScaled> {
    check_sigma(n, sigma, h)?;
    let c = constants;
    let rho = h / sigma;
    let log_mag = (c.a.abs() / (SQRT_2 * PI * c.c.abs())).ln()
        + (1.0 + c.alpha) * (c.mu / c.lambda).ln()
        + ln_gamma(c.alpha + 1.0)
        + (c.lambda * (1.0 + c.alpha) + c.lambda0 - 1.0) * rho.ln()
        - ((n as f64).sqrt() * sigma).ln();
    Ok(LogScaled {
        mantissa: log_mag.exp(),
        log_scale: c.ln_zeta(rho),
    })
}

/// `∫₋₁¹ |t|^{2β} φ_w(t)² dt`.
pub fn ordinary_smooth_integral(kernel: &KernelSpec, beta: f64) -> f64 {
    2.0 * integrate(
        |t| {
            let p = kernel.phi(t);
            t.powf(2.0 * beta) * p * p
        },
        0.0,
        1.0,
        QUAD_TOL,
    )
}

/// Ordinary-smooth predictor
/// `sqrt(f(x)/(2πC²)·∫|t|^{2β}φ_w² / (n h ρ^{2β}))`, `ρ = h/σ`.
#[allow(clippy::too_many_arguments)]
pub fn sd_thm2(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    x: f64,
    n: usize,
    h: f64,
    sigma: f64,
) -> Result<f64> {
    let Smoothness::OrdinarySmooth { beta, c } = error.smoothness() else {
        return Err(Error::NotOrdinarySmooth(error.name().into()));
    };
    sd_thm2_with(target, kernel, beta, c, x, n, h, sigma)
}

#[allow(clippy::too_many_arguments)]
pub fn sd_thm2_with(
    target: &TargetDensity,
    kernel: &KernelSpec,
    beta: f64,
    c: f64,
    x: f64,
    n: usize,
    h: f64,
    sigma: f64,
) -> Result<f64> {
    check_sigma(n, sigma, h)?;
    let rho = h / sigma;
    let integral = ordinary_smooth_integral(kernel, beta);
    let var = target.pdf(x) / (2.0 * PI * c * c) * integral / (n as f64 * h * rho.powf(2.0 * beta));
    Ok(var.sqrt())
}

/// Theoretical curves over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryCurves {
    pub grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub sd_thm1: Vec<f64>,
    /// Present for supersmooth errors with `σ > 0`.
    pub sd_thm3_exact: Option<f64>,
    pub sd_thm3_expansion: Option<f64>,
    /// The expansion with the `ζ(ρ)` factor left out, for comparison with
    /// values quoted without it.
    pub sd_thm3_expansion_without_zeta: Option<f64>,
    /// Present for ordinary-smooth errors with `σ > 0`.
    pub sd_thm2: Option<Vec<f64>>,
}

impl TheoryCurves {
    /// CSV `x,mean_theory,sd_thm1[,sd_thm3_exact,sd_thm3_expansion][,sd_thm2]`.
    /// The supersmooth columns are omitted when they do not apply (`σ = 0`
    /// or an ordinary-smooth error).
    pub fn to_csv(&self) -> String {
        use crate::cli::fmt_sig;
        let thm3 = self.sd_thm3_exact.is_some();
        let mut out = String::from("x,mean_theory,sd_thm1");
        if thm3 {
            out.push_str(",sd_thm3_exact,sd_thm3_expansion");
        }
        if self.sd_thm2.is_some() {
            out.push_str(",sd_thm2");
        }
        out.push('\n');
        for i in 0..self.grid.len() {
            let _ = write!(
                out,
                "{},{},{}",
                fmt_sig(self.grid[i]),
                fmt_sig(self.mean[i]),
                fmt_sig(self.sd_thm1[i])
            );
            if thm3 {
                let _ = write!(
                    out,
                    ",{},{}",
                    fmt_opt(self.sd_thm3_exact),
                    fmt_opt(self.sd_thm3_expansion)
                );
            }
            if let Some(sd2) = &self.sd_thm2 {
                let _ = write!(out, ",{}", fmt_sig(sd2[i]));
            }
            out.push('\n');
        }
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(crate::cli::fmt_sig).unwrap_or_else(|| "inf".into())
}

/// All predictors for one configuration.
///
/// `sd_thm1` falls back to `NaN` when `r = σ/h` overflows; the supersmooth
/// expansion is `None` when it overflows.
#[allow(clippy::too_many_arguments)]
pub fn theory_curves(
    target: &TargetDensity,
    kernel: &KernelSpec,
    error: &ErrorModel,
    grid: &Grid,
    n: usize,
    h: f64,
    sigma: f64,
) -> Result<TheoryCurves> {
    check_n_h(n, h)?;
    let xs = grid.points();
    let mean = xs
        .iter()
        .map(|&x| mean_theory(target, kernel, x, h))
        .collect::<Result<Vec<_>>>()?;
    let sd1 = match variance_integral_thm1(kernel, error, sigma / h) {
        Ok(integral) => xs
            .iter()
            .map(|&x| (target.pdf(x) * integral / (n as f64 * h)).sqrt())
            .collect(),
        Err(Error::Overflow { .. }) => vec![f64::NAN; xs.len()],
        Err(e) => return Err(e),
    };

    let mut curves = TheoryCurves {
        grid: xs.clone(),
        mean,
        sd_thm1: sd1,
        sd_thm3_exact: None,
        sd_thm3_expansion: None,
        sd_thm3_expansion_without_zeta: None,
        sd_thm2: None,
    };
    if sigma > 0.0 {
        match error.smoothness() {
            Smoothness::Supersmooth { .. } => {
                let constants = SupersmoothConstants::new(kernel, error)?;
                curves.sd_thm3_exact = Some(sd_thm3_exact_with(kernel, &constants, n, sigma, h)?);
                let expansion = sd_thm3_expansion_scaled(&constants, n, sigma, h)?;
                curves.sd_thm3_expansion = expansion.value().ok();
                curves.sd_thm3_expansion_without_zeta = Some(expansion.mantissa);
            }
            Smoothness::OrdinarySmooth { beta, c } => {
                curves.sd_thm2 = Some(
                    xs.iter()
                        .map(|&x| sd_thm2_with(target, kernel, beta, c, x, n, h, sigma))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
        }
    }
    Ok(curves)
}
