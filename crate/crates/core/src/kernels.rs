//! Deconvolution kernels `w` whose Fourier transform `φ_w` vanishes outside
//! `[-1, 1]`.
//!
//! The built-in `fan-order-3` kernel has `φ_w(t) = (1 - t²)³` and the
//! closed-form spatial density
//!
//! ```text
//! w(x) = 48 cos x / (π x⁴) · (1 - 15/x²) - 144 sin x / (π x⁵) · (2 - 5/x²)
//! ```
//!
//! Near the origin the closed form cancels catastrophically (its terms grow
//! like `x⁻⁷`), so `|x| < 0.5` is evaluated from the even Taylor series of
//! `(1/π)∫₀¹ cos(tx)(1 - t²)³ dt` instead.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::quadrature::integrate;
use crate::{Error, Result};

/// Below this `|x|` the fan kernel switches to its Taylor polynomial.
pub const TAYLOR_CROSSOVER: f64 = 0.5;
/// Number of even Taylor terms (degree 20).
const TAYLOR_TERMS: usize = 11;

type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelSpec {
    /// `φ_w(t) = (1 - t²)³` on `[-1, 1]`; edge parameters `A = 8`, `α = 3`.
    FanOrder3,
    /// `φ_w = 1` on `[-1, 1]`, `w(x) = sin x / (π x)`; `A = 1`, `α = 0`.
    Sinc,
    /// A user kernel given by its symmetric Fourier transform on `[-1, 1]`.
    /// The spatial form is obtained by quadrature.
    Custom {
        name: String,
        phi: PhiFn,
        a: f64,
        alpha: f64,
    },
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl KernelSpec {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fan-order-3" | "fan" => Ok(KernelSpec::FanOrder3),
            "sinc" => Ok(KernelSpec::Sinc),
            other => Err(Error::Config(format!(
                "unknown kernel `{other}` (expected fan-order-3 or sinc)"
            ))),
        }
    }

    pub fn custom<F>(name: impl Into<String>, phi: F, a: f64, alpha: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        KernelSpec::Custom {
            name: name.into(),
            phi: Arc::new(phi),
            a,
            alpha,
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::FanOrder3 => "fan-order-3".into(),
            KernelSpec::Sinc => "sinc".into(),
            KernelSpec::Custom { name, .. } => name.clone(),
        }
    }

    /// `φ_w(t)`, zero outside `[-1, 1]`.
    pub fn phi(&self, t: f64) -> f64 {
        if t.abs() > 1.0 {
            return 0.0;
        }
        match self {
            KernelSpec::FanOrder3 => {
                let u = 1.0 - t * t;
                u * u * u
            }
            KernelSpec::Sinc => 1.0,
            KernelSpec::Custom { phi, .. } => phi(t.abs()),
        }
    }

    /// Spatial kernel `w(x) = (1/2π)∫ e^{-itx} φ_w(t) dt`.
    pub fn spatial(&self, x: f64) -> f64 {
        match self {
            KernelSpec::FanOrder3 => fan_spatial(x),
            KernelSpec::Sinc => {
                if x.abs() < 1e-4 {
                    // sin x / x = 1 - x²/6 + x⁴/120
                    let x2 = x * x;
                    (1.0 - x2 / 6.0 + x2 * x2 / 120.0) / PI
                } else {
                    x.sin() / (PI * x)
                }
            }
            KernelSpec::Custom { .. } => {
                integrate(|t| (t * x).cos() * self.phi(t), 0.0, 1.0, 1e-13) / PI
            }
        }
    }

    /// Stored `(A, α)` with `φ_w(1 - t) = A·tᵅ + o(tᵅ)`, after checking the
    /// limit numerically.
    pub fn edge_params(&self) -> Result<(f64, f64)> {
        let (a, alpha) = self.stored_edge_params();
        check_edge_limit(|t| self.phi(t), a, alpha)?;
        Ok((a, alpha))
    }

    fn stored_edge_params(&self) -> (f64, f64) {
        match self {
            KernelSpec::FanOrder3 => (8.0, 3.0),
            KernelSpec::Sinc => (1.0, 0.0),
            KernelSpec::Custom { a, alpha, .. } => (*a, *alpha),
        }
    }
}

/// Checks that `φ(1 - t)/tᵅ` settles within 1% of `A` as `t ↓ 0`.
pub fn check_edge_limit<F: Fn(f64) -> f64>(phi: F, a: f64, alpha: f64) -> Result<()> {
    let ratios: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&t| phi(1.0 - t) / t.powf(alpha))
        .collect();
    let tol = 0.01 * a.abs().max(1e-12);
    let stable = ratios.iter().all(|r| (r - a).abs() <= tol);
    if stable {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "kernel edge expansion does not approach A = {a} with alpha = {alpha}: ratios {ratios:?}"
        )))
    }
}

fn fan_taylor_coefficients() -> [f64; TAYLOR_TERMS] {
    // c_k = (-1)^k / (2k)! · ∫₀¹ t^{2k} (1 - t²)³ dt / π
    let binom = [1.0, -3.0, 3.0, -1.0];
    let mut out = [0.0; TAYLOR_TERMS];
    let mut fact = 1.0;
    for (k, c) in out.iter_mut().enumerate() {
        if k > 0 {
            fact *= (2 * k - 1) as f64 * (2 * k) as f64;
        }
        let moment: f64 = binom
            .iter()
            .enumerate()
            .map(|(j, b)| b / (2 * k + 2 * j + 1) as f64)
            .sum();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        *c = sign * moment / (fact * PI);
    }
    out
}

fn fan_spatial(x: f64) -> f64 {
    let ax = x.abs();
    if ax < TAYLOR_CROSSOVER {
        let coef = fan_taylor_coefficients();
        let x2 = ax * ax;
        coef.iter().rev().fold(0.0, |acc, c| acc * x2 + c)
    } else {
        fan_closed_form(ax)
    }
}

fn fan_closed_form(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    48.0 * x.cos() / (PI * x4) * (1.0 - 15.0 / x2)
        - 144.0 * x.sin() / (PI * x4 * x) * (2.0 - 5.0 / x2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadrature_spatial(kernel: &KernelSpec, x: f64) -> f64 {
        integrate(|t| (t * x).cos() * kernel.phi(t), 0.0, 1.0, 1e-14) / PI
    }

    #[test]
    fn phi_values() {
        let k = KernelSpec::FanOrder3;
        assert_eq!(k.phi(0.0), 1.0);
        assert!((k.phi(0.5) - 0.421875).abs() < 1e-15);
        assert_eq!(k.phi(1.2), 0.0);
        assert_eq!(k.phi(-0.3), k.phi(0.3));
    }

    #[test]
    fn spatial_at_origin() {
        let w0 = KernelSpec::FanOrder3.spatial(0.0);
        assert!((w0 - 16.0 / (35.0 * PI)).abs() < 1e-15);
        assert!((w0 - quadrature_spatial(&KernelSpec::FanOrder3, 0.0)).abs() < 1e-10);
    }

    #[test]
    fn branches_agree_at_crossover() {
        let coef = fan_taylor_coefficients();
        let x = TAYLOR_CROSSOVER;
        let taylor = coef.iter().rev().fold(0.0, |acc, c| acc * x * x + c);
        assert!((taylor - fan_closed_form(x)).abs() < 1e-10);
    }

    #[test]
    fn spatial_matches_quadrature() {
        let k = KernelSpec::FanOrder3;
        for x in [0.1, 0.49, 0.51, 1.0, 3.0, 5.0, 12.5, 40.0] {
            assert!(
                (k.spatial(x) - quadrature_spatial(&k, x)).abs() < 1e-8,
                "x={x}"
            );
            assert_eq!(k.spatial(-x), k.spatial(x));
        }
        let s = KernelSpec::Sinc;
        for x in [0.0, 1e-5, 0.7, 9.0] {
            assert!(
                (s.spatial(x) - quadrature_spatial(&s, x)).abs() < 1e-10,
                "x={x}"
            );
        }
    }

    #[test]
    fn edge_parameters() {
        assert_eq!(KernelSpec::FanOrder3.edge_params().unwrap(), (8.0, 3.0));
        assert_eq!(KernelSpec::Sinc.edge_params().unwrap(), (1.0, 0.0));
        let t: f64 = 1e-4;
        let ratio = KernelSpec::FanOrder3.phi(1.0 - t) / t.powi(3);
        assert!((7.99..=8.0).contains(&ratio));

        let tri = KernelSpec::custom("triangular", |t| 1.0 - t.abs(), 1.0, 1.0);
        assert_eq!(tri.edge_params().unwrap(), (1.0, 1.0));
        let wrong = KernelSpec::custom("wrong", |t| 1.0 - t.abs(), 2.0, 1.0);
        assert!(wrong.edge_params().is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in ["fan-order-3", "sinc"] {
            assert_eq!(KernelSpec::from_name(name).unwrap().name(), name);
        }
        assert!(KernelSpec::from_name("epanechnikov").is_err());
    }
}
