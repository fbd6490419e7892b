//! Target densities for the unobserved `Y` and unit-variance error models for
//! `Z`, with closed-form characteristic functions and exact samplers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::{Error, Result};

/// A user-supplied target: closed-form pdf, characteristic function and sampler.
///
/// Finite second moments are assumed by the supersmooth predictors but are
/// not checked.
pub trait CustomTarget: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn pdf(&self, x: f64) -> f64;
    fn cf(&self, t: f64) -> Complex64;
    fn sample_one(&self, rng: &mut dyn RngCore) -> f64;
    fn variance(&self) -> f64;
    /// A frequency beyond which `|φ_f(t)|` is negligible (below ~1e-20).
    fn cf_cutoff(&self) -> f64 {
        1e3
    }
}

/// Density `f` of the unobserved variable `Y`.
#[derive(Clone, Debug)]
pub enum TargetDensity {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// `p·N(mean1, variance) + (1-p)·N(mean2, variance)`.
    Mixture {
        mean1: f64,
        mean2: f64,
        variance: f64,
        p: f64,
    },
    Custom(Arc<dyn CustomTarget>),
}

fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    (-0.5 * z * z / variance).exp() / (2.0 * PI * variance).sqrt()
}

fn normal_cf(t: f64, mean: f64, variance: f64) -> Complex64 {
    Complex64::from_polar((-0.5 * variance * t * t).exp(), mean * t)
}

impl TargetDensity {
    pub fn standard_normal() -> Self {
        TargetDensity::Gaussian {
            mean: 0.0,
            variance: 1.0,
        }
    }

    /// The bimodal mixture of the simulation study: means ±1, variance 0.375, p = 0.5.
    pub fn bimodal_mixture() -> Self {
        TargetDensity::Mixture {
            mean1: -1.0,
            mean2: 1.0,
            variance: 0.375,
            p: 0.5,
        }
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite() && mean.is_finite()) {
            return Err(Error::Config(format!(
                "gaussian target needs finite mean and positive variance, got ({mean}, {variance})"
            )));
        }
        Ok(TargetDensity::Gaussian { mean, variance })
    }

    pub fn mixture(mean1: f64, mean2: f64, variance: f64, p: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) || !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "mixture target needs positive variance and p in [0, 1], got variance {variance}, p {p}"
            )));
        }
        Ok(TargetDensity::Mixture {
            mean1,
            mean2,
            variance,
            p,
        })
    }

    pub fn name(&self) -> String {
        match self {
            TargetDensity::Gaussian { mean, variance } => format!("gaussian:{mean},{variance}"),
            TargetDensity::Mixture {
                mean1,
                mean2,
                variance,
                p,
            } => format!("mixture:{mean1},{mean2},{variance},{p}"),
            TargetDensity::Custom(c) => c.name(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            TargetDensity::Gaussian { mean, variance } => normal_pdf(x, *mean, *variance),
            TargetDensity::Mixture {
                mean1,
                mean2,
                variance,
                p,
            } => {
                p * normal_pdf(x, *mean1, *variance) + (1.0 - p) * normal_pdf(x, *mean2, *variance)
            }
            TargetDensity::Custom(c) => c.pdf(x),
        }
    }

    /// Characteristic function `φ_f(t) = E[exp(itY)]`.
    pub fn cf(&self, t: f64) -> Complex64 {
        match self {
            TargetDensity::Gaussian { mean, variance } => normal_cf(t, *mean, *variance),
            TargetDensity::Mixture {
                mean1,
                mean2,
                variance,
                p,
            } => normal_cf(t, *mean1, *variance) * p + normal_cf(t, *mean2, *variance) * (1.0 - p),
            TargetDensity::Custom(c) => c.cf(t),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            TargetDensity::Gaussian { variance, .. } => *variance,
            TargetDensity::Mixture {
                mean1,
                mean2,
                variance,
                p,
            } => variance + p * (1.0 - p) * (mean1 - mean2).powi(2),
            TargetDensity::Custom(c) => c.variance(),
        }
    }

    /// Frequency beyond which `|φ_f|` is below ~1e-20.
    pub fn cf_cutoff(&self) -> f64 {
        match self {
            TargetDensity::Gaussian { variance, .. } | TargetDensity::Mixture { variance, .. } => {
                (2.0 * 46.0 / variance).sqrt()
            }
            TargetDensity::Custom(c) => c.cf_cutoff(),
        }
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            TargetDensity::Gaussian { mean, variance } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + variance.sqrt() * z
            }
            TargetDensity::Mixture {
                mean1,
                mean2,
                variance,
                p,
            } => {
                let first = rng.random::<f64>() < *p;
                let z: f64 = StandardNormal.sample(rng);
                let mean = if first { *mean1 } else { *mean2 };
                mean + variance.sqrt() * z
            }
            TargetDensity::Custom(c) => {
                let mut adapter = DynRng(rng);
                c.sample_one(&mut adapter)
            }
        }
    }

    /// `count` i.i.d. draws; deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }
}

/// Lets a generic `Rng` be handed to a `dyn RngCore` consumer.
struct DynRng<'a, R: Rng + ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Decay class of an error characteristic function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Smoothness {
    /// `φ_k(t) ~ C·|t|^λ₀·exp(-|t|^λ/μ)` as `|t| → ∞`.
    Supersmooth {
        c: f64,
        lambda0: f64,
        lambda: f64,
        mu: f64,
    },
    /// `φ_k(t)·t^β → C` as `t → ∞`.
    OrdinarySmooth { beta: f64, c: f64 },
}

/// Unit-variance error distribution of `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorModel {
    Gaussian,
    /// Laplace with scale `1/√2`, so `φ_k(t) = 1/(1 + t²/2)`.
    Laplace,
}

impl ErrorModel {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "gaussian" | "normal" => Ok(ErrorModel::Gaussian),
            "laplace" => Ok(ErrorModel::Laplace),
            other => Err(Error::Config(format!(
                "unknown error model `{other}` (expected gaussian or laplace)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ErrorModel::Gaussian => "gaussian",
            ErrorModel::Laplace => "laplace",
        }
    }

    /// `φ_k(t)`, real for both symmetric models.
    pub fn cf_real(&self, t: f64) -> f64 {
        match self {
            ErrorModel::Gaussian => (-0.5 * t * t).exp(),
            ErrorModel::Laplace => 1.0 / (1.0 + 0.5 * t * t),
        }
    }

    pub fn cf(&self, t: f64) -> Complex64 {
        Complex64::new(self.cf_real(t), 0.0)
    }

    /// `ln(1/|φ_k(t)|)`, finite for every `t`.
    pub fn log_inv_cf(&self, t: f64) -> f64 {
        match self {
            ErrorModel::Gaussian => 0.5 * t * t,
            ErrorModel::Laplace => (0.5 * t * t).ln_1p(),
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            ErrorModel::Gaussian => Smoothness::Supersmooth {
                c: 1.0,
                lambda0: 0.0,
                lambda: 2.0,
                mu: 2.0,
            },
            ErrorModel::Laplace => Smoothness::OrdinarySmooth { beta: 2.0, c: 2.0 },
        }
    }

    pub fn variance(&self) -> f64 {
        1.0
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ErrorModel::Gaussian => StandardNormal.sample(rng),
            ErrorModel::Laplace => {
                // Inverse CDF on u ∈ (-1/2, 1/2); scale 1/√2 gives unit variance.
                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                -FRAC_1_SQRT_2 * u.signum() * (-2.0 * u.abs()).ln_1p()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }
}

/// Noise scale `σ` of the model `X = Y + σZ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub sigma: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise scale must be finite and >= 0, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    /// `r = σ/h`.
    pub fn r(&self, h: f64) -> f64 {
        self.sigma / h
    }

    /// `ρ = h/σ`; infinite when `σ = 0`.
    pub fn rho(&self, h: f64) -> f64 {
        h / self.sigma
    }
}

/// Noise-to-signal ratio in percent: `σ²/Var[Y]·100`.
pub fn nsr(target: &TargetDensity, sigma: f64) -> Result<f64> {
    let var = target.variance();
    if !(var > 0.0) {
        return Err(Error::DegenerateTarget);
    }
    Ok(sigma * sigma / var * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_default;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gaussian_cf_values() {
        let f = TargetDensity::standard_normal();
        assert_eq!(f.cf(0.0), Complex64::new(1.0, 0.0));
        assert!((f.cf(1.0).re - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    #[test]
    fn symmetric_mixture_cf_is_real() {
        let f = TargetDensity::bimodal_mixture();
        for t in [0.3, 1.0, 2.7] {
            let v = f.cf(t);
            assert!(v.im.abs() < 1e-15);
            assert!((v.re - t.cos() * (-0.375 * t * t / 2.0).exp()).abs() < 1e-15);
            // Numerical Fourier transform of the pdf.
            let num = integrate_default(|x| (t * x).cos() * f.pdf(x), -12.0, 12.0);
            assert!((num - v.re).abs() < 1e-10);
        }
    }

    #[test]
    fn pdf_values_and_bimodality() {
        let g = TargetDensity::standard_normal();
        assert!((g.pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        let m = TargetDensity::bimodal_mixture();
        assert!((m.pdf(0.7) - m.pdf(-0.7)).abs() < 1e-15);
        assert!(m.pdf(1.0) > m.pdf(0.0) && m.pdf(-1.0) > m.pdf(0.0));
    }

    #[test]
    fn pdfs_integrate_to_one() {
        for f in [
            TargetDensity::standard_normal(),
            TargetDensity::bimodal_mixture(),
        ] {
            let mass = integrate_default(|x| f.pdf(x), -20.0, 20.0);
            assert!((1.0 - 1e-6..=1.0 + 1e-12).contains(&mass), "{mass}");
        }
    }

    #[test]
    fn mixture_variance() {
        let m = TargetDensity::bimodal_mixture();
        assert!((m.variance() - 1.375).abs() < 1e-15);
    }

    #[test]
    fn sampler_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = TargetDensity::standard_normal().sample(100_000, &mut rng);
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        assert!(mean.abs() < 0.02);

        let l = ErrorModel::Laplace.sample(100_000, &mut rng);
        let lm = l.iter().sum::<f64>() / l.len() as f64;
        let var = l.iter().map(|x| (x - lm).powi(2)).sum::<f64>() / (l.len() - 1) as f64;
        assert!((0.95..=1.05).contains(&var), "{var}");
    }

    #[test]
    fn sampler_is_deterministic() {
        let f = TargetDensity::bimodal_mixture();
        let a = f.sample(50, &mut ChaCha8Rng::seed_from_u64(3));
        let b = f.sample(50, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn smoothness_descriptors() {
        // Gaussian: exact supersmooth form for every t.
        if let Smoothness::Supersmooth {
            c,
            lambda0,
            lambda,
            mu,
        } = ErrorModel::Gaussian.smoothness()
        {
            for t in [0.0f64, 0.5, 3.0, 10.0] {
                let model = c * t.abs().powf(lambda0) * (-t.abs().powf(lambda) / mu).exp();
                assert!((model - ErrorModel::Gaussian.cf_real(t)).abs() < 1e-15);
            }
        } else {
            panic!("gaussian should be supersmooth");
        }
        if let Smoothness::OrdinarySmooth { beta, c } = ErrorModel::Laplace.smoothness() {
            let t = 100.0f64;
            assert!((t.powf(beta) * ErrorModel::Laplace.cf_real(t) - c).abs() < 1e-3);
        } else {
            panic!("laplace should be ordinary-smooth");
        }
    }

    #[test]
    fn error_cf_never_vanishes() {
        for e in [ErrorModel::Gaussian, ErrorModel::Laplace] {
            for t in [0.0, 1.0, 10.0, 30.0] {
                assert!(e.cf_real(t) > 0.0);
                assert!((e.log_inv_cf(t) + e.cf_real(t).ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nsr_values() {
        let g = TargetDensity::standard_normal();
        assert!((nsr(&g, 0.1).unwrap() - 1.0).abs() < 1e-12);
        assert!((nsr(&g, 2.0).unwrap() - 400.0).abs() < 1e-12);
        assert_eq!(nsr(&g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn nsr_rejects_degenerate_target() {
        #[derive(Debug)]
        struct PointMass;
        impl CustomTarget for PointMass {
            fn name(&self) -> String {
                "point".into()
            }
            fn pdf(&self, _: f64) -> f64 {
                0.0
            }
            fn cf(&self, _: f64) -> Complex64 {
                Complex64::new(1.0, 0.0)
            }
            fn sample_one(&self, _: &mut dyn RngCore) -> f64 {
                0.0
            }
            fn variance(&self) -> f64 {
                0.0
            }
        }
        let t = TargetDensity::Custom(Arc::new(PointMass));
        assert!(matches!(nsr(&t, 1.0), Err(Error::DegenerateTarget)));
    }

    #[test]
    fn noise_ratios() {
        let n = NoiseSpec::new(0.3).unwrap();
        assert!((n.r(0.2) * n.rho(0.2) - 1.0).abs() < 1e-15);
        assert!(NoiseSpec::new(-1.0).is_err());
    }
}
