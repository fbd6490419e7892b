//! Sample moments, standardisation and a one-sample Kolmogorov–Smirnov test
//! against the standard normal.

use statrs::function::erf::erfc;

use crate::{Error, Result};

/// Smallest sample accepted by [`normality_diagnostics`].
pub const MIN_DIAGNOSTIC_SAMPLE: usize = 30;

/// Two-pass mean and unbiased standard deviation.
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    // Second pass; the residual sum corrects rounding in the mean.
    let (mut ss, mut comp) = (0.0, 0.0);
    for v in values {
        let d = v - mean;
        ss += d * d;
        comp += d;
    }
    let var = (ss - comp * comp / n as f64) / (n - 1) as f64;
    (mean, var.max(0.0).sqrt())
}

/// `(v - center)/scale` elementwise.
pub fn standardize(values: &[f64], center: f64, scale: f64) -> Result<Vec<f64>> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::ZeroScale);
    }
    Ok(values.iter().map(|v| (v - center) / scale).collect())
}

/// Standardise with the sample mean and sample standard deviation.
pub fn standardize_empirical(values: &[f64]) -> Result<Vec<f64>> {
    let (mean, sd) = mean_sd(values);
    let spread = values.iter().fold(0.0f64, |m, v| m.max((v - mean).abs()));
    if values.len() < 2 || spread <= 1e-14 * mean.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroScale);
    }
    standardize(values, mean, sd)
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `sup_x |F_n(x) - Φ(x)|`.
pub fn ks_statistic_normal(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = standard_normal_cdf(x);
            let above = (i + 1) as f64 / n - cdf;
            let below = cdf - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges slowly here; Q is 1 to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic critical value of the KS statistic: `λ_α/√n` with `Q(λ_α) = α`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.2, 5.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

pub fn skewness(values: &[f64]) -> f64 {
    let (m2, m3, _) = central_moments(values);
    m3 / m2.powf(1.5)
}

pub fn excess_kurtosis(values: &[f64]) -> f64 {
    let (m2, _, m4) = central_moments(values);
    m4 / (m2 * m2) - 3.0
}

fn central_moments(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityDiagnostics {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_statistic: f64,
    /// Asymptotic critical value at significance 0.01.
    pub ks_critical: f64,
    pub ks_pass_at_1pct: bool,
}

/// Moment statistics and the KS distance to `N(0, 1)` for already
/// standardised values.
pub fn normality_diagnostics(standardized: &[f64]) -> Result<NormalityDiagnostics> {
    if standardized.len() < MIN_DIAGNOSTIC_SAMPLE {
        return Err(Error::Config(format!(
            "normality diagnostics need at least {MIN_DIAGNOSTIC_SAMPLE} values, got {}",
            standardized.len()
        )));
    }
    let ks = ks_statistic_normal(standardized);
    let critical = ks_critical_value(standardized.len(), 0.01);
    Ok(NormalityDiagnostics {
        skewness: skewness(standardized),
        excess_kurtosis: excess_kurtosis(standardized),
        ks_statistic: ks,
        ks_critical: critical,
        ks_pass_at_1pct: ks <= critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn standardized_has_zero_mean_unit_sd() {
        let v = [3.0, 1.5, 9.25, -4.0, 0.5];
        let z = standardize_empirical(&v).unwrap();
        let (m, s) = mean_sd(&z);
        assert!(m.abs() < 1e-12 && (s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn standardize_is_affine_invariant() {
        let v = [3.0, 1.5, 9.25, -4.0, 0.5];
        let w: Vec<f64> = v.iter().map(|x| 2.5 * x - 7.0).collect();
        let a = standardize_empirical(&v).unwrap();
        let b = standardize_empirical(&w).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_input_has_zero_scale() {
        assert!(matches!(
            standardize_empirical(&[2.0; 10]),
            Err(Error::ZeroScale)
        ));
        assert!(matches!(
            standardize(&[1.0], 0.0, 0.0),
            Err(Error::ZeroScale)
        ));
    }

    #[test]
    fn kolmogorov_quantile() {
        // Standard table value λ_0.01 = 1.6276.
        let c = ks_critical_value(1, 0.01);
        assert!((c - 1.62762).abs() < 1e-4, "{c}");
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-15);
        let d = standard_normal_cdf(1.959963984540054) - 0.975;
        assert!(d.abs() < 1e-10, "{d:e}");
    }

    #[test]
    fn alternating_sequence_fails_ks() {
        let v: Vec<f64> = (0..500)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let z = standardize_empirical(&v).unwrap();
        assert!(!normality_diagnostics(&z).unwrap().ks_pass_at_1pct);
    }

    #[test]
    fn normal_samples_pass_ks_calibration() {
        // 100 seeds of 500 standard normal draws each.
        let passes = (0..100u64)
            .filter(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let v: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
                let z = standardize_empirical(&v).unwrap();
                normality_diagnostics(&z).unwrap().ks_pass_at_1pct
            })
            .count();
        assert!(passes >= 95, "{passes}");
    }

    #[test]
    fn moments_of_symmetric_sample() {
        let v = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert!(skewness(&v).abs() < 1e-15);
        // m2 = 2, m4 = 34/5 -> 6.8/4 - 3 = -1.3
        assert!((excess_kurtosis(&v) + 1.3).abs() < 1e-12);
    }

    #[test]
    fn too_few_values() {
        assert!(normality_diagnostics(&[0.0; 10]).is_err());
    }
}
