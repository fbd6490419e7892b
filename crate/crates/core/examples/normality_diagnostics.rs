//! Standardised replicate values of the estimator at x = 0 in the
//! supersmooth regime (sigma = 2) and their distance from N(0, 1).
//!
//! cargo run --release --example normality_diagnostics

use deconv::prelude::*;
use deconv::stats::standardize_empirical;

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::new(
        TargetDensity::standard_normal(),
        ErrorModel::Gaussian,
        20_000,
        2.0,
        0.44,
    );
    cfg.seed = 7;
    let report = run_experiment(&cfg)?;
    println!(
        "regime: {}",
        regime_classifier(&cfg.error, cfg.sigma, 0.44)?.label()
    );

    for x in [-1.0, 0.0, 1.0] {
        let i = report.index_of(x);
        let z = standardize_empirical(&report.values[i])?;
        let d = normality_diagnostics(&z)?;
        println!(
            "x = {x:>4}: skewness {:+.3}, excess kurtosis {:+.3}, KS {:.4} (1% critical {:.4}) -> {}",
            d.skewness,
            d.excess_kurtosis,
            d.ks_statistic,
            d.ks_critical,
            if d.ks_pass_at_1pct { "normal" } else { "rejected" }
        );
    }

    // Histogram of the standardised values at x = 0.
    let z = standardize_empirical(&report.values[report.index_of(0.0)])?;
    for lo in -3..3 {
        let count = z
            .iter()
            .filter(|v| **v >= lo as f64 && **v < (lo + 1) as f64)
            .count();
        println!("[{lo:+}, {:+}) {}", lo + 1, "#".repeat(count / 5));
    }
    Ok(())
}
