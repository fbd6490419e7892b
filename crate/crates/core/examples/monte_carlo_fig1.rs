//! 500 replications of the low-noise configuration (standard normal target,
//! sigma^2 = 0.01, n = 1000, h = 0.1), writing report.csv and its sidecar.
//!
//! cargo run --release --example monte_carlo_fig1 [out-dir]

use deconv::prelude::*;

fn main() -> Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "fig1".into());
    let report = run_experiment(&Figure::Fig1.config(1))?;
    std::fs::create_dir_all(&out)?;
    std::fs::write(format!("{out}/report.csv"), report.to_csv())?;
    std::fs::write(format!("{out}/report.meta.json"), report.metadata_json())?;

    println!(
        "regime: {}, {:.1}s",
        report.regime.map_or("n/a", |r| r.label()),
        report.elapsed_secs
    );
    println!(
        "{:>5} {:>9} {:>9} {:>9} {:>9}",
        "x", "mean", "theory", "sd", "sd_thm1"
    );
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let i = report.index_of(x);
        println!(
            "{x:>5} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            report.sample_mean[i],
            report.theory.mean[i],
            report.sample_sd[i],
            report.theory.sd_thm1[i]
        );
    }
    println!(
        "sd_thm3_exact = {:.6}",
        report.theory.sd_thm3_exact.unwrap_or(f64::NAN)
    );
    println!("wrote {out}/report.csv");
    Ok(())
}
