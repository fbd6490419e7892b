//! Theoretical mean and standard deviation of the estimator for the
//! bounded-ratio and supersmooth regimes, plus the ordinary-smooth
//! (Laplace) predictor.
//!
//! cargo run --release --example theory_curves

use deconv::prelude::*;

fn main() -> Result<()> {
    let target = TargetDensity::standard_normal();
    let kernel = KernelSpec::FanOrder3;
    let grid = Grid::from_range(-2.0, 2.0, 1.0)?;

    for (n, sigma, h) in [(1000, 0.1, 0.1), (10_000, 0.1, 0.07), (100_000, 2.0, 0.44)] {
        let c = theory_curves(&target, &kernel, &ErrorModel::Gaussian, &grid, n, h, sigma)?;
        println!("gaussian error, n = {n}, sigma = {sigma}, h = {h}");
        println!(
            "  sd_thm3_exact = {:.6}",
            c.sd_thm3_exact.unwrap_or(f64::NAN)
        );
        println!(
            "  sd_thm3_expansion = {:.6e} (without zeta {:.6e})",
            c.sd_thm3_expansion.unwrap_or(f64::INFINITY),
            c.sd_thm3_expansion_without_zeta.unwrap_or(f64::NAN)
        );
        for i in 0..c.grid.len() {
            println!(
                "  x = {:>4}: mean {:.5}, sd_thm1 {:.5}",
                c.grid[i], c.mean[i], c.sd_thm1[i]
            );
        }
    }

    let c = theory_curves(
        &target,
        &kernel,
        &ErrorModel::Laplace,
        &grid,
        1000,
        0.2,
        0.3,
    )?;
    println!("laplace error, n = 1000, sigma = 0.3, h = 0.2");
    print!("{}", c.to_csv());
    Ok(())
}
