//! Estimate a bimodal density from observations contaminated by Gaussian
//! noise and compare with the truth.
//!
//! cargo run --release --example estimate_density

use deconv::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let target = TargetDensity::bimodal_mixture();
    let error = ErrorModel::Gaussian;
    let (n, sigma) = (2000, 0.3);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let y = target.sample(n, &mut rng);
    let z = error.sample(n, &mut rng);
    let x: Vec<f64> = y.iter().zip(&z).map(|(y, z)| y + sigma * z).collect();

    let (h, _) = select_bandwidth(&target, &KernelSpec::FanOrder3, &error, n, sigma, 0.01, 100)?;
    println!(
        "n = {n}, sigma = {sigma}, NSR = {:.1}%, h = {h:.2}",
        nsr(&target, sigma)?
    );

    let grid = Grid::from_range(-3.0, 3.0, 0.25)?;
    let est = Deconvolver::new(
        KernelSpec::FanOrder3,
        error,
        EstimateConfig::new(h, sigma, grid),
    )?
    .estimate(&x)?;

    println!("{:>6} {:>9} {:>9}", "x", "fhat", "f");
    for (x, v) in est.grid.iter().zip(&est.values) {
        println!("{x:>6.2} {v:>9.5} {:>9.5}", target.pdf(*x));
    }
    println!("mass on grid: {:.4}", est.mass());
    Ok(())
}
