//! Exact MISE over the bandwidth grid h = 0.01 k and its minimiser.
//!
//! cargo run --release --example bandwidth_selection

use deconv::bandwidth::mise_curve;
use deconv::prelude::*;

fn main() -> Result<()> {
    let kernel = KernelSpec::FanOrder3;
    let error = ErrorModel::Gaussian;
    let cases = [
        (TargetDensity::standard_normal(), 1000, 0.1),
        (TargetDensity::bimodal_mixture(), 1000, 0.1),
        (TargetDensity::standard_normal(), 10_000, 0.1),
        (TargetDensity::standard_normal(), 100_000, 1.0),
        (TargetDensity::standard_normal(), 100_000, 2.0),
    ];
    for (target, n, sigma) in cases {
        let (h, curve) = select_bandwidth(&target, &kernel, &error, n, sigma, 0.01, 100)?;
        let i = curve.argmin;
        println!(
            "{:<22} n = {n:>6} sigma = {sigma:<4} h* = {h:.2}  MISE = {:.3e} (variance {:.3e}, bias^2 {:.3e})",
            target.name(),
            curve.mise[i],
            curve.variance[i],
            curve.bias_sq[i]
        );
    }

    // Too short a grid leaves the minimum on the boundary.
    let short = mise_curve(
        &TargetDensity::standard_normal(),
        &kernel,
        &error,
        1000,
        0.1,
        0.01,
        5,
    )?;
    println!(
        "short grid ends at h = {:.2}, argmin index {}",
        short.best_bandwidth(),
        short.argmin
    );
    match select_bandwidth(
        &TargetDensity::standard_normal(),
        &kernel,
        &error,
        1000,
        0.1,
        0.01,
        5,
    ) {
        Err(e) => println!("select_bandwidth: {e}"),
        Ok((h, _)) => println!("unexpected interior minimum {h}"),
    }
    Ok(())
}
