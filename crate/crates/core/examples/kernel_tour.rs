//! The deconvolution kernel w_r for growing noise-to-bandwidth ratios r,
//! next to the plain kernel and its Fourier transform.
//!
//! cargo run --release --example kernel_tour

use deconv::deconvolver::max_supported_ratio;
use deconv::prelude::*;

fn main() -> Result<()> {
    let k = KernelSpec::FanOrder3;
    let (a, alpha) = k.edge_params()?;
    println!(
        "{}: A = {a}, alpha = {alpha}, w(0) = {:.6}",
        k.name(),
        k.spatial(0.0)
    );
    println!(
        "phi_w at 0, 0.5, 0.9: {:.4} {:.4} {:.4}",
        k.phi(0.0),
        k.phi(0.5),
        k.phi(0.9)
    );

    let us = [0.0, 1.0, 2.0, 5.0, 10.0];
    print!("{:>6}", "r");
    for u in us {
        print!(" {:>12}", format!("u={u}"));
    }
    println!();
    for r in [0.0, 0.5, 1.0, 2.0, 4.0] {
        print!("{r:>6}");
        for u in us {
            print!(" {:>12.5e}", compute_wr(&k, &ErrorModel::Gaussian, r, u)?);
        }
        println!();
    }
    println!(
        "largest r before overflow: gaussian {:.3}, laplace {:.3e}",
        max_supported_ratio(&ErrorModel::Gaussian, 1.0),
        max_supported_ratio(&ErrorModel::Laplace, 1.0)
    );
    Ok(())
}
