//! Bluestein chirp-z transform for sums of the form
//! `y[k] = Σ_j x[j]·exp(i·θ·j·k)` with an arbitrary real `θ`.
//!
//! Both the binned empirical characteristic function and the inversion onto
//! an evaluation grid have this shape; the product of the two spacings is
//! never a clean `2π/N`, so a plain FFT does not apply.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// A planned chirp-z transform for fixed input length, output length and `θ`.
#[derive(Clone)]
pub struct ChirpZ {
    input_len: usize,
    output_len: usize,
    theta: f64,
    fft_len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// FFT of the conjugate chirp `exp(-iθm²/2)` laid out for circular convolution.
    kernel_hat: Vec<Complex64>,
}

impl std::fmt::Debug for ChirpZ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChirpZ")
            .field("input_len", &self.input_len)
            .field("output_len", &self.output_len)
            .field("theta", &self.theta)
            .field("fft_len", &self.fft_len)
            .finish()
    }
}

fn chirp(theta: f64, m: usize) -> Complex64 {
    // m² is exact in f64 for every length used here.
    let mf = m as f64;
    Complex64::from_polar(1.0, 0.5 * theta * mf * mf)
}

impl ChirpZ {
    pub fn new(input_len: usize, output_len: usize, theta: f64) -> Self {
        assert!(
            input_len > 0 && output_len > 0,
            "chirp-z lengths must be positive"
        );
        let fft_len = (input_len + output_len - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);

        let mut kernel = vec![Complex64::new(0.0, 0.0); fft_len];
        for (m, slot) in kernel.iter_mut().enumerate().take(output_len) {
            *slot = chirp(theta, m).conj();
        }
        for m in 1..input_len {
            kernel[fft_len - m] = chirp(theta, m).conj();
        }
        forward.process(&mut kernel);

        Self {
            input_len,
            output_len,
            theta,
            fft_len,
            forward,
            inverse,
            kernel_hat: kernel,
        }
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn output_len(&self) -> usize {
        self.output_len
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Evaluate `y[k] = Σ_j x[j]·exp(iθjk)` for `k = 0..output_len`.
    pub fn apply(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.input_len, "chirp-z input length mismatch");
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_len];
        for (j, (slot, x)) in buf.iter_mut().zip(input).enumerate() {
            *slot = x * chirp(self.theta, j);
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let norm = 1.0 / self.fft_len as f64;
        (0..self.output_len)
            .map(|k| buf[k] * chirp(self.theta, k) * norm)
            .collect()
    }
}

/// Direct `O(JK)` evaluation of the same sum; the reference for tests.
pub fn direct_sum(input: &[Complex64], output_len: usize, theta: f64) -> Vec<Complex64> {
    (0..output_len)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(j, x)| x * Complex64::from_polar(1.0, theta * j as f64 * k as f64))
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn matches_direct_sum() {
        let input: Vec<Complex64> = (0..37)
            .map(|j| Complex64::new((j as f64 * 0.3).sin(), (j as f64 * 0.11).cos()))
            .collect();
        for theta in [0.013, -0.7, 2.1, 1e-4] {
            let plan = ChirpZ::new(input.len(), 53, theta);
            let fast = plan.apply(&input);
            let slow = direct_sum(&input, 53, theta);
            assert!(max_err(&fast, &slow) < 1e-11, "theta={theta}");
        }
    }

    #[test]
    fn reduces_to_dft() {
        let n = 16;
        let input: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64, 0.0)).collect();
        let theta = -2.0 * std::f64::consts::PI / n as f64;
        let fast = ChirpZ::new(n, n, theta).apply(&input);
        let mut reference = input.clone();
        FftPlanner::new()
            .plan_fft_forward(n)
            .process(&mut reference);
        assert!(max_err(&fast, &reference) < 1e-10);
    }

    #[test]
    fn single_output() {
        let input = vec![Complex64::new(1.0, 0.0); 5];
        let out = ChirpZ::new(5, 1, 0.4).apply(&input);
        assert!((out[0] - Complex64::new(5.0, 0.0)).norm() < 1e-12);
    }
}
