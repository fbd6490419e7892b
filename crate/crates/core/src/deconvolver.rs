//! The deconvolution kernel density estimator
//!
//! ```text
//! f̂(x) = (1/2π) ∫ e^{-itx} φ_w(ht) φ_emp(t) / φ_k(σt) dt
//!      = n⁻¹ Σⱼ h⁻¹ w_r((x - Xⱼ)/h),        r = σ/h,
//! ```
//!
//! evaluated in the frequency domain. `φ_w` vanishes outside `[-1, 1]`, so
//! the integral is exactly truncated to `|t| ≤ 1/h` and discretised with the
//! trapezoid rule on `T` nodes per half-line. The empirical characteristic
//! function comes either from the raw data or from a linearly binned sample;
//! both the binned ECF and the final inversion onto the evaluation grid are
//! chirp-z transforms.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::chirp::ChirpZ;
use crate::densities::ErrorModel;
use crate::kernels::KernelSpec;
use crate::quadrature::integrate;
use crate::{Error, Result};

pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_BINS: usize = 16_384;
pub const MIN_NODES: usize = 256;
pub const MIN_BINS: usize = 512;

/// Largest `ln(1/|φ_k|)` accepted anywhere on the frequency range. Leaves
/// headroom below `ln(f64::MAX) ≈ 709.78` for kernel weights and sums.
pub const LOG_CEILING: f64 = 700.0;

/// Equally spaced, strictly increasing evaluation grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    start: f64,
    step: f64,
    len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(start.is_finite() && step.is_finite()) || len == 0 || (len > 1 && step <= 0.0) {
            return Err(Error::Config(format!(
                "grid needs a finite start, positive step and at least one point (start {start}, step {step}, len {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `lo, lo + mesh, …, hi`; `hi - lo` must be a whole number of meshes.
    pub fn from_range(lo: f64, hi: f64, mesh: f64) -> Result<Self> {
        if !(mesh > 0.0) || !(hi >= lo) {
            return Err(Error::Config(format!(
                "invalid grid range {lo}:{hi}:{mesh}"
            )));
        }
        let steps = (hi - lo) / mesh;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 * rounded.max(1.0) {
            return Err(Error::Config(format!(
                "grid range {lo}:{hi} is not a whole number of meshes {mesh}"
            )));
        }
        Self::new(lo, mesh, rounded as usize + 1)
    }

    /// Parses `lo:hi:mesh`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = || Error::Config(format!("grid must look like lo:hi:mesh, got `{spec}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        Self::from_range(nums[0], nums[1], nums[2])
    }

    /// The `[-3, 3]` grid with mesh 0.1 used by the simulation study.
    pub fn study_default() -> Self {
        Self {
            start: -3.0,
            step: 0.1,
            len: 61,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn point(&self, i: usize) -> f64 {
        let p = self.start + i as f64 * self.step;
        // Snap rounding residue such as -3 + 30·0.1 = 4.4e-16.
        if p.abs() < 1e-9 * self.step {
            0.0
        } else {
            p
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self {
            start: self.start + by,
            ..*self
        }
    }

    /// Index of the grid point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let i = ((x - self.start) / self.step).round();
        i.clamp(0.0, (self.len - 1) as f64) as usize
    }

    pub fn to_spec(&self) -> String {
        format!("{}:{}:{}", self.start, self.end(), self.step)
    }
}

/// Source of the empirical characteristic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcfMethod {
    /// `n⁻¹ Σ exp(itXⱼ)` over the raw observations.
    Exact,
    /// Linear binning onto `bins` equally spaced centres.
    Binned { bins: usize },
}

impl Default for EcfMethod {
    fn default() -> Self {
        EcfMethod::Binned { bins: DEFAULT_BINS }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateConfig {
    pub bandwidth: f64,
    pub sigma: f64,
    pub grid: Grid,
    /// Trapezoid nodes on `[0, 1/h]`.
    pub nodes: usize,
    pub ecf: EcfMethod,
    /// Clip negative values to zero and renormalise to unit mass on the grid.
    pub clip: bool,
}

impl EstimateConfig {
    pub fn new(bandwidth: f64, sigma: f64, grid: Grid) -> Self {
        Self {
            bandwidth,
            sigma,
            grid,
            nodes: DEFAULT_NODES,
            ecf: EcfMethod::default(),
            clip: false,
        }
    }

    pub fn with_ecf(mut self, ecf: EcfMethod) -> Self {
        self.ecf = ecf;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Config(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise scale must be >= 0, got {}",
                self.sigma
            )));
        }
        if self.nodes < MIN_NODES {
            return Err(Error::Config(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {}",
                self.nodes
            )));
        }
        if let EcfMethod::Binned { bins } = self.ecf {
            if bins < MIN_BINS {
                return Err(Error::Config(format!(
                    "binning needs at least {MIN_BINS} bins, got {bins}"
                )));
            }
        }
        Ok(())
    }
}

/// Largest `r = σ/h` for which `|φ_k(r·t)|^{-power}` stays below
/// `exp(LOG_CEILING)` on `|t| ≤ 1`.
pub fn max_supported_ratio(error: &ErrorModel, power: f64) -> f64 {
    let limit = LOG_CEILING / power;
    match error {
        ErrorModel::Gaussian => (2.0 * limit).sqrt(),
        ErrorModel::Laplace => (2.0 * limit.exp_m1()).sqrt(),
    }
}

/// Fails with [`Error::Overflow`] when `1/|φ_k(r t)|^power` leaves the
/// supported range for some `|t| ≤ 1`.
pub fn check_ratio(error: &ErrorModel, r: f64, power: f64) -> Result<()> {
    if !r.is_finite() || power * error.log_inv_cf(r) > LOG_CEILING {
        return Err(Error::Overflow {
            r,
            max_r: max_supported_ratio(error, power),
        });
    }
    Ok(())
}

/// `w_r(u) = (1/2π)∫ e^{-itu} φ_w(t)/φ_k(rt) dt`, folded onto `[0, 1]`.
pub fn compute_wr(kernel: &KernelSpec, error: &ErrorModel, r: f64, u: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("ratio r must be >= 0, got {r}")));
    }
    check_ratio(error, r, 1.0)?;
    let v = integrate(
        |t| (t * u).cos() * kernel.phi(t) * error.log_inv_cf(r * t).exp(),
        0.0,
        1.0,
        1e-13,
    );
    Ok(v / PI)
}

/// Linearly binned observations.
#[derive(Clone, Debug, PartialEq)]
pub struct BinnedSample {
    /// Centre of the first bin.
    pub start: f64,
    /// Distance between neighbouring centres.
    pub width: f64,
    pub weights: Vec<f64>,
    pub n: usize,
}

/// Splits each observation's unit mass between its two neighbouring bin
/// centres in proportion to proximity. Centres span `[min - h, max + h]`.
pub fn bin_data(data: &[f64], bins: usize, h: f64) -> Result<BinnedSample> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if bins < 2 {
        return Err(Error::Config("binning needs at least two bins".into()));
    }
    let (min, max) = data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if !(min.is_finite() && max.is_finite()) {
        return Err(Error::Domain("observations must be finite".into()));
    }
    let start = min - h;
    let width = (max + h - start) / (bins - 1) as f64;
    let mut weights = vec![0.0; bins];
    for &x in data {
        let pos = (x - start) / width;
        let j = (pos.floor() as usize).min(bins - 2);
        let frac = pos - j as f64;
        weights[j] += 1.0 - frac;
        weights[j + 1] += frac;
    }
    Ok(BinnedSample {
        start,
        width,
        weights,
        n: data.len(),
    })
}

impl BinnedSample {
    pub fn centers(&self) -> Vec<f64> {
        (0..self.weights.len())
            .map(|j| self.start + j as f64 * self.width)
            .collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ wⱼ exp(it cⱼ) / n` by direct summation.
    pub fn ecf(&self, t: f64) -> Complex64 {
        let s: Complex64 = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(j, w)| Complex64::from_polar(*w, t * (self.start + j as f64 * self.width)))
            .sum();
        s / self.n as f64
    }

    /// The ECF at `t₀ + k·Δt`, `k = 0..count`, via one chirp-z transform.
    pub fn ecf_on_lattice(&self, t0: f64, dt: f64, count: usize) -> Vec<Complex64> {
        let input: Vec<Complex64> = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, w)| Complex64::from_polar(*w, t0 * j as f64 * self.width))
            .collect();
        let plan = ChirpZ::new(input.len(), count, dt * self.width);
        let sums = plan.apply(&input);
        let inv_n = 1.0 / self.n as f64;
        sums.into_iter()
            .enumerate()
            .map(|(k, s)| s * Complex64::from_polar(inv_n, (t0 + k as f64 * dt) * self.start))
            .collect()
    }
}

/// `n⁻¹ Σ exp(itXⱼ)` over raw data.
pub fn ecf_exact(data: &[f64], t: f64) -> Complex64 {
    let s: Complex64 = data.iter().map(|x| Complex64::from_polar(1.0, t * x)).sum();
    s / data.len() as f64
}

/// Estimated density values on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub bandwidth: f64,
    pub sigma: f64,
    pub n: usize,
    pub kernel: String,
    /// Largest `|Im|` left over after inversion.
    pub max_imag_residual: f64,
}

impl DensityEstimate {
    /// `max |Im| / max |Re|`.
    pub fn relative_imag_residual(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            self.max_imag_residual
        } else {
            self.max_imag_residual / scale
        }
    }

    /// Trapezoid mass over the grid.
    pub fn mass(&self) -> f64 {
        if self.grid.len() < 2 {
            return 0.0;
        }
        crate::quadrature::trapezoid_values(&self.values, self.grid[1] - self.grid[0])
    }

    /// Sets negative values to zero and rescales to unit trapezoid mass.
    pub fn clip_and_renormalize(&mut self) {
        for v in &mut self.values {
            *v = v.max(0.0);
        }
        let mass = self.mass();
        if mass > 0.0 {
            for v in &mut self.values {
                *v /= mass;
            }
        }
    }

    /// CSV with header `x,fhat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,fhat\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(
                out,
                "{},{}",
                crate::cli::fmt_sig(*x),
                crate::cli::fmt_sig(*v)
            );
        }
        out
    }
}

/// An estimator with its frequency plan prepared once and reused across
/// samples.
#[derive(Clone, Debug)]
pub struct Deconvolver {
    kernel: KernelSpec,
    error: ErrorModel,
    config: EstimateConfig,
    dt: f64,
    /// `trapezoid weight · φ_w(ht)/φ_k(σt)` on `t = kΔt`, `k = 0..T`.
    filter: Vec<f64>,
    inversion: ChirpZ,
}

impl Deconvolver {
    pub fn new(kernel: KernelSpec, error: ErrorModel, config: EstimateConfig) -> Result<Self> {
        config.validate()?;
        let h = config.bandwidth;
        check_ratio(&error, config.sigma / h, 1.0)?;
        let t_max = 1.0 / h;
        let nodes = config.nodes;
        let dt = t_max / (nodes - 1) as f64;
        let filter: Vec<f64> = (0..nodes)
            .map(|k| {
                let t = k as f64 * dt;
                let trap = if k == nodes - 1 { 0.5 * dt } else { dt };
                trap * kernel.phi(h * t) * error.log_inv_cf(config.sigma * t).exp()
            })
            .collect();
        let inversion = ChirpZ::new(2 * nodes - 1, config.grid.len(), -dt * config.grid.step());
        Ok(Self {
            kernel,
            error,
            config,
            dt,
            filter,
            inversion,
        })
    }

    pub fn config(&self) -> &EstimateConfig {
        &self.config
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn error(&self) -> &ErrorModel {
        &self.error
    }

    /// ECF on the non-negative frequency nodes `kΔt`.
    fn half_ecf(&self, data: &[f64]) -> Result<Vec<Complex64>> {
        let nodes = self.config.nodes;
        match self.config.ecf {
            EcfMethod::Exact => Ok((0..nodes)
                .map(|k| ecf_exact(data, k as f64 * self.dt))
                .collect()),
            EcfMethod::Binned { bins } => {
                let binned = bin_data(data, bins, self.config.bandwidth)?;
                Ok(binned.ecf_on_lattice(0.0, self.dt, nodes))
            }
        }
    }

    pub fn estimate(&self, data: &[f64]) -> Result<DensityEstimate> {
        if data.is_empty() {
            return Err(Error::EmptyData);
        }
        let ecf = self.half_ecf(data)?;
        let (values, imag) = self.invert(&ecf);
        let mut est = DensityEstimate {
            grid: self.config.grid.points(),
            values,
            bandwidth: self.config.bandwidth,
            sigma: self.config.sigma,
            n: data.len(),
            kernel: self.kernel.name(),
            max_imag_residual: imag,
        };
        if self.config.clip {
            est.clip_and_renormalize();
        }
        Ok(est)
    }

    /// `(1/2π) Σ_k c_k ψ(t_k) e^{-i t_k x}` over the symmetric node set, with
    /// `ψ(-t) = conj ψ(t)`.
    fn invert(&self, half_ecf: &[Complex64]) -> (Vec<f64>, f64) {
        let nodes = self.config.nodes;
        let total = 2 * nodes - 1;
        let t_first = -((nodes - 1) as f64) * self.dt;
        let x0 = self.config.grid.start();
        let mut input = Vec::with_capacity(total);
        for idx in 0..total {
            let k = idx as isize - (nodes as isize - 1);
            let (psi, t) = if k >= 0 {
                let k = k as usize;
                (half_ecf[k] * self.filter[k], k as f64 * self.dt)
            } else {
                let k = (-k) as usize;
                (half_ecf[k].conj() * self.filter[k], -(k as f64) * self.dt)
            };
            input.push(psi * Complex64::from_polar(1.0, -t * x0));
        }
        let sums = self.inversion.apply(&input);
        let step = self.config.grid.step();
        let mut max_imag = 0.0f64;
        let values = sums
            .into_iter()
            .enumerate()
            .map(|(g, s)| {
                let v = s * Complex64::from_polar(1.0 / (2.0 * PI), -t_first * g as f64 * step);
                max_imag = max_imag.max(v.im.abs());
                v.re
            })
            .collect();
        (values, max_imag)
    }
}

/// Convenience wrapper: plan and run a single estimate.
pub fn estimate(
    data: &[f64],
    config: &EstimateConfig,
    kernel: &KernelSpec,
    error: &ErrorModel,
) -> Result<DensityEstimate> {
    Deconvolver::new(kernel.clone(), *error, config.clone())?.estimate(data)
}

/// Direct summation `n⁻¹ Σ h⁻¹ w_r((x - Xⱼ)/h)` with `w_r` by quadrature.
/// Quadratic in `n × grid`; meant for small samples and cross-checks.
pub fn sum_form_estimate(
    data: &[f64],
    grid: &[f64],
    h: f64,
    sigma: f64,
    kernel: &KernelSpec,
    error: &ErrorModel,
) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let r = sigma / h;
    let n = data.len() as f64;
    grid.iter()
        .map(|&x| {
            let mut s = 0.0;
            for &xj in data {
                s += compute_wr(kernel, error, r, (x - xj) / h)?;
            }
            Ok(s / (n * h))
        })
        .collect()
}
