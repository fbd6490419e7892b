//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use deconv::asymptotics::{asnrm2_expansion_scaled, sd_thm3_expansion_scaled};
use deconv::bandwidth::mise;
use deconv::deconvolver::sum_form_estimate;
use deconv::prelude::*;
use deconv::quadrature::{integrate, trapezoid_values};
use deconv::simulation::{replication_rng, ZETA_NOTE};
use deconv::stats::mean_sd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn criterion_1() -> Outcome {
    let k = KernelSpec::FanOrder3;
    let e = ErrorModel::Gaussian;
    let a = sd_thm3_exact(&k, &e, 1000, 0.1, 0.1).unwrap();
    let b = sd_thm3_exact(&k, &e, 10_000, 0.1, 0.07).unwrap();
    Outcome {
        pass: rel(a, 0.034477) <= 0.005 && rel(b, 0.0166319) <= 0.005,
        detail: format!("sd_thm3_exact = {a:.7} (want 0.034477), {b:.8} (want 0.0166319)"),
    }
}

fn criterion_2() -> Outcome {
    // Independent evaluation of the displayed formula:
    // 8/(√2·π) · 1 · 6 · ρ^6 · e^{1/2} / (√1000 · 0.1) at ρ = 1.
    let oracle = 8.0 / (2f64.sqrt() * PI) * 6.0 * 0.5f64.exp() / (1000f64.sqrt() * 0.1);
    let k = KernelSpec::FanOrder3;
    let e = ErrorModel::Gaussian;
    let value = sd_thm3_expansion(&k, &e, 1000, 0.1, 0.1).unwrap();
    let c = SupersmoothConstants::new(&k, &e).unwrap();
    let without_zeta = sd_thm3_expansion_scaled(&c, 1000, 0.1, 0.1)
        .unwrap()
        .mantissa;
    let grid = Grid::from_range(-1.0, 1.0, 0.5).unwrap();
    let curves = theory_curves(
        &TargetDensity::standard_normal(),
        &k,
        &e,
        &grid,
        1000,
        0.1,
        0.1,
    )
    .unwrap();
    let shown = curves.sd_thm3_expansion == Some(value)
        && curves.sd_thm3_expansion_without_zeta == Some(without_zeta)
        && ZETA_NOTE.contains("5.63279")
        && ZETA_NOTE.contains("3.41646");
    let four_digits = (value - oracle).abs() <= 0.5e-3 * oracle;
    Outcome {
        pass: four_digits && shown && (without_zeta - 3.41646).abs() < 5e-5,
        detail: format!(
            "expansion = {value:.5} (oracle {oracle:.5}), without zeta = {without_zeta:.5} (printed 3.41646), note shown: {shown}"
        ),
    }
}

fn criterion_3(mise_verified: bool) -> Outcome {
    let normal = TargetDensity::standard_normal();
    let mixture = TargetDensity::bimodal_mixture();
    let cases = [
        ("gaussian", &normal, 1000, 0.1, 0.10),
        ("mixture", &mixture, 1000, 0.1, 0.08),
        ("gaussian", &normal, 10_000, 0.1, 0.07),
        ("gaussian", &normal, 100_000, 0.1, 0.05),
        ("gaussian", &normal, 100_000, 1.0, 0.24),
        ("gaussian", &normal, 100_000, 2.0, 0.44),
    ];
    let mut pass = mise_verified;
    let mut parts = Vec::new();
    for (name, target, n, sigma, want) in cases {
        let got = select_bandwidth(
            target,
            &KernelSpec::FanOrder3,
            &ErrorModel::Gaussian,
            n,
            sigma,
            0.01,
            100,
        )
        .map(|(h, _)| h);
        let ok = matches!(got, Ok(h) if (h - want).abs() < 1e-9);
        pass &= ok;
        let shown = got
            .map(|h| format!("{h:.2}"))
            .unwrap_or_else(|e| e.to_string());
        parts.push(format!(
            "{name} n={n} σ={sigma}: {shown} (want {want:.2}){}",
            if ok { "" } else { " MISMATCH" }
        ));
    }
    if !mise_verified {
        parts.push("precondition failed: MISE oracle (criterion 8)".into());
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn fig1_report() -> SimulationReport {
    run_experiment(&Figure::Fig1.config(SEED)).unwrap()
}

fn criterion_4(report: &SimulationReport) -> Outcome {
    let worst = report
        .sample_mean
        .iter()
        .zip(&report.theory.mean)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: worst <= 0.01,
        detail: format!("max |sample mean − mean_theory| = {worst:.5} (limit 0.01)"),
    }
}

/// Exact finite-sample SD of the estimate at `x` for the fig1 configuration:
/// `n⁻¹[∫ f_X(x − hu) w_r(u)² du / h − (E f̂(x))²]`. Printed for context only.
fn fig1_finite_sample_sd(x: f64, mean: f64) -> f64 {
    let (n, h, sigma) = (1000.0, 0.1, 0.1);
    let k = KernelSpec::FanOrder3;
    let var_x = 1.0 + sigma * sigma;
    let f_x = |y: f64| (-y * y / (2.0 * var_x)).exp() / (2.0 * PI * var_x).sqrt();
    let second = integrate(
        |u| {
            let w = compute_wr(&k, &ErrorModel::Gaussian, sigma / h, u).unwrap();
            f_x(x - h * u) * w * w
        },
        -60.0,
        60.0,
        1e-9,
    ) / h;
    ((second - mean * mean) / n).sqrt()
}

fn criterion_5(report: &SimulationReport) -> Outcome {
    let i0 = report.index_of(0.0);
    let sd = report.sample_sd[i0];
    let thm1 = report.theory.sd_thm1[i0];
    let sd_ok = rel(sd, thm1) <= 0.15;
    let mut ks = Vec::new();
    let mut ks_ok = true;
    for x in [-1.0, 0.0, 1.0] {
        let d = report.diagnostics[report.index_of(x)];
        let pass = d.is_some_and(|d| d.ks_pass_at_1pct);
        ks_ok &= pass;
        ks.push(format!(
            "x={x}: D={:.4} ({})",
            d.map_or(f64::NAN, |d| d.ks_statistic),
            if pass { "pass" } else { "fail" }
        ));
    }
    let finite = fig1_finite_sample_sd(0.0, report.theory.mean[i0]);
    Outcome {
        pass: sd_ok && ks_ok,
        detail: format!(
            "sample SD(0) = {sd:.5}, sd_thm1(0) = {thm1:.5}, deviation {:.1}% (limit 15%); \
             exact finite-n SD(0) = {finite:.5}, {:.1}% below sd_thm1 in expectation; KS {}",
            100.0 * rel(sd, thm1),
            100.0 * rel(finite, thm1),
            ks.join(", ")
        ),
    }
}

fn sd_spread(report: &SimulationReport) -> (f64, f64) {
    let sds: Vec<f64> = report
        .grid
        .iter()
        .zip(&report.sample_sd)
        .filter(|(x, _)| x.abs() <= 1.0 + 1e-9)
        .map(|(_, s)| *s)
        .collect();
    let max = sds.iter().cloned().fold(f64::MIN, f64::max);
    let min = sds.iter().cloned().fold(f64::MAX, f64::min);
    let mean = sds.iter().sum::<f64>() / sds.len() as f64;
    ((max - min) / mean, report.sample_sd[report.index_of(0.0)])
}

fn regime_properties(normal: &SimulationReport, mixture: &SimulationReport) -> (bool, String) {
    let (spread, sd_normal) = sd_spread(normal);
    let (_, sd_mixture) = sd_spread(mixture);
    let gap = rel(sd_mixture, sd_normal);
    (
        spread < 0.25 && gap <= 0.20,
        format!("SD spread on [-1,1] = {spread:.3} (limit 0.25), mixture vs normal SD(0) gap = {:.1}% (limit 20%)", 100.0 * gap),
    )
}

fn criterion_6() -> Outcome {
    let full7 = run_experiment(&Figure::Fig7.config(SEED)).unwrap();
    let full8 = run_experiment(&Figure::Fig8.config(SEED)).unwrap();
    let (full_ok, full_detail) = regime_properties(&full7, &full8);

    let n = 10_000;
    let (h, _) = select_bandwidth(
        &TargetDensity::standard_normal(),
        &KernelSpec::FanOrder3,
        &ErrorModel::Gaussian,
        n,
        2.0,
        0.01,
        100,
    )
    .unwrap();
    let scaled = |target| {
        let mut cfg = ExperimentConfig::new(target, ErrorModel::Gaussian, n, 2.0, h);
        cfg.seed = SEED;
        run_experiment(&cfg).unwrap()
    };
    let small7 = scaled(TargetDensity::standard_normal());
    let small8 = scaled(TargetDensity::bimodal_mixture());
    let (small_ok, small_detail) = regime_properties(&small7, &small8);
    Outcome {
        pass: full_ok && small_ok,
        detail: format!("n=1e5 h=0.44: {full_detail}; n=1e4 h={h:.2}: {small_detail}"),
    }
}

fn criterion_7() -> Outcome {
    let k = KernelSpec::FanOrder3;
    let e = ErrorModel::Gaussian;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    // σ = 0 against an ordinary kernel density estimate.
    let data = TargetDensity::standard_normal().sample(500, &mut rng);
    let h = 0.3;
    let grid = Grid::from_range(-3.0, 3.0, 0.1).unwrap();
    let est = Deconvolver::new(k.clone(), e, EstimateConfig::new(h, 0.0, grid))
        .unwrap()
        .estimate(&data)
        .unwrap();
    let kde_gap = grid
        .points()
        .iter()
        .zip(&est.values)
        .map(|(&x, v)| {
            let kde =
                data.iter().map(|&y| k.spatial((x - y) / h)).sum::<f64>() / (data.len() as f64 * h);
            (kde - v).abs()
        })
        .fold(0.0, f64::max);

    // Sum form against the Fourier form for a small sample.
    let small: Vec<f64> = data
        .iter()
        .take(50)
        .map(|y| y + 0.1 * e.sample_one(&mut rng))
        .collect();
    let sum_grid = Grid::from_range(-2.0, 2.0, 0.25).unwrap();
    let fourier = Deconvolver::new(k.clone(), e, EstimateConfig::new(0.2, 0.1, sum_grid))
        .unwrap()
        .estimate(&small)
        .unwrap();
    let direct = sum_form_estimate(&small, &sum_grid.points(), 0.2, 0.1, &k, &e).unwrap();
    let sum_gap = direct
        .iter()
        .zip(&fourier.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    // Parseval: ∫w² over the real line, by quadrature in x.
    let w2 = integrate(|x| k.spatial(x).powi(2), -200.0, 200.0, 1e-12);
    let parseval_gap = (w2 - 1024.0 / (3003.0 * PI)).abs();

    let c = SupersmoothConstants::new(&k, &e).unwrap();
    let ratios: Vec<f64> = [0.2, 0.15, 0.1]
        .iter()
        .map(|&rho| {
            let exact = asnrm2_exact(&k, &c, rho).unwrap();
            let expansion = asnrm2_expansion_scaled(&c, rho).unwrap();
            exact.ratio(&expansion)
        })
        .collect();
    let monotone = (ratios[1] - 1.0).abs() < (ratios[0] - 1.0).abs()
        && (ratios[2] - 1.0).abs() < (ratios[1] - 1.0).abs();

    Outcome {
        pass: kde_gap <= 1e-6 && sum_gap <= 1e-6 && parseval_gap <= 1e-6 && monotone,
        detail: format!(
            "σ=0 vs KDE {kde_gap:.1e}; sum vs Fourier (n=50) {sum_gap:.1e}; Parseval gap {parseval_gap:.1e}; \
             asnrm2 exact/expansion at ρ=0.2,0.15,0.1 = {:.4}, {:.4}, {:.4}",
            ratios[0], ratios[1], ratios[2]
        ),
    }
}

fn criterion_8() -> Outcome {
    let (n, sigma, h, reps) = (200, 0.1, 0.15, 200);
    let target = TargetDensity::standard_normal();
    let error = ErrorModel::Gaussian;
    let closed = mise(&target, &KernelSpec::FanOrder3, &error, n, sigma, h).unwrap();

    let grid = Grid::from_range(-8.0, 8.0, 0.01).unwrap();
    let config = EstimateConfig::new(h, sigma, grid).with_ecf(EcfMethod::Exact);
    let deconvolver = Deconvolver::new(KernelSpec::FanOrder3, error, config).unwrap();
    let truth: Vec<f64> = grid.points().iter().map(|&x| target.pdf(x)).collect();
    let ise: Vec<f64> = (0..reps)
        .map(|j| {
            let mut rng = replication_rng(SEED, j as u64);
            let y = target.sample(n, &mut rng);
            let z = error.sample(n, &mut rng);
            let x: Vec<f64> = y.iter().zip(&z).map(|(y, z)| y + sigma * z).collect();
            let est = deconvolver.estimate(&x).unwrap();
            let sq: Vec<f64> = est
                .values
                .iter()
                .zip(&truth)
                .map(|(a, b)| (a - b).powi(2))
                .collect();
            trapezoid_values(&sq, grid.step())
        })
        .collect();
    let (mean, sd) = mean_sd(&ise);
    let se = sd / (reps as f64).sqrt();
    let z = (mean - closed).abs() / se;
    Outcome {
        pass: z <= 3.0,
        detail: format!("closed-form MISE = {closed:.6}, Monte Carlo mean ISE = {mean:.6} ± {se:.6} (|z| = {z:.2}, limit 3)"),
    }
}

fn report(id: u32, title: &str, outcome: &Outcome) -> bool {
    println!(
        "criterion {id} [{}] {title}: {}",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.detail
    );
    outcome.pass
}

fn main() -> ExitCode {
    // libtest-style filter arguments are accepted and ignored.
    let c8 = criterion_8();
    let fig1 = fig1_report();
    let results = [
        report(1, "exact-integral supersmooth SD scalars", &criterion_1()),
        report(2, "expansion-form discrepancy documented", &criterion_2()),
        report(3, "bandwidth table", &criterion_3(c8.pass)),
        report(4, "fig1 Monte Carlo mean", &criterion_4(&fig1)),
        report(5, "fig1 Monte Carlo SD and CLT", &criterion_5(&fig1)),
        report(6, "supersmooth regime properties", &criterion_6()),
        report(7, "reduction and consistency properties", &criterion_7()),
        report(8, "MISE oracle equivalence", &c8),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
