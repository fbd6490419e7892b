//! Command-line front end.
//!
//! Every option can come from a flag or from a `key=value` config file
//! (`--config FILE`); flags win. Each run writes `manifest.txt` into the
//! output directory holding the fully resolved configuration, so
//! `deconv <command> --config DIR/manifest.txt` replays it.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numeric regime
//! (`σ/h` overflows), 4 MISE minimum on the bandwidth-grid boundary.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::theory_curves;
use crate::bandwidth::{mise_curve, select_bandwidth, DEFAULT_GRID_SIZE, DEFAULT_STEP};
use crate::deconvolver::{
    Deconvolver, EcfMethod, EstimateConfig, Grid, DEFAULT_BINS, DEFAULT_NODES,
};
use crate::densities::{ErrorModel, TargetDensity};
use crate::kernels::KernelSpec;
use crate::simulation::{
    regime_classifier, run_experiment, BandwidthChoice, ExperimentConfig, Figure, ZETA_NOTE,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Decimal with 9 significant digits; scientific notation outside
/// `[1e-5, 1e15)`. Trailing zeros are dropped.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Overflow { .. } | Error::ExponentOverflow { .. } => EXIT_NUMERIC,
        Error::BoundaryMinimum { .. } => EXIT_BOUNDARY,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "deconv",
    version,
    about = "Deconvolution kernel density estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the density of Y from a file of contaminated observations.
    Estimate {
        /// One observation per line.
        data: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Theoretical mean and standard-deviation curves.
    Theory {
        /// Also write the target pdf on the grid.
        #[arg(long)]
        pdf: bool,
        #[command(flatten)]
        opts: Opts,
    },
    /// Exact MISE over the bandwidth grid and its minimiser.
    Mise {
        /// Grid size K of `h = step·k`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Monte Carlo experiment.
    Simulate {
        #[command(flatten)]
        opts: Opts,
    },
    /// Monte Carlo experiment for one of the captioned configurations.
    Reproduce {
        /// fig1, fig3, fig4, fig5, fig6, fig7 or fig8.
        figure: Option<String>,
        #[command(flatten)]
        opts: Opts,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Estimate { .. } => "estimate",
            Command::Theory { .. } => "theory",
            Command::Mise { .. } => "mise",
            Command::Simulate { .. } => "simulate",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Opts {
    /// key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// gaussian, gaussian:MEAN,VAR, mixture or mixture:M1,M2,VAR,P
    #[arg(long)]
    pub target: Option<String>,
    /// gaussian or laplace
    #[arg(long)]
    pub error: Option<String>,
    /// fan-order-3 or sinc
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Bandwidth, or `auto` for the exact-MISE minimiser.
    #[arg(long)]
    pub h: Option<String>,
    /// lo:hi:mesh
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Quadrature nodes on [0, 1/h].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Bins for the binned ECF; 0 uses the exact ECF.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Clip negative estimates and renormalise.
    #[arg(long)]
    pub clip: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const KNOWN_KEYS: &[&str] = &[
    "target", "error", "kernel", "n", "sigma", "h", "grid", "reps", "seed", "threads", "nodes",
    "bins", "clip", "out", "data", "pdf", "k", "step", "figure",
];

/// Parses `key=value` lines; `#` starts a comment line.
pub fn parse_config_text(text: &str, origin: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Input {
                path: origin.into(),
                message: format!("line {}: expected key=value", i + 1),
            });
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Input {
                path: origin.into(),
                message: format!("line {}: unknown key `{key}`", i + 1),
            });
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Observations, one per line. Blank lines and `#` comments are skipped.
pub fn read_data_file(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut data = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Input {
            path: path.display().to_string(),
            message: format!("line {}: not a number: `{line}`", i + 1),
        })?;
        if !v.is_finite() {
            return Err(Error::Input {
                path: path.display().to_string(),
                message: format!("line {}: non-finite value", i + 1),
            });
        }
        data.push(v);
    }
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(data)
}

/// `gaussian`, `gaussian:m,v`, `mixture` or `mixture:m1,m2,v,p`.
pub fn parse_target(spec: &str) -> Result<TargetDensity> {
    let (kind, params) = match spec.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (spec, None),
    };
    let nums = |p: &str| -> Result<Vec<f64>> {
        p.split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number `{x}` in target `{spec}`")))
            })
            .collect()
    };
    match (kind, params) {
        ("gaussian", None) => Ok(TargetDensity::standard_normal()),
        ("mixture", None) => Ok(TargetDensity::bimodal_mixture()),
        ("gaussian", Some(p)) => match nums(p)?[..] {
            [m, v] => TargetDensity::gaussian(m, v),
            _ => Err(Error::Config(format!(
                "target `{spec}`: expected gaussian:MEAN,VAR"
            ))),
        },
        ("mixture", Some(p)) => match nums(p)?[..] {
            [m1, m2, v, w] => TargetDensity::mixture(m1, m2, v, w),
            _ => Err(Error::Config(format!(
                "target `{spec}`: expected mixture:M1,M2,VAR,P"
            ))),
        },
        _ => Err(Error::Config(format!("unknown target `{spec}`"))),
    }
}

/// Fully resolved options of one run.
#[derive(Clone, Debug)]
struct Resolved {
    map: BTreeMap<String, String>,
}

impl Resolved {
    fn new(opts: &Opts, extra: &[(&str, Option<String>)]) -> Result<Self> {
        let mut map = match &opts.config {
            Some(path) => parse_config_text(&read_to_string(path)?, &path.display().to_string())?,
            None => BTreeMap::new(),
        };
        let flags: [(&str, Option<String>); 13] = [
            ("target", opts.target.clone()),
            ("error", opts.error.clone()),
            ("kernel", opts.kernel.clone()),
            ("n", opts.n.map(|v| v.to_string())),
            ("sigma", opts.sigma.map(|v| v.to_string())),
            ("h", opts.h.clone()),
            ("grid", opts.grid.clone()),
            ("reps", opts.reps.map(|v| v.to_string())),
            ("seed", opts.seed.map(|v| v.to_string())),
            ("threads", opts.threads.map(|v| v.to_string())),
            ("nodes", opts.nodes.map(|v| v.to_string())),
            ("bins", opts.bins.map(|v| v.to_string())),
            ("out", opts.out.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags.into_iter().chain(extra.iter().cloned()) {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        }
        if opts.clip {
            map.insert("clip".into(), "true".into());
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn set(&mut self, key: &str, value: impl Into<String>) {
        self.map.insert(key.into(), value.into());
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`"))),
        }
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(Error::Config(format!(
                "invalid value `{v}` for `{key}` (true/false)"
            ))),
        }
    }

    fn target(&mut self) -> Result<TargetDensity> {
        let t = parse_target(self.get("target").unwrap_or("gaussian"))?;
        self.set("target", t.name());
        Ok(t)
    }

    fn error(&mut self) -> Result<ErrorModel> {
        let e = ErrorModel::from_name(self.get("error").unwrap_or("gaussian"))?;
        self.set("error", e.name());
        Ok(e)
    }

    fn kernel(&mut self) -> Result<KernelSpec> {
        let k = KernelSpec::from_name(self.get("kernel").unwrap_or("fan-order-3"))?;
        self.set("kernel", k.name());
        Ok(k)
    }

    fn n(&mut self) -> Result<usize> {
        let n = self.parsed("n", 1000usize)?;
        self.set("n", n.to_string());
        Ok(n)
    }

    fn sigma(&mut self) -> Result<f64> {
        let s = self.parsed("sigma", 0.1f64)?;
        self.set("sigma", s.to_string());
        Ok(s)
    }

    fn grid(&mut self) -> Result<Grid> {
        let g = match self.get("grid") {
            Some(spec) => Grid::parse(spec)?,
            None => Grid::study_default(),
        };
        self.set("grid", g.to_spec());
        Ok(g)
    }

    fn bandwidth(&self) -> Result<BandwidthChoice> {
        match self.get("h").unwrap_or("auto") {
            "auto" => Ok(BandwidthChoice::Auto),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|h| *h > 0.0 && h.is_finite())
                .map(BandwidthChoice::Fixed)
                .ok_or_else(|| {
                    Error::Config(format!("bandwidth must be positive or `auto`, got `{v}`"))
                }),
        }
    }

    /// Fixed bandwidth, selecting by exact MISE for `auto`. The resolved
    /// value is recorded.
    fn resolve_h(
        &mut self,
        target: &TargetDensity,
        kernel: &KernelSpec,
        error: &ErrorModel,
        n: usize,
        sigma: f64,
    ) -> Result<f64> {
        let h = match self.bandwidth()? {
            BandwidthChoice::Fixed(h) => h,
            BandwidthChoice::Auto => {
                let (h, _) = select_bandwidth(
                    target,
                    kernel,
                    error,
                    n,
                    sigma,
                    DEFAULT_STEP,
                    DEFAULT_GRID_SIZE,
                )?;
                eprintln!("selected h = {} by exact MISE", fmt_sig(h));
                h
            }
        };
        self.set("h", h.to_string());
        Ok(h)
    }

    fn estimation(&mut self) -> Result<(usize, EcfMethod)> {
        let nodes = self.parsed("nodes", DEFAULT_NODES)?;
        let bins = self.parsed("bins", DEFAULT_BINS)?;
        self.set("nodes", nodes.to_string());
        self.set("bins", bins.to_string());
        let ecf = if bins == 0 {
            EcfMethod::Exact
        } else {
            EcfMethod::Binned { bins }
        };
        Ok((nodes, ecf))
    }

    fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.get("out").unwrap_or("."))
    }
}

struct Outcome {
    outputs: Vec<PathBuf>,
}

fn write_output(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    outputs.push(path);
    Ok(())
}

fn write_manifest(
    subcommand: &str,
    cfg: &Resolved,
    outputs: &[PathBuf],
    status: i32,
) -> Result<()> {
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut text = String::from("# deconv run manifest\n");
    let _ = writeln!(text, "# subcommand: {subcommand}");
    let _ = writeln!(text, "# exit_status: {status}");
    if let Some(data) = cfg.get("data") {
        let _ = writeln!(text, "# input: {data}");
    }
    for out in outputs {
        let _ = writeln!(text, "# output: {}", out.display());
    }
    for (k, v) in &cfg.map {
        // Worker count never changes results.
        if k != "threads" {
            let _ = writeln!(text, "{k}={v}");
        }
    }
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

fn cmd_estimate(cfg: &mut Resolved) -> Result<Outcome> {
    let path = cfg
        .get("data")
        .map(PathBuf::from)
        .ok_or_else(|| Error::Config("estimate needs a data file".into()))?;
    let data = read_data_file(&path)?;
    let error = cfg.error()?;
    let kernel = cfg.kernel()?;
    let sigma = cfg.sigma()?;
    let grid = cfg.grid()?;
    let h = match cfg.bandwidth()? {
        BandwidthChoice::Fixed(h) => {
            cfg.set("h", h.to_string());
            h
        }
        BandwidthChoice::Auto => {
            let target = cfg.target()?;
            cfg.resolve_h(&target, &kernel, &error, data.len(), sigma)?
        }
    };
    let (nodes, ecf) = cfg.estimation()?;
    let clip = cfg.flag("clip")?;
    let mut config = EstimateConfig::new(h, sigma, grid)
        .with_nodes(nodes)
        .with_ecf(ecf);
    config.clip = clip;
    let est = Deconvolver::new(kernel, error, config)?.estimate(&data)?;

    let regime = regime_classifier(&error, sigma, h)
        .map(|r| r.label())
        .unwrap_or("n/a");
    println!(
        "n={} h={} r={} regime={}",
        data.len(),
        fmt_sig(h),
        fmt_sig(sigma / h),
        regime
    );
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    write_output(&dir, "estimate.csv", &est.to_csv(), &mut outputs)?;
    Ok(Outcome { outputs })
}

fn cmd_theory(cfg: &mut Resolved) -> Result<Outcome> {
    let target = cfg.target()?;
    let error = cfg.error()?;
    let kernel = cfg.kernel()?;
    let n = cfg.n()?;
    let sigma = cfg.sigma()?;
    let grid = cfg.grid()?;
    let h = cfg.resolve_h(&target, &kernel, &error, n, sigma)?;
    let pdf = cfg.flag("pdf")?;
    let curves = theory_curves(&target, &kernel, &error, &grid, n, h, sigma)?;

    println!(
        "n={} h={} sigma={} r={}",
        n,
        fmt_sig(h),
        fmt_sig(sigma),
        fmt_sig(sigma / h)
    );
    if let Some(v) = curves.sd_thm3_exact {
        println!("sd_thm3_exact={}", fmt_sig(v));
    }
    if curves.sd_thm3_exact.is_some() {
        let show = |v: Option<f64>| v.map(fmt_sig).unwrap_or_else(|| "overflow".into());
        println!("sd_thm3_expansion={}", show(curves.sd_thm3_expansion));
        println!(
            "sd_thm3_expansion_without_zeta={}",
            show(curves.sd_thm3_expansion_without_zeta)
        );
        println!("note: {ZETA_NOTE}");
    }

    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    write_output(&dir, "theory.csv", &curves.to_csv(), &mut outputs)?;
    if pdf {
        let mut text = String::from("x,pdf\n");
        for x in grid.points() {
            let _ = writeln!(text, "{},{}", fmt_sig(x), fmt_sig(target.pdf(x)));
        }
        write_output(&dir, "pdf.csv", &text, &mut outputs)?;
    }
    Ok(Outcome { outputs })
}

fn cmd_mise(cfg: &mut Resolved) -> Result<Outcome> {
    let target = cfg.target()?;
    let error = cfg.error()?;
    let kernel = cfg.kernel()?;
    let n = cfg.n()?;
    let sigma = cfg.sigma()?;
    let k = cfg.parsed("k", DEFAULT_GRID_SIZE)?;
    let step = cfg.parsed("step", DEFAULT_STEP)?;
    cfg.set("k", k.to_string());
    cfg.set("step", step.to_string());

    let curve = mise_curve(&target, &kernel, &error, n, sigma, step, k)?;
    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    write_output(&dir, "mise.csv", &curve.to_csv(), &mut outputs)?;
    if curve.argmin + 1 == curve.bandwidths.len() {
        return Err(Error::BoundaryMinimum {
            h: curve.best_bandwidth(),
            k,
        });
    }
    let decimals = (-step.log10()).ceil().max(0.0) as usize;
    println!("h*={:.*}", decimals, curve.best_bandwidth());
    Ok(Outcome { outputs })
}

fn experiment(cfg: &mut Resolved, base: Option<ExperimentConfig>) -> Result<Outcome> {
    let mut exp = match base {
        Some(b) => b,
        None => {
            let target = cfg.target()?;
            let error = cfg.error()?;
            ExperimentConfig::new(target, error, 1000, 0.1, 0.1)
        }
    };
    // Preset values fill in whatever the user did not override.
    if cfg.get("target").is_some() {
        exp.target = cfg.target()?;
    } else {
        cfg.set("target", exp.target.name());
    }
    if cfg.get("error").is_some() {
        exp.error = cfg.error()?;
    } else {
        cfg.set("error", exp.error.name());
    }
    exp.kernel = cfg.kernel()?;
    exp.n = cfg.parsed("n", exp.n)?;
    exp.sigma = cfg.parsed("sigma", exp.sigma)?;
    cfg.set("n", exp.n.to_string());
    cfg.set("sigma", exp.sigma.to_string());
    if cfg.get("h").is_none() {
        if let BandwidthChoice::Fixed(h) = exp.bandwidth {
            cfg.set("h", h.to_string());
        }
    }
    exp.bandwidth = BandwidthChoice::Fixed(cfg.resolve_h(
        &exp.target,
        &exp.kernel,
        &exp.error,
        exp.n,
        exp.sigma,
    )?);
    exp.grid = cfg.grid()?;
    exp.replications = cfg.parsed("reps", exp.replications)?;
    exp.seed = cfg.parsed("seed", exp.seed)?;
    cfg.set("reps", exp.replications.to_string());
    cfg.set("seed", exp.seed.to_string());
    exp.threads = match cfg.get("threads") {
        Some(_) => Some(cfg.parsed("threads", 1usize)?),
        None => None,
    };
    let (nodes, ecf) = cfg.estimation()?;
    exp.nodes = nodes;
    exp.ecf = ecf;

    let report = run_experiment(&exp)?;
    eprintln!(
        "{} replications of n={} in {:.1}s",
        exp.replications, exp.n, report.elapsed_secs
    );
    if let Some(r) = report.regime {
        println!("regime={}", r.label());
    }
    let centre = report.index_of(0.0);
    println!(
        "x={} sample_mean={} sample_sd={} sd_thm1={}",
        fmt_sig(report.grid[centre]),
        fmt_sig(report.sample_mean[centre]),
        fmt_sig(report.sample_sd[centre]),
        fmt_sig(report.theory.sd_thm1[centre])
    );
    if let Some(v) = report.theory.sd_thm3_exact {
        println!("sd_thm3_exact={}", fmt_sig(v));
    }

    let dir = cfg.out_dir();
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    write_output(&dir, "report.csv", &report.to_csv(), &mut outputs)?;
    write_output(
        &dir,
        "report.meta.json",
        &(report.metadata_json() + "\n"),
        &mut outputs,
    )?;
    Ok(Outcome { outputs })
}

fn cmd_reproduce(cfg: &mut Resolved) -> Result<Outcome> {
    let id = cfg
        .get("figure")
        .ok_or_else(|| Error::Config("reproduce needs a figure id (fig1, fig3..fig8)".into()))?
        .to_string();
    let figure = Figure::from_id(&id)?;
    let seed = cfg.parsed("seed", 0u64)?;
    experiment(cfg, Some(figure.config(seed)))
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let name = cli.command.name();
    let resolved = match &cli.command {
        Command::Estimate { data, opts } => Resolved::new(
            opts,
            &[("data", data.as_ref().map(|p| p.display().to_string()))],
        ),
        Command::Theory { pdf, opts } => {
            Resolved::new(opts, &[("pdf", pdf.then(|| "true".to_string()))])
        }
        Command::Mise { k, step, opts } => Resolved::new(
            opts,
            &[
                ("k", k.map(|v| v.to_string())),
                ("step", step.map(|v| v.to_string())),
            ],
        ),
        Command::Simulate { opts } => Resolved::new(opts, &[]),
        Command::Reproduce { figure, opts } => Resolved::new(opts, &[("figure", figure.clone())]),
    };
    let mut cfg = match resolved {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let result = match cli.command {
        Command::Estimate { .. } => cmd_estimate(&mut cfg),
        Command::Theory { .. } => cmd_theory(&mut cfg),
        Command::Mise { .. } => cmd_mise(&mut cfg),
        Command::Simulate { .. } => experiment(&mut cfg, None),
        Command::Reproduce { .. } => cmd_reproduce(&mut cfg),
    };
    let (status, outputs) = match result {
        Ok(o) => (EXIT_OK, o.outputs),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code(&e), Vec::new())
        }
    };
    if let Err(e) = write_manifest(name, &cfg, &outputs, status) {
        eprintln!("error: cannot write manifest: {e}");
        if status == EXIT_OK {
            return EXIT_USAGE;
        }
    }
    status
}
