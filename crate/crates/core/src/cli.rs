//! Argument parsing and dispatch for the `mlab` binary.
//!
//! Exit codes: 0 on success or a passing verdict, 1 on a failing or inconclusive
//! verdict, 2 on usage and validation errors, 3 on I/O failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::bumps::check_bumps;
use crate::conditions::{
    admissible_p, classical_marcinkiewicz_a, hormander_norm, mixed_smoothness_norm, product_sobolev_k, ConditionOptions,
    ConditionReport, IndexBox, WindowGrid,
};
use crate::error::{Error, Result};
use crate::experiments::comparison::one_sidedness;
use crate::experiments::dilation::gaussian_1d;
use crate::experiments::opnorm::wave_packets;
use crate::experiments::sharpness::dyadic_ladder;
use crate::experiments::{
    check_1d_identity, check_1d_laplacian, check_comparison, check_domination, example51_opnorm_ladder, keystone_check,
    opnorm_scan, sharpness_scan, witness_membership, Example51, ExperimentResult,
};
use crate::grid::{read_multiplier, Field, GridSpec};
use crate::operators::SmoothnessSpec;
use crate::symbol::{named, SampledSymbol, Symbol};

/// Every experiment reachable from the command line, with what it checks.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("bump-check", "partition of unity, plateau and support of the dyadic bumps"),
    ("verify lemma21", "pointwise domination of |Δ_J T_σ f| by K·[M⁽¹⁾⋯M⁽ⁿ⁾(|Δ_J^θ f|^ρ)]^{1/ρ}"),
    ("verify identity", "‖f(2ᵏ·)ψ̂‖_r ≲ ‖(I-∂²)^{γ/2} f‖_r uniformly in k"),
    ("verify laplacian", "‖(-∂²)^{γ/2}[f(2ᵏ·)ψ̂]‖_r ≲ (1+2^{k(γ-1/r)})‖(I-∂²)^{γ/2} f‖_r"),
    ("verify comparison", "product Sobolev constant K bounded by the isotropic constant with total smoothness"),
    ("verify opnorm", "lower bound ‖T_σ f‖_p/‖f‖_p over a wave-packet family"),
    ("example keystone", "numeric F_ξ⁻¹(σ f̂) against its closed form with constant √π"),
    ("example sharpness", "truncated mixed norms of F_ξ⁻¹(σ f̂) against the derived divergence rate"),
    ("example membership", "the witness lies in L^p(ℝ; L²) for β > 1/2"),
    ("example one-sidedness", "K bounded while excess ξ-smoothness grows like ℓ^{γ₁-α}"),
    ("example opnorm-ladder", "operator-norm ratio of the sharpness multiplier along a frequency-box ladder"),
];

#[derive(Parser, Debug)]
#[command(name = "mlab", version, about = "Numerical laboratory for Fourier multipliers")]
struct Cli {
    /// List the runnable experiments and exit.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the bump identities on a grid.
    BumpCheck(Shared),
    /// Evaluate a condition functional on a multiplier.
    Condition {
        #[arg(long, value_enum)]
        functional: Functional,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run one of the inequality checks.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[command(flatten)]
        shared: Shared,
    },
    /// Run one of the sharpness-example experiments.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[command(flatten)]
        shared: Shared,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    #[value(name = "K")]
    K,
    Hormander,
    #[value(name = "A")]
    A,
    Mixed,
    Admissible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Lemma21,
    Identity,
    Laplacian,
    Comparison,
    Opnorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Keystone,
    Sharpness,
    Membership,
    OneSidedness,
    OpnormLadder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestField {
    Gaussian,
    Random,
}

#[derive(Args, Debug, Clone)]
struct Shared {
    /// Grid as `n,N,L`.
    #[arg(long)]
    grid: Option<String>,
    /// Named symbol, e.g. `mikhlin:b=2` or `example51:alpha=0.3`.
    #[arg(long, conflicts_with = "sigma_file")]
    sigma: Option<String>,
    /// Sampled multiplier file (`n,N,L` header, then `re,im` lines).
    #[arg(long)]
    sigma_file: Option<PathBuf>,
    /// Per-axis smoothness, comma separated.
    #[arg(long, value_delimiter = ',')]
    gamma: Option<Vec<f64>>,
    /// Integrability exponent; `inf` allowed.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Radius ladder `lo:hi` (dyadic) or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    radii: Option<String>,
    /// Dyadic multi-index, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    j: Option<Vec<i32>>,
    /// Integer range `lo:hi` of dilation exponents.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Scales `ℓ`, comma separated.
    #[arg(long, value_delimiter = ',')]
    ells: Option<Vec<i32>>,
    /// Window samples per axis for localized pieces (or quadrature resolution for A).
    #[arg(long)]
    window: Option<usize>,
    /// Extra window resolution recorded as a refinement.
    #[arg(long)]
    refine: Option<usize>,
    /// Ambient dimension for the radial experiments.
    #[arg(long)]
    dim: Option<usize>,
    /// Gaussian width of the test function.
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, value_enum)]
    field: Option<TestField>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Where the multiplier comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSource {
    Named(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    List,
    BumpCheck,
    Condition(Functional),
    Verify(Check),
    Example(ExampleName),
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub grid: Option<GridSpec>,
    pub sigma: Option<SigmaSource>,
    pub smoothness: Option<SmoothnessSpec>,
    pub r: f64,
    pub s: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub j: Option<Vec<i32>>,
    pub k_range: Option<(i32, i32)>,
    pub ells: Option<Vec<i32>>,
    pub window: Option<usize>,
    pub refine: Option<usize>,
    pub dim: usize,
    pub width: f64,
    pub field: TestField,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// A parse failure with the exit code and text to print.
#[derive(Debug)]
pub struct UsageError {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        code: 2,
        message: format!("error: {}", message.into()),
    }
}

fn parse_grid(text: &str) -> std::result::Result<GridSpec, UsageError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid expects n,N,L, got `{text}`")));
    }
    let n = parts[0].parse().map_err(|_| usage(format!("--grid: bad dimension `{}`", parts[0])))?;
    let big_n = parts[1].parse().map_err(|_| usage(format!("--grid: bad sample count `{}`", parts[1])))?;
    let l = parts[2].parse().map_err(|_| usage(format!("--grid: bad extent `{}`", parts[2])))?;
    GridSpec::new(n, big_n, l).map_err(|e| usage(format!("--grid: {e}")))
}

fn parse_exponent(text: &str) -> std::result::Result<f64, UsageError> {
    let v = match text.trim() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t.parse().map_err(|_| usage(format!("--r: not a number `{t}`")))?,
    };
    if !(v >= 1.0) {
        return Err(usage(format!("--r must be >= 1 or inf, got {text}")));
    }
    Ok(v)
}

fn parse_range(flag: &str, text: &str) -> std::result::Result<(i32, i32), UsageError> {
    let (a, b) = text.split_once(':').ok_or_else(|| usage(format!("{flag} expects lo:hi, got `{text}`")))?;
    let lo: i32 = a.trim().parse().map_err(|_| usage(format!("{flag}: bad bound `{a}`")))?;
    let hi: i32 = b.trim().parse().map_err(|_| usage(format!("{flag}: bad bound `{b}`")))?;
    if lo > hi {
        return Err(usage(format!("{flag}: empty range {lo}:{hi}")));
    }
    Ok((lo, hi))
}

fn parse_radii(text: &str) -> std::result::Result<Vec<f64>, UsageError> {
    if let Some((a, b)) = text.split_once(':') {
        let lo: f64 = a.trim().parse().map_err(|_| usage(format!("--radii: bad bound `{a}`")))?;
        let hi: f64 = b.trim().parse().map_err(|_| usage(format!("--radii: bad bound `{b}`")))?;
        if !(lo > 0.0 && hi > lo) {
            return Err(usage(format!("--radii: need 0 < lo < hi, got {text}")));
        }
        let mut out = vec![lo];
        while *out.last().unwrap() * 2.0 <= hi * (1.0 + 1e-12) {
            let next = out.last().unwrap() * 2.0;
            out.push(next);
        }
        Ok(out)
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("--radii: bad value `{t}`"))))
            .collect()
    }
}

/// Parses and validates `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        UsageError {
            code,
            message: e.to_string(),
        }
    })?;
    if cli.list {
        return Ok(blank(Command::List, None));
    }
    let (command, shared) = match cli.command {
        None => return Err(usage("no command given; try --help or --list")),
        Some(Cmd::BumpCheck(s)) => (Command::BumpCheck, s),
        Some(Cmd::Condition { functional, shared }) => (Command::Condition(functional), shared),
        Some(Cmd::Verify { check, shared }) => (Command::Verify(check), shared),
        Some(Cmd::Example { name, shared }) => (Command::Example(name), shared),
    };
    let mut cfg = blank(command, Some(&shared));
    cfg.grid = shared.grid.as_deref().map(parse_grid).transpose()?;
    cfg.sigma = match (&shared.sigma, &shared.sigma_file) {
        (Some(s), None) => Some(SigmaSource::Named(s.clone())),
        (None, Some(p)) => Some(SigmaSource::File(p.clone())),
        _ => None,
    };
    cfg.r = shared.r.as_deref().map(parse_exponent).transpose()?.unwrap_or(2.0);
    if let Some(g) = &shared.gamma {
        cfg.smoothness = Some(SmoothnessSpec::new(cfg.r, g.clone()).map_err(|e| usage(format!("--gamma: {e}")))?);
    }
    if let Some(p) = shared.p {
        if !(p > 1.0 && p.is_finite()) {
            return Err(usage(format!("--p must lie in (1, inf), got {p}")));
        }
    }
    for (flag, v) in [("--s", shared.s), ("--alpha", shared.alpha), ("--beta", shared.beta), ("--width", shared.width)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(usage(format!("{flag} must be positive, got {v}")));
            }
        }
    }
    cfg.radii = shared.radii.as_deref().map(parse_radii).transpose()?;
    cfg.k_range = shared.k.as_deref().map(|t| parse_range("--k", t)).transpose()?;
    let needs_sigma = matches!(
        cfg.command,
        Command::Condition(Functional::K | Functional::Hormander | Functional::A | Functional::Mixed)
            | Command::Verify(Check::Lemma21 | Check::Comparison | Check::Opnorm)
    );
    if needs_sigma && cfg.sigma.is_none() {
        return Err(usage("missing multiplier: pass --sigma <name> or --sigma-file <path>"));
    }
    let needs_gamma = matches!(
        cfg.command,
        Command::Condition(Functional::K | Functional::Admissible) | Command::Verify(Check::Lemma21 | Check::Comparison)
    );
    if needs_gamma && cfg.smoothness.is_none() {
        return Err(usage("missing --gamma"));
    }
    let required: &[(&str, bool)] = match cfg.command {
        Command::Condition(Functional::Hormander) => &[("--s", cfg.s.is_some())],
        Command::Condition(Functional::Mixed) => &[("--alpha", cfg.alpha.is_some()), ("--s", cfg.s.is_some())],
        Command::Condition(Functional::Admissible) | Command::Verify(Check::Opnorm) => &[("--p", cfg.p.is_some())],
        Command::Example(ExampleName::Sharpness) => &[
            ("--alpha", cfg.alpha.is_some()),
            ("--p", cfg.p.is_some()),
            ("--beta", cfg.beta.is_some()),
        ],
        _ => &[],
    };
    if let Some((flag, _)) = required.iter().find(|(_, ok)| !ok) {
        return Err(usage(format!("missing {flag}")));
    }
    Ok(cfg)
}

fn blank(command: Command, shared: Option<&Shared>) -> RunConfig {
    let out = shared.and_then(|s| s.out.clone());
    let format = shared
        .and_then(|s| s.format)
        .or_else(|| match out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("csv") => Some(Format::Csv),
            _ => None,
        })
        .unwrap_or(Format::Json);
    RunConfig {
        command,
        grid: None,
        sigma: None,
        smoothness: None,
        r: 2.0,
        s: shared.and_then(|s| s.s),
        alpha: shared.and_then(|s| s.alpha),
        p: shared.and_then(|s| s.p),
        beta: shared.and_then(|s| s.beta),
        rho: shared.and_then(|s| s.rho),
        radii: None,
        j: shared.and_then(|s| s.j.clone()),
        k_range: None,
        ells: shared.and_then(|s| s.ells.clone()),
        window: shared.and_then(|s| s.window),
        refine: shared.and_then(|s| s.refine),
        dim: shared.and_then(|s| s.dim).unwrap_or(2),
        width: shared.and_then(|s| s.width).unwrap_or(1.0),
        field: shared.and_then(|s| s.field).unwrap_or(TestField::Gaussian),
        seed: shared.map(|s| s.seed).unwrap_or(0),
        out,
        format,
    }
}

/// What a command produced.
enum Output {
    Report(ConditionReport),
    Experiment(ExperimentResult),
    Json(String, serde_json::Value, bool),
}

/// Executes `config` and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    if config.command == Command::List {
        for (name, what) in EXPERIMENTS {
            println!("{name:<24} {what}");
        }
        return 0;
    }
    let output = match execute(config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let success = match &output {
        Output::Report(_) => true,
        Output::Experiment(r) => r.verdict.status.is_success(),
        Output::Json(_, _, ok) => *ok,
    };
    if let Err(e) = emit(&output, config) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    if let Output::Experiment(r) = &output {
        eprintln!("{}: {} ({})", r.name, r.verdict.status, r.verdict.criterion);
    }
    if success {
        0
    } else {
        1
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn emit(output: &Output, config: &RunConfig) -> Result<()> {
    let ext = match config.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = config.out.as_ref().map(|p| {
        if p.is_dir() || p.as_os_str().to_string_lossy().ends_with('/') {
            let name = match output {
                Output::Experiment(r) => r.file_name(ext),
                Output::Report(r) => {
                    let canonical = serde_json::to_vec(&r.params).expect("params serialize");
                    let digest = <sha2::Sha256 as sha2::Digest>::digest(&canonical);
                    format!("{}-{}.{ext}", r.functional, hex::encode(&digest[..6]))
                }
                Output::Json(name, _, _) => format!("{name}.{ext}"),
            };
            p.join(name)
        } else {
            p.clone()
        }
    });
    if let Some(parent) = path.as_ref().and_then(|p| p.parent()).filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut sink: Box<dyn Write> = match &path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match (output, config.format) {
        (Output::Report(r), Format::Json) => r.write_json(&mut sink)?,
        (Output::Report(r), Format::Csv) => r.write_csv(&mut sink)?,
        (Output::Experiment(r), Format::Json) => r.write_json(&mut sink)?,
        (Output::Experiment(r), Format::Csv) => r.write_csv(&mut sink)?,
        (Output::Json(_, v, _), Format::Json) => serde_json::to_writer_pretty(&mut sink, v)?,
        (Output::Json(_, v, _), Format::Csv) => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(["key", "value"])?;
            if let Some(map) = v.as_object() {
                for (k, val) in map {
                    w.write_record([k.as_str(), &val.to_string()])?;
                }
            }
            w.flush()?;
        }
    }
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

fn load_sigma(config: &RunConfig, dim: usize) -> Result<Arc<dyn Symbol>> {
    match config.sigma.as_ref() {
        Some(SigmaSource::Named(text)) => named(text, dim),
        Some(SigmaSource::File(path)) => {
            let spectrum = read_multiplier(BufReader::new(File::open(path)?))?;
            Ok(Arc::new(SampledSymbol::new(spectrum)))
        }
        None => Err(Error::Domain("missing multiplier".into())),
    }
}

fn sigma_dim(config: &RunConfig, fallback: usize) -> usize {
    config
        .smoothness
        .as_ref()
        .map(|s| s.dim())
        .or(config.grid.map(|g| g.dim()))
        .unwrap_or(fallback)
}

fn window_opts(config: &RunConfig, default: usize) -> ConditionOptions {
    ConditionOptions {
        window: WindowGrid::with_samples(config.window.unwrap_or(default)),
        index_box: None,
        refinement: config.refine.into_iter().collect(),
    }
}

fn grid_or(config: &RunConfig, n: usize, samples: usize, extent: f64) -> Result<GridSpec> {
    match config.grid {
        Some(g) => Ok(g),
        None => GridSpec::new(n, samples, extent),
    }
}

fn k_list(config: &RunConfig, lo: i32, hi: i32) -> Vec<i32> {
    let (a, b) = config.k_range.unwrap_or((lo, hi));
    (a..=b).collect()
}

/// `e^{-π|x|²/w²}` on any grid.
pub fn gaussian_field(spec: GridSpec, width: f64) -> Field {
    Field::from_fn(spec, |x| {
        Complex64::new((-std::f64::consts::PI * x.iter().map(|a| a * a).sum::<f64>() / (width * width)).exp(), 0.0)
    })
}

/// A smooth random field: eight seeded Gaussian wave packets with centres in the
/// middle half of the box. It depends on the seed and extent but not on `N`, so
/// grid refinements sample the same function.
pub fn random_field(spec: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quarter = spec.extent() / 4.0;
    let packets: Vec<(Vec<f64>, Vec<f64>, f64, Complex64)> = (0..8)
        .map(|_| {
            let centre = (0..spec.dim()).map(|_| rng.gen_range(-quarter..quarter)).collect();
            let freq = (0..spec.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let width = rng.gen_range(0.5..2.0);
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (centre, freq, width, amp)
        })
        .collect();
    Field::from_fn(spec, |x| {
        packets
            .iter()
            .map(|(c, w0, width, amp)| {
                let r2: f64 = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum();
                let phase: f64 = x.iter().zip(w0).map(|(a, b)| a * b).sum();
                amp * Complex64::from_polar((-std::f64::consts::PI * r2 / (width * width)).exp(), 2.0 * std::f64::consts::PI * phase)
            })
            .sum()
    })
}

fn execute(config: &RunConfig) -> Result<Output> {
    match &config.command {
        Command::List => unreachable!(),
        Command::BumpCheck => {
            let grid = grid_or(config, 2, 128, 16.0)?;
            let check = check_bumps(&grid);
            let ok = check.passes(1e-12);
            let mut v = serde_json::to_value(&check)?;
            v["passes"] = json!(ok);
            Ok(Output::Json("bump-check".into(), v, ok))
        }
        Command::Condition(functional) => condition(config, *functional),
        Command::Verify(check) => verify(config, *check).map(Output::Experiment),
        Command::Example(name) => example(config, *name).map(Output::Experiment),
    }
}

fn condition(config: &RunConfig, functional: Functional) -> Result<Output> {
    if functional == Functional::Admissible {
        let smooth = config.smoothness.as_ref().expect("validated");
        let p = config.p.expect("validated");
        let ok = admissible_p(smooth, p)?;
        let v = json!({"functional": "admissible_p", "gamma": smooth.gamma, "p": p, "admissible": ok});
        return Ok(Output::Json("admissible".into(), v, true));
    }
    let sigma = load_sigma(config, sigma_dim(config, 2))?;
    let report = match functional {
        Functional::K => {
            let smooth = config.smoothness.as_ref().expect("validated");
            product_sobolev_k(sigma.as_ref(), smooth, &window_opts(config, 256))?
        }
        Functional::Hormander => hormander_norm(sigma.as_ref(), config.s.expect("validated"), config.r, &window_opts(config, 256))?,
        Functional::Mixed => mixed_smoothness_norm(
            sigma.as_ref(),
            config.alpha.expect("validated"),
            config.s.expect("validated"),
            config.r,
            &window_opts(config, 256),
        )?,
        Functional::A => {
            let boxed: IndexBox = match &config.k_range {
                Some((lo, hi)) => IndexBox::cube(sigma.dim(), *lo, *hi),
                None => sigma.index_hint(),
            };
            classical_marcinkiewicz_a(sigma.as_ref(), None, &boxed, config.window.unwrap_or(64))?
        }
        Functional::Admissible => unreachable!(),
    };
    Ok(Output::Report(report))
}

fn verify(config: &RunConfig, check: Check) -> Result<ExperimentResult> {
    match check {
        Check::Lemma21 => {
            let smooth = config.smoothness.as_ref().expect("validated");
            let grid = grid_or(config, smooth.dim(), 128, 16.0)?;
            let sigma = load_sigma(config, grid.dim())?;
            let f = match config.field {
                TestField::Gaussian => gaussian_field(grid, config.width),
                TestField::Random => random_field(grid, config.seed),
            };
            let j = config.j.clone().unwrap_or_else(|| vec![0; grid.dim()]);
            let mut res = check_domination(sigma.as_ref(), &f, &j, smooth, config.rho, &window_opts(config, 256))?;
            res.params.insert("field".into(), json!(format!("{:?}", config.field).to_lowercase()));
            res.params.insert("seed".into(), json!(config.seed));
            Ok(res)
        }
        Check::Identity => {
            let grid = grid_or(config, 1, 32768, 128.0)?;
            let gamma = config.smoothness.as_ref().map(|s| s.gamma[0]).unwrap_or(0.6);
            check_1d_identity(&gaussian_1d(grid, config.width), gamma, config.r, &k_list(config, -4, 4))
        }
        Check::Laplacian => {
            let grid = grid_or(config, 1, 16384, 1024.0)?;
            let gamma = config.smoothness.as_ref().map(|s| s.gamma[0]).unwrap_or(0.75);
            check_1d_laplacian(&gaussian_1d(grid, config.width), gamma, config.r, &k_list(config, 0, 6))
        }
        Check::Comparison => {
            let smooth = config.smoothness.as_ref().expect("validated");
            let sigma = load_sigma(config, smooth.dim())?;
            let mut opts = window_opts(config, 256);
            if opts.refinement.is_empty() {
                opts.refinement.push(opts.window.samples / 2);
            }
            check_comparison(sigma.as_ref(), smooth, &opts)
        }
        Check::Opnorm => {
            let grid = grid_or(config, sigma_dim(config, 1), 256, 32.0)?;
            let sigma = load_sigma(config, grid.dim())?;
            let top = grid.nyquist() / 2.0;
            let steps = 8;
            let centres: Vec<Vec<f64>> = (-steps..=steps)
                .map(|i| {
                    let mut c = vec![0.0; grid.dim()];
                    c[0] = top * i as f64 / steps as f64;
                    c
                })
                .collect();
            let family = wave_packets(grid, &centres, grid.extent() / 4.0);
            opnorm_scan(sigma.as_ref(), &family, config.p.expect("validated"))
        }
    }
}

fn example(config: &RunConfig, name: ExampleName) -> Result<ExperimentResult> {
    let alpha = config.alpha.unwrap_or(0.3);
    let beta = config.beta.unwrap_or(0.75);
    match name {
        ExampleName::Keystone => {
            let grid = grid_or(config, 1, 512, 8.0)?;
            let ex = Example51::new(alpha, beta, config.dim)?;
            let shells = config.radii.clone().unwrap_or_else(|| vec![9.0, 20.0, 3f64.exp(), 100.0, 1000.0]);
            keystone_check(&ex, grid, &shells, 1e-6)
        }
        ExampleName::Sharpness => {
            let radii = config.radii.clone().unwrap_or_else(|| dyadic_ladder(4, 10));
            sharpness_scan(alpha, config.p.expect("validated"), beta, &radii, config.dim)
        }
        ExampleName::Membership => {
            let ladder = config.radii.clone().unwrap_or_else(|| dyadic_ladder(1, 7));
            witness_membership(beta, config.p.unwrap_or(4.0 / 3.0), config.dim, &ladder)
        }
        ExampleName::OneSidedness => {
            let gamma1 = config.smoothness.as_ref().map(|s| s.gamma[0]).unwrap_or(1.0);
            let ells = config.ells.clone().unwrap_or_else(|| vec![16, 32, 64, 128, 256]);
            one_sidedness(
                alpha,
                gamma1,
                config.s.unwrap_or(0.0),
                config.r,
                &ells,
                WindowGrid::with_samples(config.window.unwrap_or(1024)),
            )
        }
        ExampleName::OpnormLadder => {
            let extent = config.grid.map(|g| g.extent()).unwrap_or(8.0);
            let sizes = config.radii.clone().unwrap_or_else(|| vec![512.0, 1024.0, 2048.0]);
            let grids = sizes
                .iter()
                .map(|n| GridSpec::new(2, *n as usize, extent))
                .collect::<Result<Vec<_>>>()?;
            example51_opnorm_ladder(alpha, beta, config.p.unwrap_or(4.0 / 3.0), &grids)
        }
    }
}

/// Entry point shared by the binary: parse, run, and map errors to exit codes.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            if e.code == 0 {
                print!("{}", e.message);
            } else {
                eprintln!("{}", e.message.trim_end());
            }
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(line: &str) -> Vec<String> {
        std::iter::once("mlab".to_string()).chain(line.split_whitespace().map(String::from)).collect()
    }

    #[test]
    fn condition_k_maps_flags() {
        let c = parse_args(argv("condition --functional K --sigma example51:alpha=0.3 --gamma 0.3,0.8 --r 4 --out k.json")).unwrap();
        assert_eq!(c.command, Command::Condition(Functional::K));
        assert_eq!(c.sigma, Some(SigmaSource::Named("example51:alpha=0.3".into())));
        let s = c.smoothness.unwrap();
        assert_eq!(s.gamma, vec![0.3, 0.8]);
        assert_eq!(s.r, 4.0);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn sharpness_maps_flags() {
        let c = parse_args(argv("example sharpness --alpha 0.15 --p 1.3333 --beta 0.6 --radii 16:1024 --out scan.csv")).unwrap();
        assert_eq!(c.command, Command::Example(ExampleName::Sharpness));
        assert_eq!(c.radii.unwrap(), vec![16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.p, Some(1.3333));
    }

    #[test]
    fn usage_errors() {
        let e = parse_args(argv("condition --functional K")).unwrap_err();
        assert_eq!(e.code, 2);
        assert!(e.message.contains("--sigma"), "{}", e.message);
        assert_eq!(parse_args(argv("condition --functional K --bogus 1")).unwrap_err().code, 2);
        let e = parse_args(argv("example sharpness --alpha 0.15 --p 1 --beta 0.6")).unwrap_err();
        assert!(e.message.contains("--p"));
        assert!(parse_args(argv("condition --functional K --sigma identity --sigma-file x.txt --gamma 1,1")).is_err());
        assert!(parse_args(argv("bump-check --grid 1,7,8")).is_err());
        assert!(parse_args(argv("verify identity --r 0.5")).is_err());
    }

    #[test]
    fn negative_indices_parse() {
        let c = parse_args(argv("verify lemma21 --sigma identity --gamma 0.8,0.8 --j -1,0 --k -4:4")).unwrap();
        assert_eq!(c.j, Some(vec![-1, 0]));
        assert_eq!(c.k_range, Some((-4, 4)));
    }

    #[test]
    fn list_flag() {
        assert_eq!(parse_args(argv("--list")).unwrap().command, Command::List);
    }

    #[test]
    fn random_field_is_seeded() {
        let g = GridSpec::new(2, 16, 4.0).unwrap();
        assert_eq!(random_field(g, 7), random_field(g, 7));
        assert_ne!(random_field(g, 7), random_field(g, 8));
    }
}
