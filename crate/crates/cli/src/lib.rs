//! Command-line front end: argument parsing, configuration merging and exit
//! codes. The subcommands themselves live in [`commands`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

pub mod commands;
pub mod config;
pub mod json;

pub use config::RunConfig;

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<rectiscope::Error> for CliError {
    fn from(e: rectiscope::Error) -> Self {
        use rectiscope::Error as E;
        match e {
            E::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            E::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Parses a snake_case (or kebab-case) enum name through its serde form.
fn parse_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    let attempt = |name: &str| serde_json::from_value(serde_json::Value::String(name.to_string()));
    attempt(s)
        .or_else(|_| attempt(&s.replace('-', "_")))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "rectiscope", version, about = "Multiscale flatness and curvature diagnostics for point clouds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic measure.
    Generate(GenerateArgs),
    /// β-numbers and Jones partial sums per center and scale.
    Beta(BetaArgs),
    /// Menger-type curvature per center.
    Curv(CurvArgs),
    /// Jones square function per center.
    Jones(BetaArgs),
    /// Build a secant frame and check its conclusions.
    Secant(SecantArgs),
    /// Density ratios per center and scale.
    Density(DensityArgs),
    /// Restrict the measure to atoms with bounded small-scale density.
    Chop(ChopArgs),
    /// Run inequality checks.
    Verify(VerifyArgs),
    /// Summary of a measure at selected centers.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Intrinsic dimension.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Path of the JSON summary.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print elapsed time to stderr.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// Number of scales.
    #[arg(long)]
    pub scales: Option<usize>,
    /// Largest radius.
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_enum::<rectiscope::GeneratorKind>)]
    pub kind: Option<rectiscope::GeneratorKind>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub level: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, value_parser = parse_enum::<rectiscope::WeightScheme>)]
    pub weights: Option<rectiscope::WeightScheme>,
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Use planes through the center.
    #[arg(long)]
    pub centered: bool,
    /// `all`, `sample:K` or `file:PATH`.
    #[arg(long)]
    pub centers: Option<String>,
    /// Dini exponent γ (requires alpha = 1).
    #[arg(long)]
    pub dini_gamma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CurvArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// auto, exhaustive or mc.
    #[arg(long, value_parser = parse_enum::<rectiscope::MethodChoice>)]
    pub method: Option<rectiscope::MethodChoice>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// uniform or annulus_stratified.
    #[arg(long, value_parser = parse_enum::<rectiscope::SamplingStrategy>)]
    pub strategy: Option<rectiscope::SamplingStrategy>,
    /// Largest number of tuples for exhaustive evaluation.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub centers: Option<String>,
}

#[derive(Debug, Args)]
pub struct SecantArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub x_index: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    /// theoretical or empirical.
    #[arg(long, value_parser = parse_enum::<rectiscope::SecantMode>)]
    pub mode: Option<rectiscope::SecantMode>,
    #[arg(long)]
    pub check_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[arg(long)]
    pub centers: Option<String>,
}

#[derive(Debug, Args)]
pub struct ChopArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k: Option<u32>,
    /// Number of dyadic radii tested.
    #[arg(long)]
    pub depth: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// all, beta-curv, jones-curv, holder or volume.
    #[arg(long, value_parser = parse_enum::<config::Suite>)]
    pub suite: Option<config::Suite>,
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_parser = parse_enum::<rectiscope::SecantMode>)]
    pub mode: Option<rectiscope::SecantMode>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub max_dim: Option<usize>,
    #[arg(long)]
    pub ambient_dim: Option<usize>,
    #[arg(long)]
    pub max_scales: Option<usize>,
    #[arg(long)]
    pub holder_p: Option<f64>,
    #[arg(long)]
    pub holder_alpha: Option<f64>,
    /// localized or full_ball.
    #[arg(long, value_parser = parse_enum::<rectiscope::verify::CurvDomain>)]
    pub domain: Option<rectiscope::verify::CurvDomain>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[arg(long)]
    pub centers: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
}

fn set<T>(target: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *target = v;
    }
}

fn merge_common(cfg: &mut RunConfig, c: &Common) {
    set(&mut cfg.input, c.input.clone().map(Some));
    set(&mut cfg.n, c.n);
    set(&mut cfg.seed, c.seed);
    set(&mut cfg.output, c.output.clone().map(Some));
    set(&mut cfg.report, c.report.clone().map(Some));
}

fn merge_scales(cfg: &mut RunConfig, s: &ScaleArgs) {
    set(&mut cfg.scales.count, s.scales);
    set(&mut cfg.scales.r0, s.r0);
    set(&mut cfg.scales.ratio, s.ratio);
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Generate(a) => &a.common,
            Command::Beta(a) | Command::Jones(a) => &a.common,
            Command::Curv(a) => &a.common,
            Command::Secant(a) => &a.common,
            Command::Density(a) => &a.common,
            Command::Chop(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Report(a) => &a.common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Beta(_) => "beta",
            Command::Curv(_) => "curv",
            Command::Jones(_) => "jones",
            Command::Secant(_) => "secant",
            Command::Density(_) => "density",
            Command::Chop(_) => "chop",
            Command::Verify(_) => "verify",
            Command::Report(_) => "report",
        }
    }

    /// The effective configuration: config file (if any), then flags.
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let common = self.common();
        let mut cfg = match &common.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        merge_common(&mut cfg, common);
        match self {
            Command::Generate(a) => {
                let g = &mut cfg.generator;
                set(&mut g.n, common.n);
                set(&mut g.seed, common.seed);
                set(&mut g.kind, a.kind);
                set(&mut g.m, a.m);
                set(&mut g.count, a.count);
                set(&mut g.level, a.level);
                set(&mut g.alpha, a.alpha);
                set(&mut g.noise, a.noise);
                set(&mut g.weights, a.weights);
            }
            Command::Beta(a) | Command::Jones(a) => {
                merge_scales(&mut cfg, &a.scales);
                set(&mut cfg.p, a.p);
                set(&mut cfg.alpha, a.alpha);
                set(&mut cfg.centers, a.centers.clone());
                set(&mut cfg.dini_gamma, a.dini_gamma.map(Some));
                cfg.centered |= a.centered;
            }
            Command::Curv(a) => {
                set(&mut cfg.p, a.p);
                set(&mut cfg.alpha, a.alpha);
                set(&mut cfg.r, a.r);
                set(&mut cfg.centers, a.centers.clone());
                set(&mut cfg.curvature.method, a.method);
                set(&mut cfg.curvature.samples, a.samples);
                set(&mut cfg.curvature.strategy, a.strategy);
                set(&mut cfg.curvature.budget, a.budget);
            }
            Command::Secant(a) => {
                set(&mut cfg.r, a.r);
                set(&mut cfg.secant.x_index, a.x_index);
                set(&mut cfg.secant.lambda, a.lambda);
                set(&mut cfg.secant.c0, a.c0);
                set(&mut cfg.secant.k, a.k);
                set(&mut cfg.secant.mode, a.mode);
                set(&mut cfg.secant.check_samples, a.check_samples);
            }
            Command::Density(a) => {
                merge_scales(&mut cfg, &a.scales);
                set(&mut cfg.centers, a.centers.clone());
            }
            Command::Chop(a) => {
                set(&mut cfg.chop.k, a.k);
                set(&mut cfg.chop.depth, a.depth);
            }
            Command::Verify(a) => {
                merge_scales(&mut cfg, &a.scales);
                set(&mut cfg.centers, a.centers.clone());
                set(&mut cfg.alpha, a.alpha);
                set(&mut cfg.secant.lambda, a.lambda);
                set(&mut cfg.secant.c0, a.c0);
                set(&mut cfg.secant.k, a.k);
                set(&mut cfg.secant.mode, a.mode);
                let v = &mut cfg.verify;
                set(&mut v.suite, a.suite);
                set(&mut v.trials, a.trials);
                set(&mut v.max_dim, a.max_dim);
                set(&mut v.ambient_dim, a.ambient_dim);
                set(&mut v.max_scales, a.max_scales);
                set(&mut v.holder_p, a.holder_p);
                set(&mut v.holder_alpha, a.holder_alpha);
                set(&mut v.domain, a.domain);
            }
            Command::Report(a) => {
                merge_scales(&mut cfg, &a.scales);
                set(&mut cfg.centers, a.centers.clone());
                set(&mut cfg.alpha, a.alpha);
                set(&mut cfg.p, a.p);
                set(&mut cfg.r, a.r);
            }
        }
        Ok(cfg)
    }
}

/// Worker count from `RECTISCOPE_THREADS` (unset or 0: one per core).
pub fn thread_count() -> Result<usize, CliError> {
    match std::env::var("RECTISCOPE_THREADS") {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("RECTISCOPE_THREADS must be a non-negative integer, got {v:?}"))),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command inside a worker pool sized by `RECTISCOPE_THREADS`.
pub fn run(command: &Command) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let cfg = command.config()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let result = pool.install(|| commands::dispatch(command, &cfg));
    if command.common().timing {
        eprintln!("{}: {:.3} s", command.name(), start.elapsed().as_secs_f64());
    }
    result
}
