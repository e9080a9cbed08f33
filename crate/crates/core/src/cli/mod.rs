//! Reproducible experiment runner behind the `microlocal` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or usage,
//! 3 numerical failure (the message names the failing point and ε).

pub mod config;
pub mod registry;
pub mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::asymptotics::{classify_regularity, localized_fiber, par_map, valuation_fit, FiberOptions, Spectrum};
use crate::error::Error;
pub use config::{ExperimentConfig, NetSpec, RegionConfig, ScheduleConfig, Task, Validated};

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn config_failure(e: Error) -> Failure {
    match e {
        Error::Io(m) => Failure::Io(m),
        Error::Config(m) => Failure::Config(m),
        other => Failure::Config(other.to_string()),
    }
}

fn numerical_failure(at: &str, e: Error) -> Failure {
    match e {
        Error::Io(m) => Failure::Io(m),
        other => Failure::Numerical(format!("{at}: {other}")),
    }
}

pub struct RunOutput {
    pub report: Value,
    pub spectrum: Option<Spectrum>,
}

/// Validate and execute one experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, Failure> {
    let v = cfg.validate().map_err(config_failure)?;
    match v.config.task {
        Task::Spectrum => {
            let opts = FiberOptions::default();
            let grid = v.region.grid();
            let fibers = par_map(&grid, |x| {
                localized_fiber(&v.net, x, v.target, &v.schedule, v.delta, &opts)
                    .map_err(|e| Error::Inconclusive(format!("at x = {x:?}: {e}")))
            })
            .map_err(|e| match e {
                Error::Inconclusive(m) => Failure::Numerical(m),
                other => numerical_failure("spectrum", other),
            })?;
            let spectrum = Spectrum {
                target: v.target,
                scale: opts.scale.id().to_string(),
                region: v.region.clone(),
                delta: v.delta,
                points: grid.into_iter().zip(fibers).collect(),
            };
            Ok(RunOutput {
                report: report::spectrum_report(&v, &spectrum),
                spectrum: Some(spectrum),
            })
        }
        Task::Valuation { l } => {
            let at = format!("on K = {:?}..{:?}", v.region.lo(), v.region.hi());
            let fit = valuation_fit(&v.net, &v.region, l, &v.schedule).map_err(|e| numerical_failure(&at, e))?;
            Ok(RunOutput {
                report: report::valuation_report(&v, l, &fit),
                spectrum: None,
            })
        }
        Task::Classify { lmax } => {
            let at = format!("on K = {:?}..{:?}", v.region.lo(), v.region.hi());
            let r = classify_regularity(&v.net, &v.region, &v.schedule, lmax).map_err(|e| numerical_failure(&at, e))?;
            Ok(RunOutput {
                report: report::classify_report(&v, &r),
                spectrum: None,
            })
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "microlocal", version, about = "Singular spectra and valuations of ε-parameterized nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Σ-fibers over a grid
    Spectrum(SpectrumArgs),
    /// Growth order v_{K,l} of a net on a compact
    Valuation(ValuationArgs),
    /// G^∞ / slow-scale classification on a compact
    Classify(ClassifyArgs),
    /// Run a registry experiment with its defaults
    Example(ExampleArgs),
    /// Print the experiment registry
    List,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 0.1)]
    eps_max: f64,
    #[arg(long, default_value_t = 0.6)]
    rho: f64,
    #[arg(long, default_value_t = 24)]
    neps: usize,
}

impl ScheduleArgs {
    fn config(&self) -> ScheduleConfig {
        ScheduleConfig {
            eps_max: self.eps_max,
            rho: self.rho,
            n: self.neps,
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// JSON report path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recorded in the report; the pipeline itself is deterministic
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Experiment config (JSON); replaces the net/region flags
    #[arg(long, conflicts_with_all = ["net", "region"])]
    config: Option<PathBuf>,
    /// Net spec, e.g. delta_pow:m=2
    #[arg(long, required_unless_present = "config")]
    net: Option<String>,
    #[arg(long, default_value = "c0")]
    target: String,
    /// lo,hi per axis, e.g. -2,2 or -1,1,0.5,1.5
    #[arg(long = "box", id = "region", allow_hyphen_values = true, required_unless_present = "config")]
    region: Option<String>,
    #[arg(long, default_value_t = 81)]
    nx: usize,
    /// Initial neighborhood half-width (default: two grid spacings)
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Long-format CSV, one row per grid point
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValuationArgs {
    #[arg(long)]
    net: String,
    /// Compact K as lo,hi per axis
    #[arg(long, allow_hyphen_values = true)]
    k: String,
    #[arg(long, default_value_t = 0)]
    l: usize,
    #[arg(long, default_value_t = 81)]
    nx: usize,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    net: String,
    #[arg(long, allow_hyphen_values = true, default_value = "-0.5,0.5")]
    k: String,
    #[arg(long, default_value_t = 4)]
    lmax: usize,
    #[arg(long, default_value_t = 41)]
    nx: usize,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    name: String,
    /// Net parameter override, key=value (repeatable)
    #[arg(long = "param")]
    params: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// `lo,hi[,lo,hi…]` into per-axis bounds.
pub fn parse_box(text: &str) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let vals: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Config(format!("box '{text}' is not a comma-separated list of numbers")))?;
    if vals.is_empty() || vals.len() % 2 != 0 {
        return Err(Failure::Config(format!("box '{text}' needs lo,hi pairs")));
    }
    Ok(vals.chunks(2).map(|c| (c[0], c[1])).unzip())
}

fn region(text: &str, points: usize) -> Result<RegionConfig, Failure> {
    let (lo, hi) = parse_box(text)?;
    Ok(RegionConfig { lo, hi, points })
}

fn ad_hoc(net: &str, task: Task, target: &str, reg: RegionConfig, s: &ScheduleArgs, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let spec = registry::parse_net_spec(net).map_err(config_failure)?;
    Ok(ExperimentConfig {
        experiment: "ad_hoc".into(),
        net: spec,
        task,
        target: target.into(),
        region: reg,
        schedule: s.config(),
        scale: "power".into(),
        delta: None,
        seed,
    })
}

fn emit(out: &RunOutput, json: Option<&Path>, csv: Option<&Path>) -> Result<(), Failure> {
    let bytes = report::to_json_bytes(&out.report);
    let io = |p: &Path, e: std::io::Error| Failure::Io(format!("{}: {e}", p.display()));
    match json {
        Some(p) => std::fs::write(p, &bytes).map_err(|e| io(p, e))?,
        None => std::io::stdout().write_all(&bytes).map_err(|e| io(Path::new("<stdout>"), e))?,
    }
    if let Some(p) = csv {
        let s = out
            .spectrum
            .as_ref()
            .ok_or_else(|| Failure::Config("--csv is only available for spectrum runs".into()))?;
        report::write_csv(p, s).map_err(config_failure)?;
    }
    Ok(())
}

fn list() -> String {
    let mut s = String::new();
    for e in registry::REGISTRY.iter().filter(|e| e.listed) {
        let params: Vec<String> = e
            .params
            .iter()
            .map(|(k, d)| match d {
                Some(v) => format!("{k}={v}"),
                None => format!("[{k}]"),
            })
            .collect();
        s.push_str(&format!("{:<24} {:<24} {}\n", e.name, params.join(","), e.about));
    }
    s
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::List => {
            print!("{}", list());
            Ok(())
        }
        Command::Spectrum(a) => {
            let mut cfg = match &a.config {
                Some(p) => {
                    let mut c = ExperimentConfig::load(p).map_err(config_failure)?;
                    if a.output.seed.is_some() {
                        c.seed = a.output.seed;
                    }
                    c
                }
                None => ad_hoc(
                    a.net.as_deref().expect("required by clap"),
                    Task::Spectrum,
                    &a.target,
                    region(a.region.as_deref().expect("required by clap"), a.nx)?,
                    &a.schedule,
                    a.output.seed,
                )?,
            };
            if a.delta.is_some() {
                cfg.delta = a.delta;
            }
            let out = run_experiment(&cfg)?;
            emit(&out, a.output.out.as_deref(), a.csv.as_deref())
        }
        Command::Valuation(a) => {
            let cfg = ad_hoc(&a.net, Task::Valuation { l: a.l }, "c0", region(&a.k, a.nx)?, &a.schedule, a.output.seed)?;
            emit(&run_experiment(&cfg)?, a.output.out.as_deref(), None)
        }
        Command::Classify(a) => {
            let cfg = ad_hoc(&a.net, Task::Classify { lmax: a.lmax }, "c0", region(&a.k, a.nx)?, &a.schedule, a.output.seed)?;
            emit(&run_experiment(&cfg)?, a.output.out.as_deref(), None)
        }
        Command::Example(a) => {
            let mut overrides = BTreeMap::new();
            for kv in &a.params {
                let (k, v) = registry::parse_param(kv).map_err(config_failure)?;
                overrides.insert(k, v);
            }
            let mut cfg = registry::default_experiment(&a.name, overrides).map_err(config_failure)?;
            cfg.seed = a.output.seed;
            emit(&run_experiment(&cfg)?, a.output.out.as_deref(), a.csv.as_deref())
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("microlocal: {f}");
            f.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxes() {
        assert_eq!(parse_box("-2,2").unwrap(), (vec![-2.0], vec![2.0]));
        assert_eq!(parse_box("-1,1,0.5,1.5").unwrap(), (vec![-1.0, 0.5], vec![1.0, 1.5]));
        assert!(parse_box("1,2,3").is_err());
        assert!(parse_box("a,b").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with(["microlocal", "list"]), 0);
        assert_eq!(main_with(["microlocal", "bogus"]), 2);
        assert_eq!(main_with(["microlocal", "example", "nope"]), 2);
        assert_eq!(main_with(["microlocal", "spectrum", "--net", "delta_pow:m=2", "--box", "-2,2,3"]), 2);
        assert_eq!(Failure::Numerical(String::new()).exit_code(), 3);
    }

    #[test]
    fn listing_has_every_experiment() {
        let text = list();
        assert_eq!(text.lines().count(), 11);
        assert!(text.lines().all(|l| registry::lookup(l.split_whitespace().next().unwrap()).is_ok()));
    }
}
