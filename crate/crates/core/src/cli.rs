//! Command-line front end for the `kout` binary.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O
//! errors. Data goes to standard output or `--out`; progress and diagnostics
//! go to the error stream.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dump::write_dump;
use crate::experiment::{run_with, ExperimentConfig, Output, RunOptions, SweepAxis, SweepSpec};
use crate::model::ModelParams;
use crate::oracle::{exact_connectivity, ExactResult};
use crate::output::{write_csv, write_json};
use crate::rng::SeedSpec;
use crate::sampler::build_graph;
use crate::theory::{bound_report, k_star};

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;
/// The ten `mu~` rows of the reference K* table.
pub const TABLE_MU_TILDE: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

const FIG1_N: u64 = 1000;
const FIG1_MU: [f64; 3] = [0.9, 0.06, 0.04];
const FIG1_K: [u64; 3] = [1, 2, 3];

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

fn invalid(e: impl ToString) -> CliError {
    CliError::Validation(e.to_string())
}

fn io_err(what: &str, e: impl ToString) -> CliError {
    CliError::Io(format!("{what}: {}", e.to_string()))
}

#[derive(Parser, Debug)]
#[command(name = "kout", version, about = "Inhomogeneous random K-out graph toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate for one parameter set (JSON by default)
    Simulate(RunArgs),
    /// Monte Carlo over a K_r or n range (CSV by default)
    Sweep(SweepArgs),
    /// Closed-form bounds, no sampling
    Bounds(ParamArgs),
    /// Smallest K_r giving a non-trivial one-law lower bound
    Kstar(KstarArgs),
    /// Exact probabilities by total enumeration (tiny n only)
    Oracle(ParamArgs),
    /// Empirical connectivity against the 1 - C bound, K_3 = 3..20 at n = 1000
    Figure1(Figure1Args),
    /// Sample one graph and print it in the text dump format
    Dump(DumpArgs),
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    /// Class probabilities, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    mu: Option<Vec<f64>>,
    /// Selections per class, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u64>>,
    /// Output path (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    confidence: Option<f64>,
    /// Any of connectivity, y_stats, edge_count, component_histogram
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<String>>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Suppress progress messages
    #[arg(long)]
    quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Axis {
    KMax,
    N,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_enum)]
    vary: Option<Axis>,
    #[arg(long)]
    from: Option<u64>,
    #[arg(long)]
    to: Option<u64>,
    #[arg(long)]
    step: Option<u64>,
}

#[derive(Args, Debug)]
struct KstarArgs {
    /// mu~ values, comma separated (default: the ten reference rows)
    #[arg(long = "mu-tilde", value_delimiter = ',')]
    mu_tilde: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Figure1Args {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = FIG1_N)]
    n: u64,
    #[arg(long = "k3-from", default_value_t = 3)]
    k3_from: u64,
    #[arg(long = "k3-to", default_value_t = 20)]
    k3_to: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args, Debug)]
struct DumpArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: u64,
}

/// Partial parameter document.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialParams {
    n: Option<u64>,
    mu: Option<Vec<f64>>,
    k: Option<Vec<u64>>,
}

/// Config file contents. Parameters may sit at the top level or under
/// `params`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(default)]
    params: PartialParams,
    n: Option<u64>,
    mu: Option<Vec<f64>>,
    k: Option<Vec<u64>>,
    sweep: Option<SweepSpec>,
    trials: Option<u64>,
    #[serde(alias = "seed")]
    master_seed: Option<u64>,
    confidence_level: Option<f64>,
    outputs: Option<Vec<Output>>,
}

fn load_config(path: Option<&Path>) -> Result<ConfigDoc, CliError> {
    let Some(path) = path else {
        return Ok(ConfigDoc::default());
    };
    let text = fs::read_to_string(path).map_err(|e| io_err(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn resolve_params(args: &ParamArgs, doc: &ConfigDoc) -> Result<ModelParams, CliError> {
    let n = args.n.or(doc.n).or(doc.params.n);
    let mu = args.mu.clone().or_else(|| doc.mu.clone()).or_else(|| doc.params.mu.clone());
    let k = args.k.clone().or_else(|| doc.k.clone()).or_else(|| doc.params.k.clone());
    match (n, mu, k) {
        (Some(n), Some(mu), Some(k)) => ModelParams::new(n, mu, k).map_err(invalid),
        _ => Err(invalid("parameters need --n, --mu and --k (or a config file providing them)")),
    }
}

fn build_config(
    run: &RunArgs,
    doc: &ConfigDoc,
    configs: Vec<ModelParams>,
) -> Result<ExperimentConfig, CliError> {
    let trials = run.trials.or(doc.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = run.seed.or(doc.master_seed).unwrap_or(DEFAULT_SEED);
    let mut cfg = ExperimentConfig::new(configs, trials, seed).map_err(invalid)?;
    if let Some(level) = run.confidence.or(doc.confidence_level) {
        cfg = cfg.with_confidence(level).map_err(invalid)?;
    }
    let outputs = match &run.outputs {
        Some(names) => Some(
            names
                .iter()
                .map(|s| Output::parse(s).ok_or_else(|| invalid(format!("unknown output {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => doc.outputs.clone(),
    };
    if let Some(o) = outputs {
        cfg = cfg.with_outputs(o);
    }
    Ok(cfg)
}

/// Writes `bytes` to `--out` or standard output.
fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| io_err(&path.display().to_string(), e)),
        None => stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| io_err("standard output", e)),
    }
}

fn run_experiment(
    cfg: &ExperimentConfig,
    format: Format,
    out: Option<&Path>,
    quiet: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut report = |done: usize, total: usize| {
        let _ = writeln!(stderr, "[{done}/{total}] configurations done");
    };
    let opts = RunOptions {
        workers: None,
        progress: if quiet { None } else { Some(&mut report) },
    };
    let results = run_with(cfg, opts).map_err(invalid)?;
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&results, &mut buf),
        Format::Json => write_json(&results, cfg.outputs(), &mut buf),
    }
    .map_err(|e| io_err("rendering output", e))?;
    emit(out, &buf, stdout)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut buf = serde_json::to_vec_pretty(value).expect("serializable");
    buf.push(b'\n');
    buf
}

#[derive(Serialize)]
struct KstarRow {
    mu_tilde: f64,
    k_star: u64,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    params: &'a ModelParams,
    #[serde(flatten)]
    result: &'a ExactResult,
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Simulate(run) => {
            let doc = load_config(run.params.config.as_deref())?;
            if doc.sweep.is_some() {
                return Err(invalid("simulate takes a single configuration; use sweep"));
            }
            let params = resolve_params(&run.params, &doc)?;
            let cfg = build_config(&run, &doc, vec![params])?;
            let format = run.format.unwrap_or(Format::Json);
            run_experiment(&cfg, format, run.params.out.as_deref(), run.quiet, stdout, stderr)
        }
        Command::Sweep(args) => {
            let doc = load_config(args.run.params.config.as_deref())?;
            let base = resolve_params(&args.run.params, &doc)?;
            let file = doc.sweep.clone();
            let vary = args
                .vary
                .map(|a| match a {
                    Axis::KMax => SweepAxis::KMax,
                    Axis::N => SweepAxis::N,
                })
                .or(file.as_ref().map(|s| s.vary));
            let from = args.from.or(file.as_ref().map(|s| s.from));
            let to = args.to.or(file.as_ref().map(|s| s.to));
            let step = args.step.or(file.as_ref().map(|s| s.step)).unwrap_or(1);
            let (Some(vary), Some(from), Some(to)) = (vary, from, to) else {
                return Err(invalid("sweep needs --vary, --from and --to (or a \"sweep\" config entry)"));
            };
            let spec = SweepSpec { vary, from, to, step };
            let configs = spec.expand(&base).map_err(invalid)?;
            let cfg = build_config(&args.run, &doc, configs)?;
            let format = args.run.format.unwrap_or(Format::Csv);
            let out = args.run.params.out.as_deref();
            run_experiment(&cfg, format, out, args.run.quiet, stdout, stderr)
        }
        Command::Bounds(args) => {
            let doc = load_config(args.config.as_deref())?;
            let params = resolve_params(&args, &doc)?;
            emit(args.out.as_deref(), &json_bytes(&bound_report(&params)), stdout)
        }
        Command::Kstar(args) => {
            let mus = args.mu_tilde.unwrap_or_else(|| TABLE_MU_TILDE.to_vec());
            let rows = mus
                .iter()
                .map(|&m| k_star(m).map(|k| KstarRow { mu_tilde: m, k_star: k }))
                .collect::<Result<Vec<_>, _>>()
                .map_err(invalid)?;
            let bytes = match args.format {
                Format::Json => json_bytes(&rows),
                Format::Csv => {
                    let mut s = String::from("mu_tilde,k_star\n");
                    for r in &rows {
                        s.push_str(&format!("{},{}\n", r.mu_tilde, r.k_star));
                    }
                    s.into_bytes()
                }
            };
            emit(args.out.as_deref(), &bytes, stdout)
        }
        Command::Oracle(args) => {
            let doc = load_config(args.config.as_deref())?;
            let params = resolve_params(&args, &doc)?;
            let result = exact_connectivity(&params).map_err(invalid)?;
            let report = OracleReport { params: &params, result: &result };
            emit(args.out.as_deref(), &json_bytes(&report), stdout)
        }
        Command::Figure1(args) => {
            let base = ModelParams::new(args.n, FIG1_MU.to_vec(), FIG1_K.to_vec()).map_err(invalid)?;
            let spec = SweepSpec {
                vary: SweepAxis::KMax,
                from: args.k3_from,
                to: args.k3_to,
                step: 1,
            };
            let cfg = ExperimentConfig::sweep(&base, &spec, args.trials, args.seed).map_err(invalid)?;
            run_experiment(&cfg, args.format, args.out.as_deref(), args.quiet, stdout, stderr)
        }
        Command::Dump(args) => {
            let doc = load_config(args.params.config.as_deref())?;
            let params = resolve_params(&args.params, &doc)?;
            let graph = build_graph(&params, SeedSpec::new(args.seed, args.trial));
            let mut buf = Vec::new();
            write_dump(&graph, &mut buf).map_err(|e| io_err("rendering dump", e))?;
            emit(args.params.out.as_deref(), &buf, stdout)
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let msg = match &e {
                CliError::Validation(m) => format!("error: {m}"),
                CliError::Io(m) => format!("I/O error: {m}"),
            };
            let _ = writeln!(stderr, "{msg}");
            e.code()
        }
    }
}

/// Runs with the process's arguments and standard streams.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
