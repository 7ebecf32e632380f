//! Command-line front end.
//!
//! - `simulate` runs a scenario file for one or more replications and writes
//!   `report-r<N>.csv` / `summary-r<N>.json` per replication.
//! - `eval` replays a single trace through the risk model and prints the verdict.
//! - `compare` replays a trace through both models side by side.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;
use trustnet_core::arh::DirectTrustStore;
use trustnet_core::format::Json;
use trustnet_core::risk_trust::{bootstrap, evaluate, ModelParams, ReputationSample, TrustState};
use trustnet_core::simulator::{run_scenario, Scenario};
use trustnet_core::{AgentId, Banding, Context, OrdinalDegree, TrustTenths};

pub mod trace;

use trace::TraceFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "trustnet", version, about = "Trust and reputation models for agent communities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write per-replication reports.
    Simulate(SimulateArgs),
    /// Replay a trace through the risk model and print the final verdict as JSON.
    Eval(EvalArgs),
    /// Replay a trace through both models and print both verdicts as JSON.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

/// Model parameters that must be given explicitly.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Forgiveness weight of the current period's median (> 0).
    #[arg(long)]
    pub k: f64,
    /// Largest experience window.
    #[arg(long)]
    pub n: usize,
    /// Trust threshold in [0, 1].
    #[arg(long = "td-th")]
    pub td_th: f64,
    /// Risk threshold (>= 0).
    #[arg(long = "rv-th")]
    pub rv_th: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.k, self.n, self.td_th, self.rv_th).map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub format: Format,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub replications: u32,
    /// Base seed; replication r runs with base + r. Defaults to the scenario's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Concurrent replications.
    #[arg(long, env = "TRUSTNET_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "td-th")]
    pub td_th: Option<f64>,
    #[arg(long = "rv-th")]
    pub rv_th: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Comma-separated recommendation values used to bootstrap, e.g. 0.8,0.6.
    #[arg(long, value_delimiter = ',')]
    pub recs: Option<Vec<String>>,
    /// Start in this period, with its grown window capacity.
    #[arg(long = "start-period", default_value_t = 0)]
    pub start_period: u64,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// Lowest values of the b, g and vg bands, e.g. 0.3,0.6,0.9.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.6,0.9")]
    pub banding: Vec<String>,
    #[command(flatten)]
    pub params: ParamArgs,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args, stdout),
        Command::Eval(args) => cmd_eval(&args, stdout),
        Command::Compare(args) => cmd_compare(&args, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "trustnet: {e}");
            e.exit_code()
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

fn load_scenario(args: &SimulateArgs) -> Result<Scenario, CliError> {
    let text = read_input(&args.scenario)?;
    let input = |e: trustnet_core::simulator::ConfigError| {
        CliError::Input(format!("{}: {e}", args.scenario.display()))
    };
    let mut scenario = Scenario::from_json(&text).map_err(input)?;
    if let Some(k) = args.k {
        scenario.params.k = k;
    }
    if let Some(n) = args.n {
        scenario.params.n = n;
    }
    if let Some(td_th) = args.td_th {
        scenario.params.td_th = td_th;
    }
    if let Some(rv_th) = args.rv_th {
        scenario.params.rv_th = rv_th;
    }
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    scenario.validate().map_err(input)?;
    Ok(scenario)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Runs every replication and writes its outputs.
pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let scenario = load_scenario(args)?;
    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;

    let base_seed = scenario.seed;
    let results: Vec<Result<Vec<PathBuf>, CliError>> = pool.install(|| {
        (0..args.replications)
            .into_par_iter()
            .map(|r| {
                let mut replica = scenario.clone();
                replica.seed = base_seed.wrapping_add(u64::from(r));
                let report = run_scenario(&replica).map_err(|e| CliError::Input(e.to_string()))?;
                let mut written = Vec::new();
                if args.format.csv() {
                    let path = args.out.join(format!("report-r{r}.csv"));
                    write_file(&path, report.csv_string().as_bytes())?;
                    written.push(path);
                }
                if args.format.json() {
                    let path = args.out.join(format!("summary-r{r}.json"));
                    write_file(&path, report.summary_json().to_pretty().as_bytes())?;
                    written.push(path);
                }
                Ok(written)
            })
            .collect()
    });

    for result in results {
        for path in result? {
            let _ = writeln!(stdout, "wrote {}", path.display());
        }
    }
    Ok(())
}

fn load_trace(path: &Path) -> Result<TraceFile, CliError> {
    let text = read_input(path)?;
    TraceFile::parse(&text).map_err(|e| CliError::Input(format!("{}:{}: {}", path.display(), e.line, e.message)))
}

fn parse_tenths_list(items: &[String], what: &str) -> Result<Vec<TrustTenths>, CliError> {
    items
        .iter()
        .map(|s| s.parse().map_err(|e| CliError::Input(format!("--{what}: {e}"))))
        .collect()
}

fn replay(values: &[TrustTenths], recs: Option<&ReputationSample>, start_period: u64, params: &ModelParams) -> TrustState {
    let mut state = bootstrap(recs, params);
    if start_period > 0 {
        let td_gen = state.td_gen().unwrap_or(params.td_th);
        let rv = state.rv().unwrap_or(params.rv_th);
        state = TrustState::resume(td_gen, rv, start_period, params);
    }
    for &value in values {
        state.push_experience(value, params);
    }
    state
}

fn verdict_json(state: &TrustState, params: &ModelParams) -> Json {
    let verdict = evaluate(state, params);
    let mut json = state.to_json();
    if let Json::Object(map) = &mut json {
        map.insert("trustworthy".into(), Json::Bool(verdict.trustworthy));
        map.insert("risky".into(), Json::Bool(verdict.risky));
    }
    json
}

pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = args.params.params()?;
    let trace = match &args.trace {
        Some(path) => load_trace(path)?,
        None => TraceFile::default(),
    };
    let recs = match &args.recs {
        Some(items) => Some(ReputationSample::new(parse_tenths_list(items, "recs")?)),
        None => None,
    };
    let state = replay(&trace.values, recs.as_ref(), args.start_period, &params);
    let mut json = verdict_json(&state, &params);
    if let (Json::Object(map), Some(subject)) = (&mut json, &trace.subject) {
        map.insert("subject".into(), Json::str(subject));
    }
    stdout
        .write_all(json.to_pretty().as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

pub fn cmd_compare(args: &CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let params = args.params.params()?;
    let banding = match parse_tenths_list(&args.banding, "banding")?.as_slice() {
        &[b, g, vg] => Banding::new([b, g, vg]).map_err(|e| CliError::Input(format!("--banding: {e}")))?,
        other => return Err(CliError::Input(format!("--banding: expected 3 values, got {}", other.len()))),
    };
    let trace = load_trace(&args.trace)?;
    if trace.values.is_empty() {
        return Err(CliError::Input(format!("{}: trace has no values", args.trace.display())));
    }

    let risk = replay(&trace.values, None, 0, &params);

    let context = Context::from("trace");
    let subject = AgentId::from(trace.subject.clone().unwrap_or_else(|| "subject".to_string()));
    let mut direct = DirectTrustStore::new();
    for &value in &trace.values {
        direct.record_experience(&context, &subject, banding.degree_of(value));
    }
    let counters = *direct.counters(&context, &subject).expect("trace is non-empty");
    let degree = direct.degree(&context, &subject).expect("trace is non-empty");
    let count = |d: OrdinalDegree| Json::Int(counters.count(d) as i64);

    let json = Json::object([
        ("subject", Json::str(&subject)),
        ("risk_trust", verdict_json(&risk, &params)),
        (
            "arh",
            Json::object([
                ("direct_degree", Json::str(degree)),
                ("trustworthy", Json::Bool(degree.is_trustworthy())),
                (
                    "counters",
                    Json::object([
                        ("vg", count(OrdinalDegree::VeryGood)),
                        ("g", count(OrdinalDegree::Good)),
                        ("b", count(OrdinalDegree::Bad)),
                        ("vb", count(OrdinalDegree::VeryBad)),
                    ]),
                ),
                ("dump", Json::str(direct.dump().trim_end())),
            ]),
        ),
    ]);
    stdout
        .write_all(json.to_pretty().as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}
