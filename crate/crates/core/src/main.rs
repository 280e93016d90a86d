use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adhoc_secrecy::experiments::{run, ExperimentKind, ExperimentSpec, FULL_ROUNDS};
use adhoc_secrecy::{Error, Scenario};
use clap::{Args, CommandFactory, Parser, Subcommand};

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_UNREACHABLE: u8 = 3;

/// Outage analysis and Monte Carlo experiments for jammer-protected
/// multi-hop links. Every subcommand writes CSV.
#[derive(Parser, Debug)]
#[command(name = "adhoc-secrecy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Path COP: Monte Carlo estimate against the closed form over a lambda_j x d grid.
    ValidateCop(Common),
    /// Path SOP: Monte Carlo estimate against the closed-form bound over a lambda_e x lambda_j grid.
    ValidateSop(Common),
    /// Closed-form (COP, SOP) pairs along a transmit power list.
    TradeoffCurve(Common),
    /// Optimal outage and optimal per-hop power against the outage budget.
    OptimalTradeoff(Common),
    /// Optimal powers for a fixed path (table1, table2, or --distances).
    TableFixture(Common),
    /// Random scenario, shortest route and optimal powers for both problems.
    RouteDemo(Common),
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::ValidateCop(c) => (ExperimentKind::ValidateCop, c),
            Command::ValidateSop(c) => (ExperimentKind::ValidateSop, c),
            Command::TradeoffCurve(c) => (ExperimentKind::TradeoffCurve, c),
            Command::OptimalTradeoff(c) => (ExperimentKind::OptimalTradeoff, c),
            Command::TableFixture(c) => (ExperimentKind::TableFixture, c),
            Command::RouteDemo(c) => (ExperimentKind::RouteDemo, c),
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for the Monte Carlo batches.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo rounds per grid point (default 1000000).
    #[arg(long)]
    rounds: Option<u64>,
    /// Use 10^7 rounds per grid point unless --rounds is given.
    #[arg(long)]
    paper_scale: bool,
    /// Side of the square simulation window.
    #[arg(long)]
    window: Option<f64>,

    #[arg(long, value_delimiter = ',')]
    lambda_j: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    lambda_e: Vec<f64>,
    #[arg(long)]
    gamma_c: Option<f64>,
    #[arg(long)]
    gamma_e: Option<f64>,
    #[arg(long)]
    p_jam: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,

    /// Hop distances of the uniform paths.
    #[arg(long, value_delimiter = ',')]
    link_distance: Vec<f64>,
    #[arg(long)]
    hops: Option<usize>,
    /// Per-hop transmit power of the validation paths.
    #[arg(long)]
    power: Option<f64>,
    /// Power list of the tradeoff curve.
    #[arg(long, value_delimiter = ',')]
    powers: Vec<f64>,
    /// Outage budgets swept by optimal-tradeoff.
    #[arg(long, value_delimiter = ',')]
    betas: Vec<f64>,
    /// SOP level at which tradeoff-curve reports the COP.
    #[arg(long)]
    anchor_sop: Option<f64>,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, value_delimiter = ',')]
    distances: Vec<f64>,
    #[arg(long)]
    beta_so: Option<f64>,
    #[arg(long)]
    beta_co: Option<f64>,
    #[arg(long)]
    max_range: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    /// Replay a saved scenario instead of generating one.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Where route-demo saves its scenario (default: `<out>.scenario`).
    #[arg(long)]
    scenario_out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CrossCheck(_) | Error::Io(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    match execute(argv) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn parse(argv: &[OsString]) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        if e.use_stderr() {
            ExitCode::from(EXIT_USAGE)
        } else {
            ExitCode::SUCCESS
        }
    })
}

fn execute(argv: Vec<OsString>) -> Result<ExitCode, Failure> {
    let mut cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(code) => return Ok(code),
    };
    if let Some(path) = &cli.command.parts().1.config {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("reading {}: {e}", path.display())))?;
        let merged = merge_config(&argv, &text)?;
        cli = match parse(&merged) {
            Ok(cli) => cli,
            Err(code) => return Ok(code),
        };
    }
    let (kind, common) = cli.command.parts();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let spec = build_spec(kind, common)?;
    let output = run(&spec)?;

    match &common.out {
        Some(path) => write(path, &output.csv)?,
        None => print!("{}", output.csv),
    }
    if let Some(text) = &output.scenario {
        let target = common
            .scenario_out
            .clone()
            .or_else(|| common.out.as_ref().map(|p| with_suffix(p, ".scenario")));
        if let Some(path) = target {
            write(&path, text)?;
        }
    }
    if output.unreachable {
        eprintln!(
            "destination unreachable within max range {}",
            spec.max_range
        );
        return Ok(ExitCode::from(EXIT_UNREACHABLE));
    }
    Ok(ExitCode::SUCCESS)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Appends `--key value` for every config entry whose flag is absent from
/// the command line.
fn merge_config(argv: &[OsString], text: &str) -> Result<Vec<OsString>, Failure> {
    let sub = argv
        .get(1)
        .and_then(|s| s.to_str())
        .ok_or_else(|| Failure::Usage("missing subcommand".into()))?;
    let cmd = Cli::command();
    let sub_cmd = cmd
        .find_subcommand(sub)
        .ok_or_else(|| Failure::Usage(format!("unknown subcommand {sub}")))?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut merged = argv.to_vec();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!("config line {}: expected `key = value`", n + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value
            .split(',')
            .map(str::trim)
            .collect::<Vec<_>>()
            .join(",");
        let value = value.as_str();
        let arg = sub_cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| Failure::Usage(format!("config line {}: unknown key {key:?}", n + 1)))?;
        if key == "config" {
            return Err(Failure::Usage(format!(
                "config line {}: nested config files are not supported",
                n + 1
            )));
        }
        if given.contains(&key) {
            continue;
        }
        if arg.get_action().takes_values() {
            merged.push(format!("--{key}").into());
            merged.push(value.into());
        } else {
            match value {
                "true" => merged.push(format!("--{key}").into()),
                "false" => {}
                other => {
                    return Err(Failure::Usage(format!(
                        "config line {}: {key} expects true or false, got {other:?}",
                        n + 1
                    )))
                }
            }
        }
    }
    Ok(merged)
}

fn single(field: &str, values: &[f64]) -> Result<Option<f64>, Failure> {
    match values {
        [] => Ok(None),
        [v] => Ok(Some(*v)),
        _ => Err(Failure::Usage(format!(
            "--{field} takes a single value for this experiment"
        ))),
    }
}

fn build_spec(kind: ExperimentKind, c: &Common) -> Result<ExperimentSpec, Failure> {
    let mut spec = ExperimentSpec::new(kind);
    let (sweeps_j, sweeps_e) = match kind {
        ExperimentKind::ValidateCop => (true, false),
        ExperimentKind::ValidateSop | ExperimentKind::OptimalTradeoff => (true, true),
        _ => (false, false),
    };

    let mut base = spec.base;
    if sweeps_j {
        if !c.lambda_j.is_empty() {
            spec.lambda_j = c.lambda_j.clone();
        }
    } else if let Some(v) = single("lambda-j", &c.lambda_j)? {
        base = base.with_lambda_j(v)?;
    }
    if sweeps_e {
        if !c.lambda_e.is_empty() {
            spec.lambda_e = c.lambda_e.clone();
        }
    } else if let Some(v) = single("lambda-e", &c.lambda_e)? {
        base = base.with_lambda_e(v)?;
    }
    if let Some(v) = c.gamma_c {
        base = base.with_gamma_c(v)?;
    }
    if let Some(v) = c.gamma_e {
        base = base.with_gamma_e(v)?;
    }
    if let Some(v) = c.p_jam {
        base = base.with_p_jam(v)?;
    }
    if let Some(v) = c.alpha {
        base = base.with_alpha(v)?;
    }
    spec.base = base;

    spec.seed = c.seed;
    spec.rounds = match (c.rounds, c.paper_scale) {
        (Some(r), _) => r,
        (None, true) => FULL_ROUNDS,
        (None, false) => spec.rounds,
    };
    if let Some(v) = c.window {
        spec.window = v;
    }
    if !c.link_distance.is_empty() {
        spec.link_distances = c.link_distance.clone();
    }
    if let Some(v) = c.hops {
        spec.hops = v;
    }
    if let Some(v) = c.power {
        spec.power = v;
    }
    if !c.powers.is_empty() {
        spec.powers = c.powers.clone();
    }
    if !c.betas.is_empty() {
        spec.betas = c.betas.clone();
    }
    if let Some(v) = c.anchor_sop {
        spec.anchor_sop = v;
    }
    spec.fixture = c.fixture.clone();
    if !c.distances.is_empty() {
        spec.distances = Some(c.distances.clone());
    }
    spec.beta_so = c.beta_so;
    spec.beta_co = c.beta_co;
    if let Some(v) = c.max_range {
        spec.max_range = v;
    }
    if let Some(v) = c.nodes {
        spec.nodes = v;
    }
    if let Some(v) = c.width {
        spec.width = v;
    }
    if let Some(v) = c.height {
        spec.height = v;
    }
    if let Some(path) = &c.scenario {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::Runtime(format!("reading {}: {e}", path.display())))?;
        spec.scenario = Some(Scenario::from_text(&text)?);
    }
    Ok(spec)
}
