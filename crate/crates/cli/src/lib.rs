//! Command-line front end: compose, run, scan, ensemble, verify.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a deviation above
//! tolerance, 2 for usage errors (bad flags, malformed network files,
//! unbound parameters, unreadable paths).

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use mzsim_core::dsl::{self, Program};
use mzsim_core::scan::{self, fmt15, EnsembleScan, ScanResult};
use mzsim_core::{verify, PhaseDistribution};

#[derive(Debug, Parser)]
#[command(
    name = "mzsim",
    version,
    about = "Two-mode transfer-matrix interferometer simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the composed transfer matrix and its unitarity residual
    Compose(NetArgs),
    /// Apply the network to its declared input and print the outputs
    Run(NetArgs),
    /// Sweep one parameter and emit param,i_a,i_b,r
    Scan(ScanArgs),
    /// Average the coincidence rate under random phase noise on the
    /// swept parameter, emitting param,mean_r,std_error,samples
    Ensemble(EnsembleArgs),
    /// Cross-check composed networks against closed-form results
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// Network description file (.mzn)
    #[arg(long, value_name = "FILE")]
    pub network: PathBuf,
    /// Bind a parameter, e.g. PHI=pi/4 (repeatable)
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Parameter to sweep: NAME [LO HI [STEPS]]; bounds accept the same
    /// forms as --set values and default to 0 2*pi with 1000 steps
    #[arg(long, num_args = 1..=4, value_name = "NAME [LO HI [STEPS]]")]
    pub scan: Vec<String>,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Parameter to sweep and randomize: NAME [LO HI [STEPS]]; defaults
    /// to 0 2*pi with 64 steps
    #[arg(long, num_args = 1..=4, value_name = "NAME [LO HI [STEPS]]")]
    pub scan: Vec<String>,
    /// Noise distribution: uniform:LO,HI | delta:T | discrete:T1,W1;T2,W2
    #[arg(long, value_name = "SPEC")]
    pub dist: String,
    /// Draws per grid point
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Ensemble seed; grid points derive independent sub-seeds from it
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub out: OutFormat,
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Longest chain to check (n = 1..=max-n)
    #[arg(long = "max-n", default_value_t = 8, value_name = "N")]
    pub max_n: u32,
}

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or unusable inputs; exit code 2.
    Usage(String),
    /// A verify check exceeded tolerance; exit code 1.
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::VerifyFailed => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::VerifyFailed => write!(f, "verification failed"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T> = Result<T, CliError>;

fn load_program(path: &Path) -> CliResult<Program> {
    let source = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    dsl::parse(&source).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_bindings(set: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut bindings = BTreeMap::new();
    for entry in set {
        let (name, value) = entry
            .split_once('=')
            .ok_or_else(|| usage(format!("--set needs NAME=VALUE, got `{entry}`")))?;
        let value = dsl::parse_number(value)
            .map_err(|e| usage(format!("--set {name}: {e}")))?;
        if bindings.insert(name.to_string(), value).is_some() {
            return Err(usage(format!("--set {name} given twice")));
        }
    }
    Ok(bindings)
}

struct ScanSpec {
    name: String,
    grid: Vec<f64>,
}

fn parse_scan_spec(values: &[String], default_steps: usize) -> CliResult<ScanSpec> {
    let (name, lo, hi, steps) = match values {
        [name] => (name, 0.0, TAU, default_steps),
        [name, lo, hi] => (
            name,
            parse_bound(lo)?,
            parse_bound(hi)?,
            default_steps,
        ),
        [name, lo, hi, steps] => {
            let steps: usize = steps
                .parse()
                .map_err(|_| usage(format!("--scan steps must be an integer, got `{steps}`")))?;
            (name, parse_bound(lo)?, parse_bound(hi)?, steps)
        }
        [] => return Err(usage("--scan needs a parameter name")),
        _ => return Err(usage("--scan takes NAME [LO HI [STEPS]]")),
    };
    let grid = scan::grid(lo, hi, steps).map_err(|e| usage(format!("--scan: {e}")))?;
    Ok(ScanSpec {
        name: name.clone(),
        grid,
    })
}

fn parse_bound(text: &str) -> CliResult<f64> {
    dsl::parse_number(text).map_err(|e| usage(format!("--scan bound: {e}")))
}

/// Parse `uniform:LO,HI | delta:T | discrete:T1,W1;T2,W2`.
pub fn parse_dist(spec: &str) -> CliResult<PhaseDistribution> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("--dist needs KIND:ARGS, got `{spec}`")))?;
    let num = |s: &str| {
        dsl::parse_number(s).map_err(|e| usage(format!("--dist {kind}: {e}")))
    };
    let dist = match kind {
        "uniform" => {
            let (lo, hi) = args
                .split_once(',')
                .ok_or_else(|| usage("--dist uniform needs LO,HI"))?;
            PhaseDistribution::uniform(num(lo)?, num(hi)?)
        }
        "delta" => PhaseDistribution::delta(num(args)?),
        "discrete" => {
            let mut points = Vec::new();
            for pair in args.split(';') {
                let (theta, w) = pair
                    .split_once(',')
                    .ok_or_else(|| usage("--dist discrete needs THETA,WEIGHT pairs"))?;
                points.push((num(theta)?, num(w)?));
            }
            PhaseDistribution::discrete(points)
        }
        other => return Err(usage(format!("unknown distribution `{other}`"))),
    };
    dist.map_err(|e| usage(e.to_string()))
}

/// Write to stdout, treating a closed pipe as a normal early exit so
/// `mzsim scan | head` ends quietly instead of panicking.
fn write_stdout(text: &str) -> CliResult<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(usage(format!("cannot write to stdout: {e}"))),
    }
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => write_stdout(text),
    }
}

fn cmd_compose(args: &NetArgs) -> CliResult<String> {
    let program = load_program(&args.network)?;
    let bindings = parse_bindings(&args.set)?;
    let network = program.bind(&bindings).map_err(|e| usage(e.to_string()))?;
    let m = network.matrix();
    let mut out = String::new();
    for (label, entry) in [
        ("m11", m.m11),
        ("m12", m.m12),
        ("m21", m.m21),
        ("m22", m.m22),
    ] {
        writeln!(out, "{label} = {} {}", fmt15(entry.re), fmt15(entry.im)).unwrap();
    }
    writeln!(out, "unitarity_residual = {}", fmt15(m.unitarity_residual())).unwrap();
    Ok(out)
}

fn cmd_run(args: &NetArgs) -> CliResult<String> {
    let program = load_program(&args.network)?;
    let bindings = parse_bindings(&args.set)?;
    let network = program.bind(&bindings).map_err(|e| usage(e.to_string()))?;
    let out_field = network.output();
    let (i_a, i_b) = out_field.intensities();
    let norm = mzsim_core::observables::rate_norm(&network.input());
    let r = if norm == 0.0 { 0.0 } else { i_a * i_b / norm };
    let mut out = String::new();
    writeln!(
        out,
        "out_upper = {} {}",
        fmt15(out_field.upper.re),
        fmt15(out_field.upper.im)
    )
    .unwrap();
    writeln!(
        out,
        "out_lower = {} {}",
        fmt15(out_field.lower.re),
        fmt15(out_field.lower.im)
    )
    .unwrap();
    writeln!(out, "i_a = {}", fmt15(i_a)).unwrap();
    writeln!(out, "i_b = {}", fmt15(i_b)).unwrap();
    writeln!(out, "r = {}", fmt15(r)).unwrap();
    Ok(out)
}

fn cmd_scan(args: &ScanArgs) -> CliResult<()> {
    let program = load_program(&args.net.network)?;
    let bindings = parse_bindings(&args.net.set)?;
    let spec = parse_scan_spec(&args.scan, 1000)?;
    let result: ScanResult = scan::scan_program(&program, &bindings, &spec.name, &spec.grid)
        .map_err(|e| usage(e.to_string()))?;
    let text = match args.out {
        OutFormat::Csv => result.to_csv(),
        OutFormat::Json => result.to_json(),
    };
    emit(&text, args.output.as_deref())
}

fn cmd_ensemble(args: &EnsembleArgs) -> CliResult<()> {
    let program = load_program(&args.net.network)?;
    let bindings = parse_bindings(&args.net.set)?;
    let spec = parse_scan_spec(&args.scan, 64)?;
    let dist = parse_dist(&args.dist)?;
    let result: EnsembleScan = scan::ensemble_program(
        &program,
        &bindings,
        &spec.name,
        &spec.grid,
        &dist,
        args.samples,
        args.seed,
    )
    .map_err(|e| usage(e.to_string()))?;
    let text = match args.out {
        OutFormat::Csv => result.to_csv(),
        OutFormat::Json => result.to_json(),
    };
    emit(&text, args.output.as_deref())
}

fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    if args.max_n < 1 {
        return Err(usage("--max-n must be at least 1"));
    }
    let checks = verify::run_all(args.max_n).map_err(|e| usage(e.to_string()))?;
    let mut report = String::new();
    let mut worst = 0.0f64;
    let mut all_passed = true;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            report,
            "{:<10} max|dev| = {:>10.3e}  {status}  {}",
            c.label, c.max_dev, c.description
        )
        .unwrap();
        worst = worst.max(c.max_dev);
        all_passed &= c.passed();
    }
    writeln!(
        report,
        "verify: {} ({} checks, n up to {}, max deviation {:.3e}, tolerance 1e-12)",
        if all_passed { "PASS" } else { "FAIL" },
        checks.len(),
        args.max_n,
        worst
    )
    .unwrap();
    write_stdout(&report)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Compose(args) => write_stdout(&cmd_compose(args)?),
        Command::Run(args) => write_stdout(&cmd_run(args)?),
        Command::Scan(args) => cmd_scan(args),
        Command::Ensemble(args) => cmd_ensemble(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
