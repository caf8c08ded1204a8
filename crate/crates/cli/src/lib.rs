//! The `xorsat2` command-line front end.
//!
//! [`run`] parses arguments, dispatches a subcommand and returns the process
//! exit code: 0 on success, 1 when a verification check or a computation
//! fails, 2 for usage errors.

pub mod grid;
pub mod rows;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use xorsat2::enumeration::{self, CountTable};
use xorsat2::montecarlo::{self, McError, Method};
use xorsat2::sequences;
use xorsat2::theory::{self, TheoryError};
use xorsat2::verify::{self, Fault, Suite};
use xorsat2::sampler::ModelError;
use xorsat2::{ModelKind, ModelSpec, SeedSpec};

pub use grid::{parse_grid, GridError};
pub use rows::{SimulateRow, TheoryRow, SIMULATE_HEADER, THEORY_HEADER};

/// Largest `n` accepted by `enumerate --kind connected`.
pub const MAX_RECURRENCE_N: usize = 100;
/// Highest index written by `verify --out`.
pub const DUMP_MAX_INDEX: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "xorsat2", version, about = "Solvability of random 2-XORSAT systems: theory, simulation, enumeration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical-window predictions c(λ), c₁(λ) and n^{-1/12} c(λ) as CSV.
    Theory(TheoryArgs),
    /// Monte Carlo estimate of the solvability probability as CSV.
    Simulate(SimulateArgs),
    /// Exact graph counts as CSV.
    Enumerate(EnumerateArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Sizes {
    /// Number of vertices.
    #[arg(long, conflicts_with = "grid_n")]
    pub n: Option<usize>,
    /// List of vertex counts, e.g. `10000,1000000` or `1000:5000:1000`.
    #[arg(long)]
    pub grid_n: Option<String>,
    /// Window parameter λ.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "grid_lambda")]
    pub lambda: Option<f64>,
    /// List of λ values, e.g. `-2,0,2` or `-10:6:0.25`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub sizes: Sizes,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "gnp")]
    pub model: ModelKind,
    #[command(flatten)]
    pub sizes: Sizes,
    /// Label bias p̂ = Pr(b_e = 1).
    #[arg(long, default_value_t = 0.5)]
    pub phat: f64,
    #[arg(long)]
    pub samples: u64,
    /// Master seed; block k of a run uses stream k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// indicator, rao_blackwell or max_excess.
    #[arg(long, default_value = "rao_blackwell")]
    pub method: Method,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumerateKind {
    /// Connected graphs by the edge-insertion recurrence.
    Connected,
    /// Connected graphs by brute force.
    ConnectedBrute,
    /// Connected graphs whose cycles all have even length.
    ConnectedEven,
    /// Minimum number of even-length paths over labelled trees.
    Trees,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, value_enum, default_value = "connected")]
    pub kind: EnumerateKind,
    /// Largest number of vertices.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suites to run (all when absent): graph, xorsat, sequences, special,
    /// theory, enumeration, montecarlo.
    #[arg(long, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    /// Also write the exact sequence tables as `kind,index,num/den` lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Corrupt a table before checking it, to exercise the failure path.
    #[arg(long, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
    #[error(transparent)]
    Enumeration(#[from] enumeration::EnumError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{failed} verification checks failed")]
    Verification { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Grid(_)
            | CliError::Model(_)
            | CliError::MonteCarlo(_)
            | CliError::Enumeration(_) => 2,
            CliError::Io(_) | CliError::Verification { .. } => 1,
        }
    }
}

impl Sizes {
    fn ns(&self) -> Result<Vec<usize>, CliError> {
        match (self.n, &self.grid_n) {
            (Some(n), _) => Ok(vec![n]),
            (None, Some(g)) => Ok(parse_grid(g)?),
            (None, None) => Err(CliError::Usage("one of --n or --grid-n is required".into())),
        }
    }

    fn lambdas(&self) -> Result<Vec<f64>, CliError> {
        let ls = match (self.lambda, &self.grid_lambda) {
            (Some(l), _) => vec![l],
            (None, Some(g)) => parse_grid(g)?,
            (None, None) => vec![0.0],
        };
        if let Some(bad) = ls.iter().find(|l| !l.is_finite()) {
            return Err(CliError::Usage(format!("lambda must be finite, got {bad}")));
        }
        Ok(ls)
    }
}

fn output(path: &Option<PathBuf>, stdout: &mut dyn Write, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(body.as_bytes())?;
            w.flush()?;
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn theory_row(n: usize, lambda: f64) -> Result<TheoryRow, TheoryError> {
    let half = theory::critical_prediction(n, lambda, 0.5)?;
    let ones = theory::critical_prediction(n, lambda, 1.0)?;
    Ok(TheoryRow {
        lambda,
        c: theory::c_lambda(lambda)?,
        c1: theory::c1_lambda(lambda)?,
        n,
        prediction_half: half.value,
        prediction_ones: ones.value,
    })
}

pub fn cmd_theory(args: &TheoryArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let ns = args.sizes.ns()?;
    let lambdas = args.sizes.lambdas()?;
    let mut body = format!("{THEORY_HEADER}\n");
    for &lambda in &lambdas {
        for &n in &ns {
            match theory_row(n, lambda) {
                Ok(row) => {
                    body.push_str(&row.to_csv());
                    body.push('\n');
                }
                // reported and skipped, the remaining rows still print
                Err(e) => writeln!(stderr, "skipped lambda={lambda} n={n}: {e}")?,
            }
        }
    }
    output(&args.out, stdout, &body)
}

fn simulate_row(args: &SimulateArgs, n: usize, lambda: f64, stderr: &mut dyn Write) -> Result<SimulateRow, CliError> {
    let spec = ModelSpec::new(args.model, n, lambda, args.phat)?;
    let seed = SeedSpec::new(args.seed, 0);
    let est = montecarlo::estimate_solvability(&spec, args.samples, seed, args.method)?;
    let prediction = match args.method {
        Method::MaxExcess => None,
        _ => theory::critical_prediction(n, lambda, args.phat).ok(),
    };
    let (theory, ratio, z) = match prediction {
        Some(p) => {
            let c = montecarlo::compare_to_theory(&est, &p);
            (p.value, c.ratio, c.z.unwrap_or(f64::NAN))
        }
        None => (f64::NAN, f64::NAN, f64::NAN),
    };
    if args.method == Method::Indicator {
        let (lo, hi) = est.wilson_interval(1.96);
        writeln!(
            stderr,
            "wilson95 n={n} lambda={} lower={} upper={}",
            rows::float(lambda),
            rows::float(lo),
            rows::float(hi)
        )?;
    }
    Ok(SimulateRow {
        model: args.model,
        n,
        lambda,
        phat: args.phat,
        method: args.method,
        samples: est.samples,
        seed: args.seed,
        mean: est.mean,
        stderr: est.stderr,
        theory,
        ratio,
        z,
    })
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if args.samples == 0 {
        return Err(McError::NoSamples.into());
    }
    let ns = args.sizes.ns()?;
    let lambdas = args.sizes.lambdas()?;
    let mut body = format!("{SIMULATE_HEADER}\n");
    for &lambda in &lambdas {
        for &n in &ns {
            body.push_str(&simulate_row(args, n, lambda, stderr)?.to_csv());
            body.push('\n');
        }
    }
    output(&args.out, stdout, &body)
}

fn count_table(kind: EnumerateKind, n: usize) -> Result<CountTable, CliError> {
    Ok(match kind {
        EnumerateKind::Connected => {
            if n > MAX_RECURRENCE_N {
                return Err(CliError::Usage(format!("--n must be at most {MAX_RECURRENCE_N}")));
            }
            enumeration::count_connected(n)
        }
        EnumerateKind::ConnectedBrute => enumeration::count_connected_brute(n)?,
        EnumerateKind::ConnectedEven => enumeration::count_connected_even(n)?,
        EnumerateKind::Trees => unreachable!("trees have their own table"),
    })
}

pub fn cmd_enumerate(args: &EnumerateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let body = if args.kind == EnumerateKind::Trees {
        if args.n < 2 {
            return Err(CliError::Usage("trees need --n of at least 2".into()));
        }
        let mut body = String::from("n,trees,min_even_paths,attained_by_path,bound_holds\n");
        for n in 2..=args.n {
            let c = enumeration::tree_census(n)?;
            body.push_str(&format!(
                "{},{},{},{},{}\n",
                c.n, c.trees, c.min_even_paths, c.attained_by_path, c.bound_holds
            ));
        }
        body
    } else {
        count_table(args.kind, args.n)?.to_csv()
    };
    output(&args.out, stdout, &body)
}

fn sequence_dump() -> String {
    let mut body = String::from("kind,index,value\n");
    let tables = [
        sequences::epsilon_seq(DUMP_MAX_INDEX),
        sequences::f_seq(DUMP_MAX_INDEX),
        sequences::wright_c_seq(DUMP_MAX_INDEX),
    ];
    for t in &tables {
        for line in t.to_fraction_lines().lines() {
            body.push_str(&format!("{},{line}\n", t.kind()));
        }
    }
    body
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let report = verify::run(&args.suite, args.inject_fault);
    stdout.write_all(report.render().as_bytes())?;
    if let Some(path) = &args.out {
        output(&Some(path.clone()), stdout, &sequence_dump())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification { failed: report.failures() })
    }
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Theory(a) => cmd_theory(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout, stderr),
        Command::Enumerate(a) => cmd_enumerate(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
