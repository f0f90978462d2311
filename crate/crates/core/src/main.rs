use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use oplab::error::Error;
use oplab::harness::{self, OutputFormat, RunConfig};
use oplab::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix, PsdMatrix, ToleranceConfig};
use oplab::means::{geometric_mean, MeanWeight};
use oplab::verify::registry::{lookup, ExponentOverrides, CASES};
use oplab::verify::remark::{replay, search_remark_counterexample, CounterexampleBundle, SearchGrid};

#[derive(Parser)]
#[command(name = "oplab", version, about = "Randomized verification of matrix and operator inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case over the trial grid.
    Check {
        /// Case id (see `suite --list`).
        case: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every registered case, or the ones given with --cases.
    Suite {
        /// Comma-separated case ids.
        #[arg(long, value_delimiter = ',')]
        cases: Vec<String>,
        /// Print the registered cases and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Weighted geometric mean of two matrices read from JSON files.
    Mean {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, env = "OPLAB_TOL")]
        tol: Option<f64>,
    },
    /// Grid search for the instance where the unitary cannot be dropped.
    Counterexample {
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long = "p", value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long = "q", value_delimiter = ',')]
        q: Vec<f64>,
        /// Bundle file to write (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-evaluate a previously written bundle instead of searching.
        #[arg(long, conflicts_with_all = ["eps", "p", "q"])]
        replay: Option<PathBuf>,
        #[arg(long, env = "OPLAB_TOL")]
        tol: Option<f64>,
    },
    /// Eigenvalues and eigenvectors of a Hermitian matrix read from a JSON file.
    Eig {
        file: PathBuf,
        #[arg(long, env = "OPLAB_TOL")]
        tol: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, env = "OPLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Comma-separated dimensions.
    #[arg(long, alias = "dim", env = "OPLAB_DIMS", value_delimiter = ',', default_value = "2,3,4,5,6")]
    dims: Vec<usize>,
    #[arg(long, env = "OPLAB_TRIALS", default_value_t = 200)]
    trials: u64,
    /// Loewner slack τ_psd.
    #[arg(long, env = "OPLAB_TOL")]
    tol: Option<f64>,
    #[arg(long, env = "OPLAB_TAU_EIG")]
    tau_eig: Option<f64>,
    #[arg(long, env = "OPLAB_TAU_ID")]
    tau_id: Option<f64>,
    #[arg(long, value_enum, env = "OPLAB_FORMAT", default_value = "json")]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, env = "OPLAB_JOBS")]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the wall-clock field from the header record.
    #[arg(long)]
    no_timestamp: bool,
    #[arg(long = "p")]
    p: Option<f64>,
    #[arg(long = "q")]
    q: Option<f64>,
    #[arg(long = "r")]
    r: Option<f64>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Precondition(_) | Error::Tolerance(_) | Error::Io(_) => 2,
            Error::NonFinite { .. } | Error::Shape(_) | Error::NotHermitian { .. } | Error::NotPsd { .. } => 2,
            ref other => harness::error_exit_code(other) as u8,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

type CliResult = Result<u8, Failure>;

fn tolerances(tol: Option<f64>, tau_eig: Option<f64>, tau_id: Option<f64>) -> Result<ToleranceConfig, Error> {
    let d = ToleranceConfig::default();
    let t = ToleranceConfig { tau_psd: tol.unwrap_or(d.tau_psd), tau_eig: tau_eig.unwrap_or(d.tau_eig), tau_id: tau_id.unwrap_or(d.tau_id) };
    t.validate()?;
    Ok(t)
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_cases(cases: Vec<String>, args: RunArgs) -> CliResult {
    let cfg = RunConfig {
        seed: args.seed,
        dims: args.dims,
        trials: args.trials,
        tolerances: tolerances(args.tol, args.tau_eig, args.tau_id)?,
        cases,
        format: match args.format {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        },
        jobs: args.jobs,
        overrides: ExponentOverrides { p: args.p, q: args.q, r: args.r },
        timestamp: !args.no_timestamp,
    };
    if args.jobs == Some(0) {
        return Err(Failure { code: 2, message: "--jobs must be at least 1".into() });
    }
    let res = harness::run(&cfg)?;
    let mut out = sink(&args.out)?;
    harness::write_output(&cfg, &res, &mut out)?;
    out.flush()?;
    Ok(res.exit_code as u8)
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn print_json<T: serde::Serialize>(v: &T) -> CliResult {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, v).map_err(Error::from)?;
    writeln!(out)?;
    Ok(0)
}

fn cmd_mean(a: &Path, b: &Path, alpha: f64, tol: Option<f64>) -> CliResult {
    let tol = tolerances(tol, None, None)?;
    let a = PsdMatrix::from_matrix(read_matrix(a)?, &tol)?;
    let b = PsdMatrix::from_matrix(read_matrix(b)?, &tol)?;
    let g = geometric_mean(&a, &b, MeanWeight::new(alpha)?, &tol).map_err(|e| match e {
        Error::Singular(m) => Failure { code: 3, message: m },
        other => other.into(),
    })?;
    print_json(g.as_matrix())
}

fn cmd_counterexample(grid: SearchGrid, out: Option<PathBuf>, replay_from: Option<PathBuf>, tol: Option<f64>) -> CliResult {
    if let Some(path) = replay_from {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let bundle: CounterexampleBundle = serde_json::from_str(&text).map_err(Error::from)?;
        let pt = replay(&bundle)?;
        print_json(&pt)?;
        return Ok(if pt.violates() { 0 } else { 4 });
    }
    let tol = tolerances(tol, None, None)?;
    match search_remark_counterexample(&grid, &tol) {
        Ok((bundle, _)) => {
            let mut w = sink(&out)?;
            serde_json::to_writer_pretty(&mut w, &bundle).map_err(Error::from)?;
            writeln!(w)?;
            w.flush()?;
            Ok(0)
        }
        Err(Error::SearchExhausted { best_gap }) => {
            eprintln!("search exhausted; best gap {best_gap:.6e}");
            Ok(4)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(serde::Serialize)]
struct EigOutput {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

fn cmd_eig(file: &Path, tol: Option<f64>) -> CliResult {
    let tol = tolerances(tol, None, None)?;
    let h = HermitianMatrix::new(read_matrix(file)?)?;
    let e = eig_hermitian(&h, &tol)?;
    print_json(&EigOutput { eigenvalues: e.eigenvalues.values().to_vec(), eigenvectors: e.eigenvectors })
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Check { case, run } => {
            if lookup(&case).is_err() {
                let known: Vec<&str> = CASES.iter().map(|c| c.id).collect();
                return Err(Failure { code: 2, message: format!("unknown case {case:?}; known cases: {}", known.join(", ")) });
            }
            run_cases(vec![case], run)
        }
        Command::Suite { cases, list, run } => {
            if list {
                for c in CASES {
                    println!("{:<12} {}", c.id, c.summary);
                }
                return Ok(0);
            }
            let cases = if cases.is_empty() { CASES.iter().map(|c| c.id.to_string()).collect() } else { cases };
            run_cases(cases, run)
        }
        Command::Mean { a, b, alpha, tol } => cmd_mean(&a, &b, alpha, tol),
        Command::Counterexample { eps, p, q, out, replay, tol } => {
            let d = SearchGrid::default();
            let grid = SearchGrid {
                eps: if eps.is_empty() { d.eps } else { eps },
                p: if p.is_empty() { d.p } else { p },
                q: if q.is_empty() { d.q } else { q },
            };
            cmd_counterexample(grid, out, replay, tol)
        }
        Command::Eig { file, tol } => cmd_eig(&file, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == 2 {
                eprintln!("run `oplab --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
