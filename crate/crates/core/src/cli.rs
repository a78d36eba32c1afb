//! The `hwext` command line: certify, extend, sweep and counterexample runs
//! writing JSON reports and CSV tables into an output directory.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::certify::{certify, default_pair_grid, DEFAULT_MAX_PAIRS};
use crate::counterexample::{build, verify_bounds, write_rn_csv};
use crate::discrepancy::{sweep, write_sweep_csv};
use crate::error::Error;
use crate::jet::Job;
use crate::lift::{assemble_with, AssembleOptions};
use crate::modulus::Modulus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_ASSEMBLY: i32 = 4;
pub const EXIT_VERIFICATION: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "hwext", version, about = "Horizontal Whitney extension in the Heisenberg group")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the three extension conditions; writes cert_report.json and worst_pairs.csv.
    Certify(JobArgs),
    /// Build and verify a horizontal extension; writes curve.csv, verification.json and gaps.json.
    Extend(ExtendArgs),
    /// Tabulate A, V_omega and V_one over the pair grid; writes pairs.csv.
    Sweep(JobArgs),
    /// Generate the dyadic counterexample; writes rn.csv and bounds.json.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// Job file (JSON).
    #[arg(long)]
    pub job: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Maximum number of pairs in the certification grid.
    #[arg(long, default_value_t = DEFAULT_MAX_PAIRS)]
    pub pairs: usize,
    /// Seed for the random part of the pair grid.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub job: JobArgs,
    /// Tolerance on the relative horizontality residual of the assembled curve.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Number of uniform points in the curve dump.
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Jet order.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// `linear`, `log_lipschitz`, `power:<alpha>` or a modulus JSON object.
    #[arg(long, default_value = "linear")]
    pub omega: OmegaArg,
    /// Index of the last interval.
    #[arg(long, default_value_t = 12)]
    pub nmax: usize,
    /// Hölder exponent applied to omega, in [1/2, 1].
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct OmegaArg(pub Modulus);

impl FromStr for OmegaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parsed = match s {
            "linear" => Ok(Modulus::linear()),
            "log_lipschitz" => Ok(Modulus::log_lipschitz()),
            _ if s.trim_start().starts_with('{') => serde_json::from_str(s).map_err(|e| e.to_string()),
            _ => match s.strip_prefix("power:") {
                Some(a) => {
                    let alpha: f64 = a.parse().map_err(|e| format!("bad exponent {a:?}: {e}"))?;
                    Modulus::power(alpha).map_err(|e| e.to_string())
                }
                None => Err(format!("unknown modulus {s:?}")),
            },
        };
        parsed.map(OmegaArg)
    }
}

/// A failed run: exit code plus a one-line reason.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub detail: String,
}

impl Failure {
    /// `error: kind=<kind> detail=<detail>` on one line.
    pub fn line(&self) -> String {
        format!("error: kind={} detail={}", self.kind, self.detail.replace('\n', " "))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Schema(_) | Error::Json(_) => (EXIT_SCHEMA, "schema"),
            Error::Domain(_) => (EXIT_SCHEMA, "domain"),
            Error::Certification { .. } => (EXIT_CERTIFICATION, "certification"),
            Error::Construction(_) | Error::Numerical(_) | Error::Degenerate(_) | Error::Internal(_) => {
                (EXIT_ASSEMBLY, "assembly")
            }
            Error::Io(_) | Error::Csv(_) => (EXIT_IO, "io"),
        };
        Failure { code, kind, detail: e.to_string() }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Error> {
    serde_json::to_writer_pretty(create(dir, name)?, value)?;
    Ok(())
}

fn prepare(out: &Path) -> Result<(), Error> {
    fs::create_dir_all(out)?;
    Ok(())
}

fn load(args: &JobArgs) -> Result<(Job, Vec<(f64, f64)>), Error> {
    let job = Job::load(&args.job)?;
    prepare(&args.out)?;
    let pairs = default_pair_grid(&job.triple, args.pairs, args.seed);
    Ok((job, pairs))
}

/// Execute one parsed command.
pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Certify(args) => {
            let (job, pairs) = load(args)?;
            if pairs.is_empty() {
                return Err(Error::Domain("K is a single point; there are no pairs to certify".into()).into());
            }
            let report = certify(&job.triple, &job.omega, &pairs)?;
            write_json(&args.out, "cert_report.json", &report)?;
            report.write_worst_pairs_csv(create(&args.out, "worst_pairs.csv")?)?;
            report.require_extendable()?;
        }
        Command::Extend(args) => {
            let (job, _) = load(&args.job)?;
            let opts = AssembleOptions { max_pairs: args.job.pairs, seed: args.job.seed, ..Default::default() };
            let (curve, report) = assemble_with(&job.triple, &job.omega, &opts)?;
            let (lo, hi) = curve.hull();
            let n = args.samples.max(2);
            let xs: Vec<f64> =
                (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
            curve.write_csv(create(&args.job.out, "curve.csv")?, &xs)?;
            write_json(&args.job.out, "verification.json", &report)?;
            write_json(&args.job.out, "gaps.json", &report.gaps)?;
            if !report.passed || report.horizontality_max_residual > args.tol {
                return Err(Failure {
                    code: EXIT_VERIFICATION,
                    kind: "verification",
                    detail: format!(
                        "horizontality residual {:e} (tolerance {:e}), certification horizontality ok = {}",
                        report.horizontality_max_residual, args.tol, report.certification.verdict.condition_2
                    ),
                });
            }
        }
        Command::Sweep(args) => {
            let (job, pairs) = load(args)?;
            let rows = sweep(&job.triple, &job.omega, &pairs)?;
            write_sweep_csv(create(&args.out, "pairs.csv")?, &rows)?;
        }
        Command::Counterexample(args) => {
            prepare(&args.out)?;
            let data = build(args.m, &args.omega.0, args.nmax)?;
            let report = verify_bounds(&data, args.alpha)?;
            write_rn_csv(create(&args.out, "rn.csv")?, &report.rn)?;
            write_json(&args.out, "bounds.json", &report)?;
            if !report.passed {
                return Err(Failure {
                    code: EXIT_VERIFICATION,
                    kind: "verification",
                    detail: report.failures.join("; "),
                });
            }
        }
    }
    Ok(())
}

/// Parse `args`, run, and return the process exit code; failures go to stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.line());
            f.code
        }
    }
}
