mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use leibniz_core::derivations::GConstraints;
use leibniz_core::Error;

use commands::{ExtendMode, FingerprintArgs, Source, VerifyArgs};
use report::RunReport;

const DEFAULT_SEED: u64 = 20240917;
const SEED_ENV: &str = "LEIBNIZ_SEED";

#[derive(Parser)]
#[command(name = "leibniz", version, about = "Exact checks on quasi-filiform Leibniz algebras and their solvable extensions")]
struct Cli {
    /// Print the versioned JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks (default: $LEIBNIZ_SEED, then 20240917).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// Family name, optionally with values: `L(a,b,g)`, `L(1,0,2)`, `R1(-1)`, `Lnr(7,3)`.
    family: Option<String>,
    /// Nilradical dimension n.
    #[arg(short)]
    n: Option<usize>,
    /// Parameter assignment `name=value`; values are rationals or Gaussian rationals.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Load the algebra from a JSON file instead.
    #[arg(long, conflicts_with = "family")]
    file: Option<PathBuf>,
}

impl AlgebraArgs {
    fn source(&self) -> Source {
        Source { family: self.family.clone(), file: self.file.clone(), n: self.n, params: self.params.clone() }
    }
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Relations {
    Listed,
    Corrected,
}

#[derive(Subcommand)]
enum Command {
    /// List the families with their printed names and parameter domains.
    Catalog {
        /// Restrict to one group, e.g. type-i or solvable-g-codim1.
        #[arg(long)]
        group: Option<String>,
    },
    /// Build an algebra and print its structure constants.
    Build {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Write the algebra file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run checks on one algebra or on the whole catalog.
    Verify {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Comma-separated: leibniz, series, lie, extension, grading.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        /// Sweep every family (or just the named one) over n = 5..10 and its sample grid.
        #[arg(long)]
        all: bool,
        /// With --all: random single-constant mutations to test.
        #[arg(long, default_value_t = 0)]
        mutations: usize,
        /// Mixed elements sampled by the nilradical certificate.
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Derivation algebra, inner derivations and nil-independence certificate.
    Derive {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Relation set for the G derivation family.
        #[arg(long, value_enum, default_value = "listed")]
        relations: Relations,
    },
    /// Recompute the nil-independence table at size n.
    Table1 {
        #[arg(short)]
        n: usize,
    },
    /// Solve for solvable extensions of a nilradical.
    Extend {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Codimension of the nilradical.
        #[arg(short, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "normal")]
        mode: ExtendMode,
        /// Write the proof log as JSON.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Isomorphism invariants, optionally compared pairwise.
    Fingerprint {
        /// Family names; give values positionally, e.g. `L4(2)`.
        families: Vec<String>,
        /// A classified list: type1, type2, R, Hc1, Hc2 (expanded over the sample grid).
        #[arg(long)]
        list: Option<String>,
        #[arg(short)]
        n: Option<usize>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        file: Vec<PathBuf>,
        #[arg(long)]
        pairwise: bool,
        /// Random basis changes under which the fingerprint must not change.
        #[arg(long, default_value_t = 0)]
        basis_changes: usize,
    },
    /// Characteristic sequence of a nilpotent algebra.
    Charseq {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Expected sequence, e.g. 5,2.
        #[arg(long, value_delimiter = ',')]
        expect: Option<Vec<usize>>,
    },
    /// Associated graded algebra of the lower central series.
    Grade {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Split R2 into its two ideals.
    Split {
        #[arg(short)]
        n: usize,
    },
}

fn seed(cli: &Cli) -> Result<u64, Error> {
    if let Some(s) = cli.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Input(format!("{SEED_ENV}={v} is not an integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: &Cli, report: &mut RunReport) -> Result<(), Error> {
    let seed = seed(cli)?;
    match &cli.command {
        Command::Catalog { group } => commands::catalog(report, group.clone()),
        Command::Build { alg, out } => commands::build(report, &alg.source(), out.clone()),
        Command::Verify { alg, checks, all, mutations, samples } => {
            let a = VerifyArgs { checks: checks.clone(), all: *all, mutations: *mutations, samples: *samples };
            commands::verify(report, &alg.source(), &a, seed)
        }
        Command::Derive { alg, relations } => {
            let rel = match relations {
                Relations::Listed => GConstraints::Listed,
                Relations::Corrected => GConstraints::Corrected,
            };
            commands::derive(report, &alg.source(), rel)
        }
        Command::Table1 { n } => commands::table(report, *n),
        Command::Extend { alg, k, mode, log } => commands::extend(report, &alg.source(), *k, *mode, log.clone()),
        Command::Fingerprint { families, list, n, params, file, pairwise, basis_changes } => {
            let a = FingerprintArgs {
                families: families.clone(),
                list: list.clone(),
                n: *n,
                params: params.clone(),
                file: file.clone(),
                pairwise: *pairwise,
                basis_changes: *basis_changes,
            };
            commands::fingerprints(report, &a, seed)
        }
        Command::Charseq { alg, samples, expect } => commands::charseq(report, &alg.source(), *samples, seed, expect.clone()),
        Command::Grade { alg } => commands::grade(report, &alg.source()),
        Command::Split { n } => commands::split(report, *n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut report = RunReport::new(std::env::args().skip(1).collect());
    let outcome = run(&cli, &mut report);
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    match outcome {
        Ok(()) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report.render_text());
            }
            if report.failed() > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("leibniz: {e}");
            match e {
                Error::Input(_) | Error::Domain(_) => ExitCode::from(2),
                Error::Check(_) | Error::Invariant(_) => ExitCode::from(1),
            }
        }
    }
}
