//! `klcert`: generalisation-risk certificates from held-out losses.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 invalid input, 5 selfcheck
//! failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chernoff_kl::cert::selfcheck::{run_selfcheck, Fault};
use chernoff_kl::cert::{certify, emit_table, ingest, CliError, ExitStatus, LossFormat, DEFAULT_DELTA};
use chernoff_kl::verification::{run_experiment, DistributionSpec, ExperimentConfig, ExperimentMode};

#[derive(Parser)]
#[command(name = "klcert", version, about = "Chernoff-KL risk certificates and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound the expected loss from a file of held-out per-example losses.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: LossFormat,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        two_sided: bool,
        /// Free-text attestation that the losses are held out.
        #[arg(long)]
        provenance_note: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one seeded Monte Carlo experiment and print its report as JSON.
    Simulate {
        /// e.g. `bernoulli:p=0.1`, `beta:a=2,b=5`, `point:v=0.3`, `uniform`,
        /// `twopoint:v0=0,v1=1,w=0.5`
        #[arg(long, value_parser = parse_dist)]
        dist: DistributionSpec,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// `coverage-one-sided`, `coverage-two-sided`, `tail-low:t=T`,
        /// `tail-high:t=T` or `equivalence-scan`
        #[arg(long, value_parser = parse_mode)]
        mode: ExperimentMode,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a CSV table of bounds over the given parameter lists.
    Table {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<u64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        mean: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the pinned verification matrix; exit 0 iff every suite passes.
    Selfcheck {
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the full per-cell report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, hide = true, value_parser = parse_fault)]
        inject_fault: Option<Fault>,
    },
}

fn parse_format(s: &str) -> Result<LossFormat, String> {
    s.parse()
}

fn parse_dist(s: &str) -> Result<DistributionSpec, String> {
    s.parse().map_err(|e: chernoff_kl::verification::DistributionError| e.to_string())
}

fn parse_mode(s: &str) -> Result<ExperimentMode, String> {
    s.parse()
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    s.parse()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

// Always an explicit pool, so RAYON_NUM_THREADS is never consulted.
fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let threads = threads
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1);
    if threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(pool.install(job))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Certify {
            input,
            format,
            delta,
            two_sided,
            provenance_note,
            out,
        } => {
            let losses = ingest(&input, format)?;
            let cert = certify(&losses, delta, two_sided, provenance_note)?;
            emit(&cert.to_json(), out.as_ref())
        }
        Command::Simulate {
            dist,
            n,
            delta,
            trials,
            seed,
            mode,
            threads,
            out,
        } => {
            let cfg = ExperimentConfig {
                dist,
                n,
                delta,
                trials,
                seed,
                mode,
            };
            let report = with_pool(threads, || run_experiment(&cfg))??;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            emit(&text, out.as_ref())
        }
        Command::Table { n, delta, mean, out } => {
            let rows = emit_table(&n, &delta, &mean, &out)?;
            eprintln!("wrote {rows} rows to {}", out.display());
            Ok(())
        }
        Command::Selfcheck {
            threads,
            report,
            inject_fault,
        } => {
            let result = with_pool(threads, || run_selfcheck(inject_fault))??;
            print!("{}", result.render());
            if let Some(path) = report {
                fs::write(path, result.to_json())?;
            }
            match result.first_failure() {
                None => Ok(()),
                Some(suite) => Err(CliError::SelfcheckFailed(suite.name.to_string())),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(ExitStatus::Success.code() as u8),
        Err(e) => {
            eprintln!("klcert: {e}");
            ExitCode::from(e.exit_status().code() as u8)
        }
    }
}
