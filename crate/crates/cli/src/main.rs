//! `tcepi`: build, inspect and simulate threshold circuits, verify them
//! against reference functions, run epistasis detection and size sweeps.
//!
//! Exit codes: 0 success, 1 verification or integrity failure, 2 usage or
//! configuration error.

mod bench;
mod circuits;
mod detect;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tcepi::circuit::{describe, parse_circuit, stream, write_circuit, CircuitError};
use tcepi::epistasis::{load_dataset, run_detection, EpistasisError, GenotypeDataset};
use tcepi::snn::{HardwareProfile, ProfileError};
use thiserror::Error;

use circuits::{build, format_bits, parse_bits, Kind, Shape};

/// Seed used by randomized sweeps unless `--seed` is given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Bundled 32-sample, 8-SNP dataset used by `epistasis --sample`.
pub const SAMPLE_DATASET: &str = include_str!("../data/sample_32x8.csv");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "tcepi", version, about = "Threshold circuits on a discrete-time spiking model")]
struct Cli {
    /// Hardware profile file: key=value lines for s_pr, n_pr, m_delay, f_in,
    /// f_out. Defaults to s_pr=16 n_pr=16 m_delay=4 f_in=16 f_out=16.
    #[arg(long, global = true)]
    profile: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print counts, latency, initiation interval and scale of a circuit.
    Describe {
        #[arg(value_enum)]
        kind: Kind,
        /// Input count, addend count (sum) or repetition factor (repeater).
        #[arg(short = 'n', long, default_value_t = 8)]
        size: usize,
        #[command(flatten)]
        shape: Shape,
    },
    /// Write a circuit in text form.
    Build {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(short = 'n', long, default_value_t = 8)]
        size: usize,
        #[command(flatten)]
        shape: Shape,
    },
    /// Stream input vectors through a circuit file at its initiation interval.
    Simulate {
        /// Circuit in text form, as written by `build`.
        circuit: PathBuf,
        /// Input bits, port order, one vector per flag.
        #[arg(long = "input", required = true)]
        inputs: Vec<String>,
    },
    /// Compare circuits against the reference functions.
    Verify {
        #[arg(value_enum)]
        kind: Kind,
        /// Sizes to check; defaults depend on the kind.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Addend widths for `sum`.
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4])]
        widths: Vec<usize>,
        /// Random cases per size when exhaustive checking is too large.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Corrupt one weight before checking (exercises failure reporting).
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        shape: Shape,
    },
    /// Exhaustive epistasis detection; writes one table row per genotype cell.
    Epistasis {
        /// Dataset CSV: genotype columns then a class column, optional header.
        dataset: Option<PathBuf>,
        /// Use the bundled 32x8 sample dataset.
        #[arg(long, conflicts_with = "dataset")]
        sample: bool,
        /// Interaction order, 2 or 3.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Append the chi-square score of each table.
        #[arg(long)]
        chi2: bool,
        /// Metrics report file; printed to standard error when absent.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Size sweep with counts, latency, spikes and ratio columns.
    Bench {
        #[arg(value_enum)]
        kind: Kind,
        /// Explicit sizes; otherwise doubling from `--from` to `--to`.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 64)]
        from: usize,
        #[arg(long, default_value_t = 4096)]
        to: usize,
        /// Random inputs per size for spike measurements.
        #[arg(long, default_value_t = 20)]
        cases: usize,
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("profile {path}: {source}")]
    Profile { path: PathBuf, source: ProfileError },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Epistasis(#[from] EpistasisError),
    #[error("{0} check(s) failed")]
    Failed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Epistasis(EpistasisError::Integrity { .. } | EpistasisError::Sim(_)) => 1,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_profile(path: Option<&Path>) -> Result<HardwareProfile, CliError> {
    match path {
        None => Ok(HardwareProfile::new(16, 16, 4, 16, 16).expect("default profile is valid")),
        Some(p) => read(p)?.parse().map_err(|source| CliError::Profile {
            path: p.to_path_buf(),
            source,
        }),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let profile = load_profile(cli.profile.as_deref())?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Describe { kind, size, shape } => {
            let c = build(kind, size, &shape, &profile)?;
            write_out(out, &format!("{}\n", describe(&c)))
        }
        Command::Build { kind, size, shape } => {
            let c = build(kind, size, &shape, &profile)?;
            write_out(out, &write_circuit(&c))
        }
        Command::Simulate { circuit, inputs } => {
            let c = parse_circuit(&read(&circuit)?)?;
            let vectors = inputs
                .iter()
                .map(|s| parse_bits(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Usage)?;
            if let Some(v) = vectors.iter().find(|v| v.len() != c.inputs().len()) {
                return Err(CliError::Usage(format!(
                    "input `{}` has {} bits, circuit has {} inputs",
                    format_bits(v),
                    v.len(),
                    c.inputs().len()
                )));
            }
            let outs = stream(&c, &vectors, c.initiation_interval.max(1))?;
            let text: String = vectors
                .iter()
                .zip(&outs)
                .map(|(i, o)| format!("{} -> {}\n", format_bits(i), format_bits(o)))
                .collect();
            write_out(out, &text)
        }
        Command::Verify {
            kind,
            sizes,
            widths,
            cases,
            inject_fault,
            shape,
        } => {
            let plan = verify::VerifyPlan {
                kind,
                sizes: if sizes.is_empty() { verify::default_sizes(kind) } else { sizes },
                widths,
                cases,
                seed: cli.seed,
                fault: inject_fault,
                shape,
                profile,
            };
            let results = verify::run_verify(&plan);
            let failed = results.iter().filter(|r| !r.passed()).count();
            let mut text: String = results.iter().map(|r| format!("{}\n", r.line())).collect();
            text.push_str(&format!("verify {}: {} suites, {failed} failed\n", kind.name(), results.len()));
            write_out(out, &text)?;
            if failed > 0 {
                return Err(CliError::Failed(failed));
            }
            Ok(())
        }
        Command::Epistasis {
            dataset,
            sample,
            order,
            chi2,
            metrics,
        } => {
            let text = match (&dataset, sample) {
                (Some(p), _) => read(p)?,
                (None, true) => SAMPLE_DATASET.to_string(),
                (None, false) => return Err(CliError::Usage("give a dataset path or --sample".into())),
            };
            let ds: GenotypeDataset = load_dataset(&text).map_err(EpistasisError::from)?;
            let det = run_detection(&ds, order, &profile)?;
            let format = cli.format.unwrap_or(OutputFormat::Csv);
            write_out(out, &detect::render_tables(&det.tables, format, chi2))?;
            let report = serde_json::to_string_pretty(&detect::metrics_report(&ds, &det, &profile))
                .expect("metrics serialize");
            match metrics {
                Some(p) => write_out(Some(&p), &format!("{report}\n")),
                None => {
                    eprintln!("{report}");
                    Ok(())
                }
            }
        }
        Command::Bench {
            kind,
            sizes,
            from,
            to,
            cases,
            shape,
        } => {
            let sizes = if sizes.is_empty() { bench::doubling(from, to) } else { sizes };
            let rows = bench::run_bench(kind, &sizes, &shape, &profile, cases, cli.seed)?;
            write_out(out, &bench::render(&rows, cli.format.unwrap_or(OutputFormat::Text)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tcepi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
