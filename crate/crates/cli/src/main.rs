use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cpulse::golden::{golden_tables, GoldenRow};
use cpulse::io::{OptimizationMetadata, SequenceDocument};
use cpulse::metrics::{conversion_efficiency_axis, sample_profile};
use cpulse::optimizer::{derive, verify_rows, OptimizationProblem, Tolerances};
use cpulse::{lookup, metrics, CompositeSequence, Family, ProfileKind};

mod report;

#[derive(Parser)]
#[command(name = "cpulse", version, about = "Composite π pulses: error profiles, metrics and phase derivation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Probability,
    Fidelity,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Epsilon,
    Phi,
}

#[derive(Subcommand)]
enum Command {
    /// Samples the error profile of a sequence as CSV.
    Profile {
        /// Built-in label (e.g. Bat5, BB2) or path to a sequence file.
        sequence: String,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Defaults to the family's own profile.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long, value_enum, default_value = "epsilon")]
        axis: AxisArg,
    },
    /// Prints areas, 0.9 range, FWHM and rectangularity.
    Metrics {
        sequence: String,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Searches for the phases of a family with multi-start local optimization.
    Derive {
        family: String,
        n_pulses: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also start from the published phases of the same length.
        #[arg(long)]
        table_hint: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Writes the result as a sequence file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recomputes every published figure; exits 1 if any cell is out of tolerance.
    VerifyTables {
        #[arg(long, default_value_t = 1e-3)]
        tolerance_area: f64,
        #[arg(long, default_value_t = 0.002)]
        tolerance_range: f64,
        #[arg(long, default_value_t = 0.02)]
        tolerance_kappa: f64,
        /// Largest phase change (units of π) allowed when re-optimizing printed phases.
        #[arg(long, default_value_t = 0.01)]
        tolerance_phase: f64,
        /// Table rows to check instead of the built-in ones (as written by `list --format json`).
        #[arg(long)]
        golden: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Side-by-side metrics with the winner of each row.
    Compare {
        #[arg(num_args = 2.., required = true)]
        sequences: Vec<String>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Lists the built-in labels.
    List {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve(reference: &str) -> Result<CompositeSequence> {
    let path = Path::new(reference);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        let doc = SequenceDocument::parse(&text).with_context(|| path.display().to_string())?;
        return doc.to_sequence().with_context(|| path.display().to_string());
    }
    Ok(lookup(reference)?)
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Profile {
            sequence,
            points,
            kind,
            axis,
        } => {
            let seq = resolve(&sequence)?;
            let kind = match kind {
                Some(KindArg::Probability) => ProfileKind::Probability,
                Some(KindArg::Fidelity) => ProfileKind::Fidelity,
                None => seq.profile_kind(),
            };
            let mut profile = sample_profile(&seq, points, kind)?;
            if let AxisArg::Phi = axis {
                profile = conversion_efficiency_axis(&profile);
            }
            emit(&profile.to_csv())?;
        }
        Command::Metrics {
            sequence,
            alpha,
            format,
        } => {
            let seq = resolve(&sequence)?;
            let m = metrics(&seq, alpha);
            match format {
                Format::Json => emit(&(serde_json::to_string_pretty(&m)? + "\n"))?,
                Format::Text => emit(&report::metrics_text(&m))?,
                Format::Csv => emit(&report::metrics_csv(std::slice::from_ref(&m)))?,
            }
        }
        Command::Derive {
            family,
            n_pulses,
            restarts,
            seed,
            table_hint,
            format,
            output,
        } => {
            let family: Family = family.parse()?;
            let mut problem = OptimizationProblem::new(family, n_pulses)?;
            if !table_hint {
                problem = problem.without_table_hint();
            }
            let result = derive(&problem, restarts, seed)?;
            let seq = result.sequence(&problem);
            let doc = SequenceDocument::from_sequence(&seq).with_optimization(OptimizationMetadata {
                objective_value: result.objective_value,
                restarts,
                seed,
                converged: result.converged,
            });
            if let Some(path) = &output {
                std::fs::write(path, doc.to_json() + "\n")
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            if !result.converged {
                eprintln!("warning: best value reached by a single start; consider more restarts");
            }
            match format {
                Format::Json => emit(&(doc.to_json() + "\n"))?,
                _ => emit(&report::derive_text(&problem, &seq, &result))?,
            }
        }
        Command::VerifyTables {
            tolerance_area,
            tolerance_range,
            tolerance_kappa,
            tolerance_phase,
            golden,
            format,
        } => {
            let rows: Vec<GoldenRow> = match &golden {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("cannot read {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| path.display().to_string())?
                }
                None => golden_tables(),
            };
            let tol = Tolerances {
                area: tolerance_area,
                range: tolerance_range,
                kappa: tolerance_kappa,
                optimality: tolerance_phase,
            };
            let report = verify_rows(&rows, tol);
            match format {
                Format::Json => emit(&(serde_json::to_string_pretty(&report)? + "\n"))?,
                _ => emit(&report::verify_text(&report))?,
            }
            if !report.all_pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Compare {
            sequences,
            alpha,
            format,
        } => {
            let reports = sequences
                .iter()
                .map(|s| resolve(s).map(|seq| metrics(&seq, alpha)))
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Json => emit(&(serde_json::to_string_pretty(&reports)? + "\n"))?,
                Format::Csv => emit(&report::metrics_csv(&reports))?,
                Format::Text => emit(&report::compare_text(&reports))?,
            }
        }
        Command::List { format } => {
            let rows = golden_tables();
            match format {
                Format::Json => emit(&(serde_json::to_string_pretty(&rows)? + "\n"))?,
                Format::Csv => bail!("list supports text and json"),
                Format::Text => emit(&report::list_text(&rows))?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
