//! `zipfpoi`: ordering-reliability thresholds, bounds, simulations and corpus
//! analysis for Zipf-Poisson count ensembles.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zipfpoi_core::bounds::{pick_n, prefix_error_bound, threshold_n_prime};
use zipfpoi_core::corpus::{
    analyze, load_rank_counts, write_se_csv, write_zipf_csv, zipf_plot_data,
};
use zipfpoi_core::simulate::{default_n_focus, run_experiment, run_experiment_with_threads};
use zipfpoi_core::{AnalysisOptions, EnsembleParams, InputFormat};

#[derive(Parser)]
#[command(
    name = "zipfpoi",
    version,
    about = "How many of the top-ranked entities in Zipf-like count data are reliably ordered"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic threshold n' = (A(alpha) N / ln N)^(1/(alpha+2)).
    Threshold(ThresholdArgs),
    /// Bonferroni bound p(n) on the first n entities being misordered.
    Bound(BoundArgs),
    /// Largest n whose Bonferroni bound is at most epsilon.
    PickN(PickArgs),
    /// Monte Carlo distribution of the correctly ordered prefix length.
    Simulate(SimulateArgs),
    /// Full report for a rank-count table read from a file or stdin.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Scale N of the Poisson means N (i+k)^-alpha.
    #[arg(long = "N", value_name = "N")]
    scale: f64,
    /// Zipf exponent, > 1.
    #[arg(long)]
    alpha: f64,
    /// Mandelbrot shift, >= 0.
    #[arg(long, default_value_t = 0.0)]
    k: f64,
}

impl ModelArgs {
    fn params(&self) -> zipfpoi_core::Result<EnsembleParams> {
        EnsembleParams::new(self.scale, self.alpha, self.k)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long = "N", value_name = "N")]
    scale: f64,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Prefix length.
    #[arg(long, value_parser = parse_count)]
    n: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PickArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Largest n considered.
    #[arg(long = "n-max", value_parser = parse_count, default_value = "100000")]
    n_max: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    reps: u64,
    /// Base seed; replicate r uses stream r of this seed.
    #[arg(long)]
    seed: u64,
    /// Rank the truncation horizon is sized for; defaults to ceil(n').
    #[arg(long = "n-focus", value_parser = parse_count)]
    n_focus: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, value_parser = parse_count)]
    threads: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Rank-count table, or '-' for stdin.
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    /// Defaults to csv for *.csv inputs and tsv otherwise.
    #[arg(long = "input-format", value_enum)]
    input_format: Option<TableFormat>,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    k: f64,
    /// Grand total T; defaults to the sum of the listed counts.
    #[arg(long)]
    total: Option<f64>,
    /// First rank of the scale-estimation window.
    #[arg(long, value_parser = parse_count, default_value = "10")]
    lo: u64,
    /// Last rank of the scale-estimation window.
    #[arg(long, value_parser = parse_count, default_value = "100")]
    hi: u64,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long = "n-max", value_parser = parse_count, default_value = "100000")]
    n_max: u64,
    /// Also write the Zipf plot table (i,ln_rank,ln_count).
    #[arg(long = "zipf-csv", value_name = "PATH")]
    zipf_csv: Option<PathBuf>,
    /// Also write the adjacent standard-error table (i,se).
    #[arg(long = "se-csv", value_name = "PATH")]
    se_csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Tsv,
    Csv,
}

/// Nonnegative integers, also in scientific notation such as `1e4`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("expected a nonnegative integer, got {s:?}")),
    }
}

fn to_usize(v: u64, name: &str) -> zipfpoi_core::Result<usize> {
    usize::try_from(v).map_err(|_| zipfpoi_core::Error::Domain(format!("{name} is too large: {v}")))
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> zipfpoi_core::Result<()> {
    let mut out = open_output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn emit<T: Serialize>(
    value: &T,
    out: &OutputArgs,
    csv: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> zipfpoi_core::Result<()> {
    match out.format {
        Format::Json => emit_json(value, out.output.as_deref()),
        Format::Csv => {
            let mut w = open_output(out.output.as_deref())?;
            csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> zipfpoi_core::Result<()> {
    match cli.command {
        Command::Threshold(a) => {
            let rep = threshold_n_prime(a.scale, a.alpha)?;
            emit(&rep, &a.out, |w| {
                writeln!(w, "N,alpha,A_const,log_N,n_prime,n_prime_floor")?;
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    a.scale, a.alpha, rep.a_const, rep.log_n, rep.n_prime, rep.n_prime_floor
                )
            })
        }
        Command::Bound(a) => {
            let params = a.model.params()?;
            let rep = prefix_error_bound(to_usize(a.n, "n")?, &params);
            emit(&rep, &a.out, |w| {
                writeln!(w, "i,term,cumulative")?;
                let mut sum = 0.0;
                for (j, t) in rep.per_pair_terms.iter().enumerate() {
                    sum += t;
                    writeln!(w, "{},{},{}", j + 1, t, sum)?;
                }
                Ok(())
            })
        }
        Command::PickN(a) => {
            let params = a.model.params()?;
            let rep = pick_n(&params, a.epsilon, to_usize(a.n_max, "n-max")?)?;
            emit(&rep, &a.out, |w| {
                writeln!(w, "n,bound_at_n,cap_reached")?;
                writeln!(w, "{},{},{}", rep.n, rep.bound_at_n, rep.cap_reached)
            })
        }
        Command::Simulate(a) => {
            let params = a.model.params()?;
            let n_focus = match a.n_focus {
                Some(n) => to_usize(n, "n-focus")?,
                None => default_n_focus(&params)?,
            };
            let summary = match a.threads {
                Some(t) => run_experiment_with_threads(
                    &params,
                    a.reps,
                    n_focus,
                    a.seed,
                    to_usize(t, "threads")?,
                )?,
                None => run_experiment(&params, a.reps, n_focus, a.seed)?,
            };
            emit(&summary, &a.out, |w| {
                writeln!(w, "L,replicates")?;
                for (l, c) in &summary.histogram {
                    writeln!(w, "{l},{c}")?;
                }
                Ok(())
            })
        }
        Command::Analyze(a) => {
            let format = match a.input_format {
                Some(TableFormat::Csv) => InputFormat::Csv,
                Some(TableFormat::Tsv) => InputFormat::Tsv,
                None if a
                    .input
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("csv")) =>
                {
                    InputFormat::Csv
                }
                None => InputFormat::Tsv,
            };
            let source: Box<dyn Read> = if a.input.as_os_str() == "-" {
                Box::new(io::stdin().lock())
            } else {
                Box::new(File::open(&a.input)?)
            };
            let counts = load_rank_counts(source, format)?;
            let mut opts = AnalysisOptions::new(a.alpha);
            opts.k = a.k;
            opts.total = a.total;
            opts.window = (to_usize(a.lo, "lo")?, to_usize(a.hi, "hi")?);
            opts.epsilon = a.epsilon;
            opts.n_max = to_usize(a.n_max, "n-max")?;
            let report = analyze(&counts, &opts)?;
            if let Some(path) = &a.zipf_csv {
                write_zipf_csv(
                    &zipf_plot_data(&counts, opts.slopes),
                    BufWriter::new(File::create(path)?),
                )?;
            }
            if let Some(path) = &a.se_csv {
                write_se_csv(&report.adjacent_se, BufWriter::new(File::create(path)?))?;
            }
            emit_json(&report, a.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zipfpoi: {e}");
            ExitCode::from(1)
        }
    }
}
