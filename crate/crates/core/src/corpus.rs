//! Rank-count tables from real corpora: loading, standard-error diagnostics,
//! Zipf plot data and the end-to-end analysis report.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::{pick_n, threshold_n_hat, threshold_n_prime, EnsembleParams};
use crate::error::{domain, Error, Result};
use crate::estimate::{
    estimate_n_total, local_scale_estimates, sensitivity_sweep, RankedCounts, RankedEntry,
    SensitivityReport, DEFAULT_WINDOW,
};

/// Offset in log space between the data envelope and each reference line.
pub const REFERENCE_OFFSET: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Tsv,
    Csv,
}

impl InputFormat {
    fn delimiter(self) -> u8 {
        match self {
            InputFormat::Tsv => b'\t',
            InputFormat::Csv => b',',
        }
    }
}

/// Reads `label,count` or `rank,label,count` records (a bare `count` column is
/// also accepted). Lines starting with `#` are comments. A first record whose
/// count field is not an integer is taken as a header.
///
/// Records are ranked by count, descending, with ties kept in input order.
pub fn load_rank_counts<R: Read>(source: R, format: InputFormat) -> Result<RankedCounts> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .quoting(format == InputFormat::Csv)
        .from_reader(source);

    let mut records = Vec::new();
    let mut first = true;
    for row in reader.records() {
        let row = row.map_err(|e| match e.position() {
            Some(pos) => Error::Parse {
                line: pos.line(),
                msg: e.to_string(),
            },
            None => Error::Parse {
                line: 0,
                msg: e.to_string(),
            },
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let (label, count_field) = match row.len() {
            1 => (None, &row[0]),
            2 => (Some(&row[0]), &row[1]),
            3 => (Some(&row[1]), &row[2]),
            n => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 1 to 3 fields, found {n}"),
                })
            }
        };
        let is_first = std::mem::replace(&mut first, false);
        let count = match count_field.parse::<u64>() {
            Ok(c) => c,
            Err(_) if is_first => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("count field {count_field:?} is not a nonnegative integer"),
                })
            }
        };
        let label = label.filter(|l| !l.is_empty()).map(str::to_owned);
        records.push((label, count));
    }
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    RankedCounts::from_unsorted(records)
}

/// `(X_i - X_{i+1}) / sqrt(X_i + X_{i+1})` for `i = 1..len-1`; zero when both
/// counts are zero.
pub fn adjacent_se(counts: &RankedCounts) -> Vec<f64> {
    let xs: Vec<f64> = counts.counts().map(|c| c as f64).collect();
    xs.windows(2)
        .map(|w| {
            let s = w[0] + w[1];
            if s > 0.0 {
                (w[0] - w[1]) / s.sqrt()
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipfPoint {
    pub i: usize,
    pub ln_rank: f64,
    pub ln_count: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLine {
    pub slope: f64,
    /// Value at `ln_rank = 0`.
    pub intercept: f64,
}

impl ReferenceLine {
    pub fn at(&self, ln_rank: f64) -> f64 {
        self.intercept + self.slope * ln_rank
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZipfPlot {
    pub points: Vec<ZipfPoint>,
    pub skipped_zero: usize,
    /// Line above the data, then line below.
    pub reference_lines: [ReferenceLine; 2],
}

/// Log-log points for positive counts plus two reference lines: slope
/// `slopes.0` through `(0, max ln X + 0.5)` and slope `slopes.1` through
/// `(0, ln X_1 - 0.5)`.
pub fn zipf_plot_data(counts: &RankedCounts, slopes: (f64, f64)) -> ZipfPlot {
    let points: Vec<ZipfPoint> = counts
        .entries()
        .iter()
        .filter(|e| e.count > 0)
        .map(|e| ZipfPoint {
            i: e.rank,
            ln_rank: (e.rank as f64).ln(),
            ln_count: (e.count as f64).ln(),
        })
        .collect();
    let skipped_zero = counts.len() - points.len();
    let max_ln = points
        .iter()
        .map(|p| p.ln_count)
        .fold(f64::NEG_INFINITY, f64::max);
    let first_ln = points.first().map_or(f64::NEG_INFINITY, |p| p.ln_count);
    ZipfPlot {
        points,
        skipped_zero,
        reference_lines: [
            ReferenceLine {
                slope: slopes.0,
                intercept: max_ln + REFERENCE_OFFSET,
            },
            ReferenceLine {
                slope: slopes.1,
                intercept: first_ln - REFERENCE_OFFSET,
            },
        ],
    }
}

pub fn write_zipf_csv<W: Write>(plot: &ZipfPlot, mut out: W) -> Result<()> {
    writeln!(out, "i,ln_rank,ln_count")?;
    for p in &plot.points {
        writeln!(out, "{},{},{}", p.i, p.ln_rank, p.ln_count)?;
    }
    Ok(())
}

pub fn write_se_csv<W: Write>(se: &[f64], mut out: W) -> Result<()> {
    writeln!(out, "i,se")?;
    for (j, v) in se.iter().enumerate() {
        writeln!(out, "{},{}", j + 1, v)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub alpha: f64,
    pub k: f64,
    pub window: (usize, usize),
    pub epsilon: f64,
    /// Grand total `T`; defaults to the table's recorded total.
    pub total: Option<f64>,
    pub alpha_grid: Vec<f64>,
    pub slopes: (f64, f64),
    pub n_max: usize,
}

impl AnalysisOptions {
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            k: 0.0,
            window: DEFAULT_WINDOW,
            epsilon: 0.01,
            total: None,
            alpha_grid: vec![1.05, 1.075, 1.1, 1.125, 1.15],
            slopes: (-1.0, -1.1),
            n_max: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountsSummary {
    pub len: usize,
    pub total: f64,
    pub listed_total: u64,
    pub top10: Vec<RankedEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalScaleSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub counts_summary: CountsSummary,
    /// `N` here is the total-count estimate `T / zeta(alpha, k+1)`.
    pub params_used: EnsembleParams,
    pub window: (usize, usize),
    pub epsilon: f64,
    pub n_prime: f64,
    pub n_hat: f64,
    pub pick_n_result: usize,
    pub pick_n_bound: f64,
    pub pick_n_cap_reached: bool,
    pub local_scale: LocalScaleSummary,
    /// `n'` with `N` set to the window minimum of `N_i`.
    pub n_prime_local: f64,
    pub adjacent_se: Vec<f64>,
    pub zipf_points: Vec<ZipfPoint>,
    pub reference_slopes: (f64, f64),
    pub reference_lines: [ReferenceLine; 2],
    pub sensitivity: SensitivityReport,
}

fn context(op: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Domain(msg) => Error::Domain(format!("{op}: {msg}")),
        Error::Config(msg) => Error::Config(format!("{op}: {msg}")),
        other => other,
    }
}

pub fn analyze(counts: &RankedCounts, opts: &AnalysisOptions) -> Result<AnalysisReport> {
    let (lo, hi) = opts.window;
    let total = opts.total.unwrap_or(counts.total() as f64);
    if total < counts.listed_total() as f64 {
        return Err(domain(format!(
            "total {total} is smaller than the listed counts' sum {}",
            counts.listed_total()
        )));
    }

    let n_total = estimate_n_total(total, opts.alpha, opts.k).map_err(context("total estimate"))?;
    let params_used =
        EnsembleParams::new(n_total, opts.alpha, opts.k).map_err(context("model parameters"))?;
    let n_prime = threshold_n_prime(n_total, opts.alpha)
        .map_err(context("n' threshold"))?
        .n_prime;
    let n_hat = threshold_n_hat(total, opts.alpha).map_err(context("n-hat threshold"))?;
    let picked = pick_n(&params_used, opts.epsilon, opts.n_max).map_err(context("pick_n"))?;

    let local = local_scale_estimates(counts, opts.alpha, lo, hi)
        .map_err(context("local scale estimates"))?;
    let n_prime_local = threshold_n_prime(local.min, opts.alpha)
        .map_err(context("local n' threshold"))?
        .n_prime;
    let sensitivity = sensitivity_sweep(counts, &opts.alpha_grid, lo, hi)
        .map_err(context("sensitivity sweep"))?;

    let plot = zipf_plot_data(counts, opts.slopes);

    Ok(AnalysisReport {
        counts_summary: CountsSummary {
            len: counts.len(),
            total,
            listed_total: counts.listed_total(),
            top10: counts.entries().iter().take(10).cloned().collect(),
        },
        params_used,
        window: opts.window,
        epsilon: opts.epsilon,
        n_prime,
        n_hat,
        pick_n_result: picked.n,
        pick_n_bound: picked.bound_at_n,
        pick_n_cap_reached: picked.cap_reached,
        local_scale: LocalScaleSummary {
            min: local.min,
            median: local.median,
            max: local.max,
        },
        n_prime_local,
        adjacent_se: adjacent_se(counts),
        zipf_points: plot.points,
        reference_slopes: opts.slopes,
        reference_lines: plot.reference_lines,
        sensitivity,
    })
}
