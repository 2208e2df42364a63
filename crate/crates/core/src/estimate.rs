//! Estimating the scale `N` from ranked count tables.
//!
//! The exponent `alpha` is always supplied by the caller; only `N` is
//! estimated. Two routes are offered: from the grand total via
//! `E(T) = N zeta(alpha, k+1)`, and from local estimates `N_i = X_i i^alpha`
//! over a window of well-populated ranks.

use serde::{Deserialize, Serialize};

use crate::bounds::threshold_n_prime;
use crate::error::{domain, Error, Result};
use crate::special::{hurwitz_zeta, Precision};

/// Window of ranks used for local scale estimates when none is given.
pub const DEFAULT_WINDOW: (usize, usize) = (10, 100);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub label: Option<String>,
    pub count: u64,
}

/// Counts ordered by rank `1..=len`, nonincreasing.
///
/// `total` may exceed the sum of the listed counts when the table is
/// truncated (only the head of the distribution is published).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankedCounts {
    entries: Vec<RankedEntry>,
    total: u64,
}

impl RankedCounts {
    /// Builds from records already in rank order; out-of-order counts are an
    /// error since rank is defined by count.
    pub fn new(records: Vec<(Option<String>, u64)>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(w) = records.windows(2).position(|w| w[1].1 > w[0].1) {
            return Err(domain(format!(
                "counts must be nonincreasing by rank: rank {} has {} after {}",
                w + 2,
                records[w + 1].1,
                records[w].1
            )));
        }
        let mut total = 0u64;
        let entries = records
            .into_iter()
            .enumerate()
            .map(|(i, (label, count))| {
                total = total.saturating_add(count);
                RankedEntry {
                    rank: i + 1,
                    label,
                    count,
                }
            })
            .collect();
        Ok(Self { entries, total })
    }

    /// Sorts by count, descending; equal counts keep their input order.
    pub fn from_unsorted(mut records: Vec<(Option<String>, u64)>) -> Result<Self> {
        records.sort_by_key(|r| std::cmp::Reverse(r.1));
        Self::new(records)
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::new(counts.iter().map(|&c| (None, c)).collect())
    }

    /// Records an externally known grand total, e.g. for a truncated table.
    pub fn with_total(mut self, total: u64) -> Result<Self> {
        let listed = self.listed_total();
        if total < listed {
            return Err(domain(format!(
                "total {total} is smaller than the listed counts' sum {listed}"
            )));
        }
        self.total = total;
        Ok(self)
    }

    pub fn entries(&self) -> &[RankedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Count at 1-based `rank`.
    pub fn count(&self, rank: usize) -> Option<u64> {
        rank.checked_sub(1)
            .and_then(|i| self.entries.get(i))
            .map(|e| e.count)
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.count)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn listed_total(&self) -> u64 {
        self.counts().fold(0u64, |a, c| a.saturating_add(c))
    }

    /// Mass not accounted for by the listed entries.
    pub fn remainder(&self) -> u64 {
        self.total - self.listed_total()
    }
}

/// `N = T / zeta(alpha, k + 1)`, the moment estimate from the grand total.
pub fn estimate_n_total(total: f64, alpha: f64, k: f64) -> Result<f64> {
    if !(total > 0.0) || !total.is_finite() {
        return Err(domain(format!(
            "T must be finite and positive, got {total}"
        )));
    }
    if !(k >= 0.0) || !k.is_finite() {
        return Err(domain(format!("k must be finite and >= 0, got {k}")));
    }
    Ok(total / hurwitz_zeta(alpha, k + 1.0, &Precision::default())?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSummary {
    Min,
    Median,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalEstimates {
    /// `(i, N_i)` for each rank in the window.
    pub points: Vec<(usize, f64)>,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl LocalEstimates {
    pub fn summary(&self, which: ScaleSummary) -> f64 {
        match which {
            ScaleSummary::Min => self.min,
            ScaleSummary::Median => self.median,
        }
    }
}

/// `N_i = X_i i^alpha` for `i` in `lo..=hi`.
pub fn local_scale_estimates(
    counts: &RankedCounts,
    alpha: f64,
    lo: usize,
    hi: usize,
) -> Result<LocalEstimates> {
    let values: Vec<f64> = counts.counts().map(|c| c as f64).collect();
    local_scale_estimates_from_values(&values, alpha, lo, hi)
}

/// Same as [`local_scale_estimates`] over real-valued `values[i-1] = X_i`.
pub fn local_scale_estimates_from_values(
    values: &[f64],
    alpha: f64,
    lo: usize,
    hi: usize,
) -> Result<LocalEstimates> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha must be finite and > 1, got {alpha}")));
    }
    if lo == 0 || lo > hi || hi > values.len() {
        return Err(domain(format!(
            "window [{lo}, {hi}] must satisfy 1 <= lo <= hi <= {}",
            values.len()
        )));
    }
    let mut points = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let x = values[i - 1];
        if !(x > 0.0) {
            return Err(domain(format!(
                "count at rank {i} is {x}; window counts must be positive"
            )));
        }
        points.push((i, x * (i as f64).powf(alpha)));
    }
    let mut sorted: Vec<f64> = points.iter().map(|p| p.1).collect();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let median = if len % 2 == 1 {
        sorted[len / 2]
    } else {
        0.5 * (sorted[len / 2 - 1] + sorted[len / 2])
    };
    Ok(LocalEstimates {
        min: sorted[0],
        median,
        max: sorted[len - 1],
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub alpha: f64,
    #[serde(rename = "N_est")]
    pub n_est: f64,
    pub n_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub rows: Vec<SensitivityRow>,
}

/// For each `alpha`, re-estimates `N` as the window minimum of `N_i` and
/// recomputes `n'`.
pub fn sensitivity_sweep(
    counts: &RankedCounts,
    alphas: &[f64],
    lo: usize,
    hi: usize,
) -> Result<SensitivityReport> {
    sensitivity_sweep_with(counts, alphas, lo, hi, ScaleSummary::Min)
}

pub fn sensitivity_sweep_with(
    counts: &RankedCounts,
    alphas: &[f64],
    lo: usize,
    hi: usize,
    summary: ScaleSummary,
) -> Result<SensitivityReport> {
    if alphas.is_empty() {
        return Err(domain("alpha grid is empty"));
    }
    if alphas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("alpha grid must be strictly increasing"));
    }
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let n_est = local_scale_estimates(counts, alpha, lo, hi)?.summary(summary);
            let n_prime = threshold_n_prime(n_est, alpha)?.n_prime;
            Ok(SensitivityRow {
                alpha,
                n_est,
                n_prime,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SensitivityReport { rows })
}
