//! Monte Carlo simulation of the Zipf-(Mandelbrot-)Poisson ensemble.
//!
//! Each replicate draws `X_1..X_M` independently with `X_i ~ Poi(lambda_i)`,
//! where the horizon `M` comes from [`truncation_index`], and reduces the draw
//! to an [`OrderingOutcome`]. Replicate `r` of an experiment seeded with `s`
//! uses ChaCha8 keyed by `s` on stream `r`, so results do not depend on how
//! replicates are scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{jumper_tail_bound, threshold_n_prime, EnsembleParams};
use crate::error::{domain, Error, Result};
use crate::special::ln_gamma_pos;

/// Probability budget for entities beyond the simulation horizon.
pub const DEFAULT_TRUNCATION_SAFETY: f64 = 1e-6;

const INVERSION_LIMIT: f64 = 10.0;

/// The random stream for replicate `replicate` of an experiment seeded `seed`.
pub fn replicate_stream(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// One exact Poisson(`lambda`) draw.
///
/// Sequential inversion below `lambda = 10`, Hormann's transformed rejection
/// (PTRS) above, so the expected cost is bounded independently of `lambda`.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> Result<u64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!(
            "Poisson mean must be finite and nonnegative, got {lambda}"
        )));
    }
    Ok(if lambda == 0.0 {
        0
    } else if lambda < INVERSION_LIMIT {
        poisson_inversion(lambda, rng)
    } else {
        poisson_ptrs(lambda, rng)
    })
}

fn poisson_inversion<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let p0 = (-lambda).exp();
    'draw: loop {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = p0;
        let mut cdf = p0;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if k > 200 {
                // u landed in the rounding gap below 1
                continue 'draw;
            }
        }
        return k;
    }
}

fn poisson_ptrs<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        if lhs <= -lambda + k * loglam - ln_gamma_pos(k + 1.0) {
            return k as u64;
        }
    }
}

/// Smallest `M >= 4 n_focus` such that entities beyond `M` reach the level
/// `lambda_{2 n_focus}` with probability at most `safety`.
///
/// Uses [`jumper_tail_bound`], which decreases in `M`, so the answer is found
/// by doubling followed by bisection.
pub fn truncation_index(params: &EnsembleParams, n_focus: usize, safety: f64) -> Result<usize> {
    if n_focus == 0 {
        return Err(domain("n_focus must be at least 1"));
    }
    if !(safety > 0.0 && safety < 1.0) {
        return Err(domain(format!("safety must lie in (0, 1), got {safety}")));
    }
    let level = params.mean_of(2 * n_focus);
    if !(level > 1.0 / params.alpha()) {
        return Err(Error::Config(format!(
            "level lambda_{} = {level} is not above 1/alpha; no finite horizon is certified",
            2 * n_focus
        )));
    }
    let ok = |m: usize| -> Result<bool> { Ok(jumper_tail_bound(m, level, params)? <= safety) };

    let mut lo = 4 * n_focus;
    if ok(lo)? {
        return Ok(lo);
    }
    let mut hi = lo;
    loop {
        hi = hi.checked_mul(2).filter(|&h| h <= 1 << 40).ok_or_else(|| {
            Error::Config(format!(
                "no horizon up to 2^40 keeps the tail below {safety}"
            ))
        })?;
        if ok(hi)? {
            break;
        }
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Counts `X_1..X_M` in true-rank order (not re-sorted).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleDraw {
    pub counts: Vec<u64>,
}

pub fn sample_ensemble<R: Rng + ?Sized>(
    params: &EnsembleParams,
    horizon: usize,
    rng: &mut R,
) -> Result<EnsembleDraw> {
    if horizon == 0 {
        return Err(domain("ensemble horizon must be at least 1"));
    }
    let counts = (1..=horizon)
        .map(|i| sample_poisson(params.mean_of(i), rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleDraw { counts })
}

/// How the correct prefix ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstError {
    /// Every entity up to the horizon is correctly placed.
    None,
    /// Entity `L+2` beats entity `L+1`.
    Transposition,
    /// The best later count equals entity `L+1`'s.
    Tie,
    /// Entity `L+1+offset` (offset >= 2) beats entity `L+1`.
    Jump { offset: usize },
}

impl FirstError {
    pub fn kind(&self) -> &'static str {
        match self {
            FirstError::None => "none",
            FirstError::Transposition => "transposition",
            FirstError::Tie => "tie",
            FirstError::Jump { .. } => "jump",
        }
    }
}

/// Length `L` of the correct prefix and the first error after it.
///
/// `L` is the largest `n` with `X_1 > ... > X_n > max_{i>n} X_i`. Entity
/// `L+1` is the first that is not strictly above everything after it; the
/// blocker is the smallest index beyond `L+1` holding the maximum of the
/// remaining counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingOutcome {
    pub correct_prefix_len: usize,
    pub first_error: FirstError,
    pub blocker_index: Option<usize>,
}

pub fn ordering_outcome(counts: &[u64]) -> OrderingOutcome {
    let m = counts.len();
    // suffix_max[j] = max(counts[j..]), suffix_max[m] = None
    let mut suffix_max: Vec<Option<u64>> = vec![None; m + 1];
    for j in (0..m).rev() {
        suffix_max[j] = Some(suffix_max[j + 1].map_or(counts[j], |s| s.max(counts[j])));
    }
    let len = (0..m)
        .take_while(|&j| suffix_max[j + 1].is_none_or(|rest| counts[j] > rest))
        .count();
    if len == m {
        return OrderingOutcome {
            correct_prefix_len: len,
            first_error: FirstError::None,
            blocker_index: None,
        };
    }
    // 0-based: displaced entity at `len`, blocker searched in (len, m)
    let displaced = counts[len];
    let best = suffix_max[len + 1].expect("a failing entity always has successors");
    let blocker = (len + 1..m)
        .find(|&j| counts[j] == best)
        .expect("the suffix maximum is attained");
    let first_error = if best == displaced {
        FirstError::Tie
    } else if blocker == len + 1 {
        FirstError::Transposition
    } else {
        FirstError::Jump {
            offset: blocker - len,
        }
    };
    OrderingOutcome {
        correct_prefix_len: len,
        first_error,
        blocker_index: Some(blocker + 1),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub params: EnsembleParams,
    pub reps: u64,
    pub n_focus: usize,
    pub seed: u64,
    pub truncation_m: usize,
    /// Correct-prefix length `L` to number of replicates.
    pub histogram: BTreeMap<usize, u64>,
    /// Keys: `none`, `transposition`, `tie`, `jump`.
    pub error_kind_counts: BTreeMap<String, u64>,
    /// Jump offsets to number of replicates.
    pub jump_offsets: BTreeMap<usize, u64>,
}

impl ExperimentSummary {
    fn empty(params: EnsembleParams, reps: u64, n_focus: usize, seed: u64, m: usize) -> Self {
        let error_kind_counts = ["none", "transposition", "tie", "jump"]
            .into_iter()
            .map(|k| (k.to_string(), 0))
            .collect();
        Self {
            params,
            reps,
            n_focus,
            seed,
            truncation_m: m,
            histogram: BTreeMap::new(),
            error_kind_counts,
            jump_offsets: BTreeMap::new(),
        }
    }

    fn record(&mut self, outcome: &OrderingOutcome) {
        *self
            .histogram
            .entry(outcome.correct_prefix_len)
            .or_default() += 1;
        *self
            .error_kind_counts
            .entry(outcome.first_error.kind().to_string())
            .or_default() += 1;
        if let FirstError::Jump { offset } = outcome.first_error {
            *self.jump_offsets.entry(offset).or_default() += 1;
        }
    }

    pub fn min_prefix(&self) -> Option<usize> {
        self.histogram.keys().next().copied()
    }

    pub fn max_prefix(&self) -> Option<usize> {
        self.histogram.keys().next_back().copied()
    }

    /// Fraction of replicates with `L < n`.
    pub fn fraction_below(&self, n: usize) -> f64 {
        let below: u64 = self.histogram.range(..n).map(|(_, c)| c).sum();
        below as f64 / self.reps as f64
    }

    pub fn kind_fraction(&self, kind: &str) -> f64 {
        self.error_kind_counts.get(kind).copied().unwrap_or(0) as f64 / self.reps as f64
    }
}

/// `ceil(n')` for the given parameters, the default focus rank.
pub fn default_n_focus(params: &EnsembleParams) -> Result<usize> {
    let t = threshold_n_prime(params.scale(), params.alpha())?;
    Ok((t.n_prime.ceil() as usize).max(1))
}

/// Simulates `reps` replicates on the global rayon pool.
pub fn run_experiment(
    params: &EnsembleParams,
    reps: u64,
    n_focus: usize,
    seed: u64,
) -> Result<ExperimentSummary> {
    run_replicates(params, reps, n_focus, seed)
}

/// Same as [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    params: &EnsembleParams,
    reps: u64,
    n_focus: usize,
    seed: u64,
    threads: usize,
) -> Result<ExperimentSummary> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_replicates(params, reps, n_focus, seed))
}

fn run_replicates(
    params: &EnsembleParams,
    reps: u64,
    n_focus: usize,
    seed: u64,
) -> Result<ExperimentSummary> {
    if reps == 0 {
        return Err(domain("reps must be at least 1"));
    }
    let m = truncation_index(params, n_focus, DEFAULT_TRUNCATION_SAFETY)?;
    let outcomes = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_stream(seed, r);
            let draw = sample_ensemble(params, m, &mut rng)?;
            Ok(ordering_outcome(&draw.counts))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = ExperimentSummary::empty(*params, reps, n_focus, seed, m);
    for o in &outcomes {
        summary.record(o);
    }
    Ok(summary)
}
