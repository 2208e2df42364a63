//! Reference computations shared by the integration tests. They use statrs
//! for log-factorials so they stay independent of the crate's own special
//! functions.
#![allow(dead_code)]

use statrs::function::factorial::ln_factorial;
use zipfpoi_core::simulate::{FirstError, OrderingOutcome};

/// Counts of the ten most frequent BNC words.
pub const TABLE1: [(&str, u64); 10] = [
    ("the", 6_187_267),
    ("be", 4_239_632),
    ("of", 3_093_444),
    ("and", 2_687_863),
    ("a", 2_186_369),
    ("in", 1_924_315),
    ("to", 1_620_850),
    ("have", 1_375_636),
    ("it", 1_090_186),
    ("to", 1_039_323),
];

pub fn pmf(lambda: f64, x: u64) -> f64 {
    (-lambda + x as f64 * lambda.ln() - ln_factorial(x)).exp()
}

/// `Pr(Poi(lambda) >= x0)` by direct summation upward from `x0`.
pub fn upper_tail(lambda: f64, x0: u64) -> f64 {
    let mut sum = 0.0;
    let mut x = x0;
    loop {
        let p = pmf(lambda, x);
        sum += p;
        if x as f64 > lambda && (p < 1e-18 * sum || p == 0.0) {
            return sum;
        }
        x += 1;
    }
}

/// `Pr(Poi(lambda) <= x1)`.
pub fn lower_tail(lambda: f64, x1: u64) -> f64 {
    (0..=x1).map(|x| pmf(lambda, x)).sum()
}

/// `Pr(Poi(lambda) <= Poi(nu))` for independent variables, summed over a
/// window of +-40 standard deviations.
pub fn prob_not_above(lambda: f64, nu: f64) -> f64 {
    let big = lambda.max(nu);
    let spread = 40.0 * big.sqrt() + 60.0;
    let lo = (lambda.min(nu) - spread).max(0.0) as u64;
    let hi = (big + spread) as u64;
    let nu_pmf: Vec<f64> = (lo..=hi).map(|x| pmf(nu, x)).collect();
    let mut tail = vec![0.0; nu_pmf.len() + 1];
    for j in (0..nu_pmf.len()).rev() {
        tail[j] = tail[j + 1] + nu_pmf[j];
    }
    (lo..=hi).zip(&tail).map(|(x, t)| pmf(lambda, x) * t).sum()
}

/// The ordering definition applied literally: try every prefix length.
pub fn brute_force_outcome(counts: &[u64]) -> OrderingOutcome {
    let m = counts.len();
    let holds = |n: usize| -> bool { (0..n).all(|j| (j + 1..m).all(|i| counts[j] > counts[i])) };
    let len = (0..=m).rev().find(|&n| holds(n)).unwrap();
    if len == m {
        return OrderingOutcome {
            correct_prefix_len: len,
            first_error: FirstError::None,
            blocker_index: None,
        };
    }
    let displaced = len + 1;
    let mut blocker = displaced + 1;
    for b in displaced + 1..=m {
        if counts[b - 1] > counts[blocker - 1] {
            blocker = b;
        }
    }
    let first_error = if counts[blocker - 1] == counts[displaced - 1] {
        FirstError::Tie
    } else if blocker == displaced + 1 {
        FirstError::Transposition
    } else {
        FirstError::Jump {
            offset: blocker - displaced,
        }
    };
    OrderingOutcome {
        correct_prefix_len: len,
        first_error,
        blocker_index: Some(blocker),
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub const Z99: f64 = 2.575_829_303_548_901;
