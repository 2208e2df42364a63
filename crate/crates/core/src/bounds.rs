//! Analytic probability bounds for rank ordering in the Zipf-Poisson ensemble.
//!
//! The central object is the Bonferroni prefix bound: summing the Skellam
//! Chernoff bound `exp(-(sqrt(l_i) - sqrt(l_{i+1}))^2)` over adjacent pairs
//! bounds the probability that the first `n` entities are out of order. The
//! thresholds `n'` and `n-hat` are its asymptotic closed forms. Tail-jump and
//! interloper bounds control entities from deep in the tail, and
//! [`swap_lower_bound`] goes the other way.
//!
//! Logarithms are natural throughout.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::special::{self, ln_gamma_pos, Precision};

/// Teicher's floor: `Pr(Poi(l) <= l) >= e^-1` for every `l > 0`.
pub const TEICHER_FLOOR: f64 = 0.367_879_441_171_442_33;

/// Berry-Esseen constant for the Poisson distribution.
pub const BERRY_ESSEEN_POISSON: f64 = 0.8;

/// `(N, alpha, k)`: entity `i >= 1` has mean `N (i + k)^-alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct EnsembleParams {
    #[serde(rename = "N")]
    scale: f64,
    alpha: f64,
    k: f64,
}

#[derive(Deserialize)]
struct RawParams {
    #[serde(rename = "N")]
    scale: f64,
    alpha: f64,
    #[serde(default)]
    k: f64,
}

impl TryFrom<RawParams> for EnsembleParams {
    type Error = crate::Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.scale, raw.alpha, raw.k)
    }
}

impl EnsembleParams {
    pub fn new(scale: f64, alpha: f64, k: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(domain(format!(
                "N must be finite and positive, got {scale}"
            )));
        }
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(domain(format!("alpha must be finite and > 1, got {alpha}")));
        }
        if !(k >= 0.0) || !k.is_finite() {
            return Err(domain(format!("k must be finite and >= 0, got {k}")));
        }
        Ok(Self { scale, alpha, k })
    }

    /// Pure Zipf means `N i^-alpha`.
    pub fn zipf(scale: f64, alpha: f64) -> Result<Self> {
        Self::new(scale, alpha, 0.0)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Poisson mean of the entity with true rank `i` (1-based).
    pub fn mean_of(&self, i: usize) -> f64 {
        self.scale * (i as f64 + self.k).powf(-self.alpha)
    }

    fn require_zipf(&self, op: &str) -> Result<()> {
        if self.k != 0.0 {
            return Err(domain(format!(
                "{op} is only defined for k = 0, got k = {}",
                self.k
            )));
        }
        Ok(())
    }
}

/// Per-pair Chernoff terms for the first `n` ranks and their union bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub per_pair_terms: Vec<f64>,
    pub bonferroni_sum: f64,
    pub clamped_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    #[serde(rename = "A_const")]
    pub a_const: f64,
    pub n_prime: f64,
    pub n_prime_floor: u64,
    pub inputs: EnsembleParams,
    #[serde(rename = "log_N")]
    pub log_n: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickResult {
    pub n: usize,
    /// `p(n)` at the returned `n`.
    pub bound_at_n: f64,
    /// The search stopped at `n_max` rather than at the first `p(n+1) > epsilon`.
    pub cap_reached: bool,
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(domain(format!(
            "{name} must be finite and positive, got {v}"
        )));
    }
    Ok(())
}

/// `exp(-(sqrt(lambda) - sqrt(nu))^2)`, an upper bound on
/// `Pr(Poi(lambda) <= Poi(nu))` for independent counts with `lambda >= nu`.
pub fn skellam_order_bound(lambda: f64, nu: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    require_positive("nu", nu)?;
    if lambda < nu {
        return Err(domain(format!(
            "skellam bound needs lambda >= nu, got lambda={lambda}, nu={nu}"
        )));
    }
    let d = lambda.sqrt() - nu.sqrt();
    Ok((-d * d).exp())
}

fn poisson_kernel(lambda: f64, t: f64) -> f64 {
    // e^-l l^t / Gamma(t + 1)
    let log_pow = if t == 0.0 { 0.0 } else { t * lambda.ln() };
    (-lambda + log_pow - ln_gamma_pos(t + 1.0)).exp()
}

/// Bound on `Pr(Poi(lambda) >= t)` for real `t >= lambda`.
pub fn poisson_upper_tail_bound(lambda: f64, t: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    if !(t >= lambda) || !t.is_finite() {
        return Err(domain(format!(
            "upper tail bound needs t >= lambda, got t={t}, lambda={lambda}"
        )));
    }
    Ok(poisson_kernel(lambda, t) / (1.0 - lambda / (t + 1.0)))
}

/// Bound on `Pr(Poi(lambda) <= t)` for real `0 <= t < lambda`.
pub fn poisson_lower_tail_bound(lambda: f64, t: f64) -> Result<f64> {
    require_positive("lambda", lambda)?;
    if !(t >= 0.0 && t < lambda) {
        return Err(domain(format!(
            "lower tail bound needs 0 <= t < lambda, got t={t}, lambda={lambda}"
        )));
    }
    Ok(poisson_kernel(lambda, t) / (1.0 - t / lambda))
}

/// Chernoff term for the pair `(i, i+1)`.
fn pair_term(i: usize, params: &EnsembleParams) -> f64 {
    let x = i as f64 + params.k;
    let half = 0.5 * params.alpha;
    let upper = x.powf(-half);
    // (x)^-a/2 - (x+1)^-a/2 without cancellation
    let gap = -upper * (half * (-1.0 / (x + 1.0)).ln_1p()).exp_m1();
    (-params.scale * gap * gap).exp()
}

/// `p(n; N, alpha, k) = sum_{i=1}^{n-1} exp(-N ((i+k)^-a/2 - (i+k+1)^-a/2)^2)`.
///
/// Bounds the probability that `X_1 > X_2 > ... > X_n` fails. For `n <= 1`
/// the sum is empty.
pub fn prefix_error_bound(n: usize, params: &EnsembleParams) -> BoundReport {
    let per_pair_terms: Vec<f64> = (1..n.max(1)).map(|i| pair_term(i, params)).collect();
    let bonferroni_sum: f64 = per_pair_terms.iter().sum();
    BoundReport {
        n,
        per_pair_terms,
        bonferroni_sum,
        clamped_probability: bonferroni_sum.min(1.0),
    }
}

/// The looser closed form `n exp(-(N alpha^2 / 4) n^(-alpha-2))` of the prefix
/// bound, defined for pure Zipf means.
pub fn prefix_error_closed_form(n: usize, params: &EnsembleParams) -> Result<f64> {
    params.require_zipf("prefix_error_closed_form")?;
    if n < 2 {
        return Err(domain(format!(
            "closed-form prefix bound needs n >= 2, got {n}"
        )));
    }
    let a = params.alpha;
    let nf = n as f64;
    Ok(nf * (-(params.scale * a * a / 4.0) * nf.powf(-a - 2.0)).exp())
}

/// Largest `n <= n_max` with `p(n) <= epsilon`.
///
/// `p` is a running sum of nonnegative terms, so the scan stops at the first
/// `n` whose successor would exceed `epsilon`. Since `p(1) = 0` the result is
/// at least 1.
pub fn pick_n(params: &EnsembleParams, epsilon: f64, n_max: usize) -> Result<PickResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if n_max == 0 {
        return Err(domain("n_max must be at least 1"));
    }
    let mut n = 1;
    let mut sum = 0.0;
    while n < n_max {
        let next = sum + pair_term(n, params);
        if next > epsilon {
            break;
        }
        sum = next;
        n += 1;
    }
    Ok(PickResult {
        n,
        bound_at_n: sum,
        cap_reached: n == n_max,
    })
}

/// `A(alpha) = alpha^2 (alpha + 2) / 4`.
pub fn threshold_a(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(domain(format!("A(alpha) needs alpha > 1, got {alpha}")));
    }
    Ok(alpha * alpha * (alpha + 2.0) / 4.0)
}

/// `n' = (A(alpha) N / ln N)^(1/(alpha+2))`.
pub fn threshold_n_prime(scale: f64, alpha: f64) -> Result<ThresholdReport> {
    let inputs = EnsembleParams::zipf(scale, alpha)?;
    if !(scale > 1.0) {
        return Err(domain(format!(
            "n' needs N > 1 so that ln N > 0, got {scale}"
        )));
    }
    let a_const = threshold_a(alpha)?;
    let log_n = scale.ln();
    let n_prime = (a_const * scale / log_n).powf(1.0 / (alpha + 2.0));
    Ok(ThresholdReport {
        a_const,
        n_prime,
        n_prime_floor: n_prime.floor() as u64,
        inputs,
        log_n,
    })
}

/// `n-hat`: the `n'` threshold with `N` estimated as `T / zeta(alpha)`.
pub fn threshold_n_hat(total: f64, alpha: f64) -> Result<f64> {
    require_positive("T", total)?;
    let zeta = special::riemann_zeta(alpha, &Precision::default())?;
    let scale = total / zeta;
    if !(scale > 1.0) {
        return Err(domain(format!(
            "n-hat needs T / zeta(alpha) > 1, got {scale} (T too small)"
        )));
    }
    Ok(threshold_n_prime(scale, alpha)?.n_prime)
}

fn check_jump_level(n: usize, tau: f64, params: &EnsembleParams) -> Result<f64> {
    if n == 0 {
        return Err(domain("tail bounds need n >= 1"));
    }
    let lambda_n = params.mean_of(n);
    if !(tau >= lambda_n) || !tau.is_finite() {
        return Err(domain(format!(
            "tail bounds need tau >= lambda_n = {lambda_n}, got tau = {tau}"
        )));
    }
    if !(tau > 1.0 / params.alpha) {
        return Err(domain(format!(
            "tail bounds need tau > 1/alpha = {}, got tau = {tau}",
            1.0 / params.alpha
        )));
    }
    Ok(lambda_n)
}

/// Closed-form bound on `Pr(max_{i>n} X_i > tau)` for `tau >= lambda_n`:
///
/// `N^(1/a) / a * (tau+1) / (tau+1-lambda_n) * tau^(-1/a) / (tau - 1/a)`.
///
/// This form does not shrink as `n` grows; see [`jumper_tail_bound`] for the
/// sharper incomplete-gamma version.
pub fn jumper_bound(n: usize, tau: f64, params: &EnsembleParams) -> Result<f64> {
    params.require_zipf("jumper_bound")?;
    let lambda_n = check_jump_level(n, tau, params)?;
    let a = params.alpha;
    Ok(
        params.scale.powf(1.0 / a) / a * (tau + 1.0) / (tau + 1.0 - lambda_n) * tau.powf(-1.0 / a)
            / (tau - 1.0 / a),
    )
}

/// Bound on `Pr(max_{i>n} X_i >= tau)` that keeps the incomplete gamma
/// integral instead of replacing it by a complete gamma function:
///
/// `(tau+1) / (tau+1-lambda_n) * N^(1/a) / a * gamma(tau - 1/a, lambda_n) / Gamma(tau+1)`.
///
/// Valid for any shift `k` (the tail sum is compared with an integral starting
/// at `n + k`). It never exceeds [`jumper_bound`] and tends to 0 as `n` grows.
pub fn jumper_tail_bound(n: usize, tau: f64, params: &EnsembleParams) -> Result<f64> {
    let lambda_n = check_jump_level(n, tau, params)?;
    let a = params.alpha;
    let shape = tau - 1.0 / a;
    let ln_bound = ((tau + 1.0) / (tau + 1.0 - lambda_n)).ln() + params.scale.ln() / a - a.ln()
        + special::ln_lower_gamma(shape, lambda_n)?
        - ln_gamma_pos(tau + 1.0);
    Ok(ln_bound.exp())
}

/// Bound on `Pr(max_{i>n} X_i >= X_m)` for `m < n`: the jumper bound at
/// `tau = sqrt(lambda_m lambda_n)` plus the Chebyshev bound on `Pr(X_m <= tau)`.
pub fn interloper_bound(m: usize, n: usize, params: &EnsembleParams) -> Result<f64> {
    params.require_zipf("interloper_bound")?;
    if m == 0 || m >= n {
        return Err(domain(format!(
            "interloper bound needs 1 <= m < n, got m={m}, n={n}"
        )));
    }
    let lambda_m = params.mean_of(m);
    let tau = interloper_level(m, n, params);
    let chebyshev = lambda_m / ((tau - lambda_m) * (tau - lambda_m));
    Ok(jumper_bound(n, tau, params)? + chebyshev)
}

/// `tau = sqrt(lambda_m lambda_n) = N (m n)^(-alpha/2)`.
pub fn interloper_level(m: usize, n: usize, params: &EnsembleParams) -> f64 {
    (params.mean_of(m) * params.mean_of(n)).sqrt()
}

/// `0.8 / sqrt(lambda)`.
pub fn berry_esseen_gap(lambda: f64) -> f64 {
    BERRY_ESSEEN_POISSON / lambda.sqrt()
}

pub fn teicher_floor() -> f64 {
    TEICHER_FLOOR
}

/// Finite-N lower bound on `Pr(X_{i+1} >= X_i)`:
/// `e^-1 max(0, Phi((l_{i+1} - l_i) / sqrt(l_{i+1})) - 0.8 / sqrt(l_{i+1}))`.
pub fn swap_lower_bound(i: usize, params: &EnsembleParams) -> f64 {
    let i = i.max(1);
    let hi = params.mean_of(i);
    let lo = params.mean_of(i + 1);
    let z = (lo - hi) / lo.sqrt();
    // z is finite for valid params
    let phi = special::normal_cdf(z).unwrap_or(0.0);
    TEICHER_FLOOR * (phi - berry_esseen_gap(lo)).max(0.0)
}

/// Limiting swap probability `Phi(-alpha (2C)^(-alpha/2)) / 3` for adjacent
/// pairs in the window `[C/2, C] N^(1/(alpha+2))`.
pub fn swap_asymptotic_constant(alpha: f64, c: f64) -> Result<f64> {
    threshold_a(alpha)?;
    require_positive("C", c)?;
    Ok(special::normal_cdf(-alpha * (2.0 * c).powf(-alpha / 2.0))? / 3.0)
}
