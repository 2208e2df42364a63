//! Special functions: log-gamma, the standard normal CDF, Riemann and Hurwitz
//! zeta, the lower incomplete gamma function and inverse zeta.
//!
//! Everything here is double precision and pure.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// B_2, B_4, ..., B_30.
const BERNOULLI_EVEN: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// Tolerance and iteration cap shared by the iterative routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl Precision {
    pub fn new(rel_tol: f64, max_iter: usize) -> Result<Self> {
        let p = Self { rel_tol, max_iter };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1e-3) {
            return Err(domain(format!(
                "rel_tol must lie in (0, 1e-3), got {}",
                self.rel_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(domain("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_one_plus(x) - x.ln()
    } else if x <= 1.5 {
        ln_gamma_one_plus(x - 1.0)
    } else if x <= 2.5 {
        (x - 1.0).ln() + ln_gamma_one_plus(x - 2.0)
    } else if x < 10.0 {
        // Gamma(x) = (x-1)(x-2)...(y) Gamma(y) with y in (1.5, 2.5]
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        prod.ln() + ln_gamma_pos(y)
    } else {
        ln_gamma_stirling(x)
    }
}

fn zeta_minus_one() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // index j holds zeta(j + 2) - 1
        (2..48)
            .map(|k| hurwitz_unchecked(k as f64, 2.0, &Precision::default()).unwrap_or(0.0))
            .collect()
    })
}

/// ln Gamma(1 + z) for |z| <= 0.5 via the Taylor series in (zeta(k) - 1).
fn ln_gamma_one_plus(z: f64) -> f64 {
    let table = zeta_minus_one();
    let mut sum = 0.0;
    let mut zk = -z;
    for (j, zm1) in table.iter().enumerate() {
        let k = (j + 2) as f64;
        zk *= -z;
        let term = zm1 * zk / k;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    -z.ln_1p() + z * (1.0 - EULER_GAMMA) + sum
}

fn ln_gamma_stirling(x: f64) -> f64 {
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360360.0,
        1.0 / 156.0,
        -3617.0 / 122400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut p = inv;
    for c in C {
        corr += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr
}

/// Standard normal CDF, absolute error below 1e-15 across the real line.
pub fn normal_cdf(t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(domain("normal_cdf of NaN"));
    }
    Ok(0.5 * erfc(-t / SQRT_2))
}

pub(crate) fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        return 1.0 - erf_series(x);
    }
    if x > 27.3 {
        return 0.0;
    }
    // modified Lentz on x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = 0.5 * n as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!, all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// Riemann zeta for real `alpha > 1`.
pub fn riemann_zeta(alpha: f64, prec: &Precision) -> Result<f64> {
    hurwitz_zeta(alpha, 1.0, prec)
}

/// Hurwitz zeta `sum_{l >= 0} (l + h)^-alpha` for `alpha > 1`, `h > 0`.
///
/// Euler-Maclaurin summation: `m` leading terms are summed directly and the
/// tail is replaced by its integral plus Bernoulli corrections. The correction
/// series is cut once a term falls below a tenth of the tolerance; if it never
/// does, `m` is doubled and the sum restarted.
pub fn hurwitz_zeta(alpha: f64, h: f64, prec: &Precision) -> Result<f64> {
    prec.validate()?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(domain(format!(
            "zeta requires finite alpha > 1 (diverges otherwise), got {alpha}"
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain(format!(
            "hurwitz zeta requires finite h > 0, got {h}"
        )));
    }
    hurwitz_unchecked(alpha, h, prec)
}

fn hurwitz_unchecked(s: f64, h: f64, prec: &Precision) -> Result<f64> {
    let mut m = (s.ceil() as usize).clamp(10, 1 << 20);
    for _ in 0..prec.max_iter {
        if let Some(v) = euler_maclaurin(s, h, m, prec.rel_tol) {
            return Ok(v);
        }
        m = m.saturating_mul(2);
    }
    Err(Error::Convergence {
        what: "hurwitz zeta",
        iterations: prec.max_iter,
    })
}

fn euler_maclaurin(s: f64, h: f64, m: usize, tol: f64) -> Option<f64> {
    let head: f64 = (0..m).rev().map(|j| (j as f64 + h).powf(-s)).sum();
    let x = m as f64 + h;
    let xs = x.powf(-s);
    let mut total = head + x * xs / (s - 1.0) + 0.5 * xs;

    let mut rising = s;
    let mut xpow = xs / x;
    let mut fact = 2.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        total += term;
        if term.abs() <= 0.1 * tol * total.abs() {
            return Some(total);
        }
        let k = (j + 1) as f64;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        xpow /= x * x;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    None
}

/// Finds `alpha > 1` with `zeta(alpha) = c`.
///
/// `zeta` is strictly decreasing on `(1, inf)` with a pole at 1, so
/// `zeta(1 + 1/c) > c` gives the left end of the bracket; the right end is
/// doubled until `zeta` drops below `c`. Inside the bracket false-position
/// steps alternate with bisection.
pub fn solve_zeta_equals(c: f64, prec: &Precision) -> Result<f64> {
    prec.validate()?;
    if !(c > 1.0) || !c.is_finite() {
        return Err(domain(format!(
            "solve_zeta_equals requires finite c > 1, got {c}"
        )));
    }
    let target = c * prec.rel_tol * 10.0;
    let f = |a: f64| riemann_zeta(a, prec).map(|z| z - c);
    let not_converged = Error::Convergence {
        what: "zeta root bracketing",
        iterations: prec.max_iter,
    };

    let mut lo = 1.0 + 1.0 / c;
    let mut f_lo = f(lo)?;
    let mut hi = (lo + 1.0).max(2.0);
    let mut f_hi = f(hi)?;
    let mut expansions = 0;
    while f_hi >= 0.0 {
        expansions += 1;
        if expansions > prec.max_iter || hi > 1e4 {
            return Err(not_converged);
        }
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f(hi)?;
    }
    if f_lo.abs() <= target {
        return Ok(lo);
    }

    for iter in 0..prec.max_iter {
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let cand = if iter % 2 == 1 || !(secant > lo && secant < hi) {
            0.5 * (lo + hi)
        } else {
            secant
        };
        let fc = f(cand)?;
        if fc.abs() <= target {
            return Ok(cand);
        }
        if fc > 0.0 {
            lo = cand;
            f_lo = fc;
        } else {
            hi = cand;
            f_hi = fc;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Err(Error::Convergence {
        what: "zeta root refinement",
        iterations: prec.max_iter,
    })
}

/// ln of the (unregularized) lower incomplete gamma `gamma(a, x)`.
pub fn ln_lower_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() || !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "lower incomplete gamma requires a > 0 and x > 0, got a={a}, x={x}"
        )));
    }
    if x < a + 1.0 {
        // x^a e^-x sum_j x^j / (a (a+1) ... (a+j))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut j = 0.0;
        while term > 1e-17 * sum {
            j += 1.0;
            term *= x / (a + j);
            sum += term;
        }
        Ok(a * x.ln() - x + sum.ln())
    } else {
        let q = (ln_upper_gamma_cf(a, x) - ln_gamma_pos(a)).exp();
        Ok(ln_gamma_pos(a) + (-q).ln_1p())
    }
}

/// ln Gamma(a, x) by continued fraction, valid for x >= a + 1.
fn ln_upper_gamma_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut f = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    a * x.ln() - x + f.ln()
}
