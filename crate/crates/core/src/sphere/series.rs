//! Eigenvalues of the sphere kernels from their power-series coefficients.
//!
//! For a zonal kernel `sum_n c_n (x . y)^n` on `S^d`, each degree-`j`
//! spherical harmonic is an eigenfunction with eigenvalue
//!
//! ```text
//! Gamma(d/2) / 2^{j+1} * sum_s c_{2s+j} (2s+j)!/(2s)! * Gamma(s+1/2) / Gamma(s+j+(d+1)/2)
//! ```
//!
//! All summands of one series share a sign. They rise to a single peak and
//! then decay like `s^{-(d+3)/2}`, so the sum is only truncated after the
//! peak, and the remainder is estimated from that power law.
//!
//! Consecutive summands are generated by their exact rational ratio rather
//! than by fresh log-gamma evaluations. Far past the peak the individual
//! log-gammas are in the millions and their rounding errors no longer
//! cancel, which would cap the relative accuracy of the sum near `1e-8`.

use statrs::function::gamma::ln_gamma;

use super::coeff::{coeff, coeff_ratio, KernelKind, SignedLog};
use crate::error::{Error, Result};

/// Maximum number of summands before giving up.
pub const TERM_BUDGET: usize = 10_000_000;

/// Consecutive sub-tolerance summands required after the peak.
const QUIET_TERMS: usize = 8;

/// Outcome of a peak-aware series summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    /// Partial sum plus the estimated remainder.
    pub value: f64,
    /// The estimated remainder alone.
    pub tail: f64,
    /// Number of summands evaluated.
    pub terms: usize,
    /// Index of the largest summand.
    pub peak: usize,
}

/// Sums `term(0) + term(1) + ...` for a same-sign sequence that is
/// unimodal and eventually decays like `s^{-decay}` with `decay > 1`.
///
/// Stops once the peak has been passed and `QUIET_TERMS` consecutive
/// terms fall below `tol * |partial sum|`. The remainder is modelled as
/// `A (s + c)^{-decay}` with `A, c` fitted to the last two terms and
/// summed with the Euler-Maclaurin formula.
pub fn sum_unimodal<F: FnMut(usize) -> SignedLog>(mut term: F, decay: f64, tol: f64) -> Result<SeriesSum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("series tolerance must be positive, got {tol}")));
    }
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut peak = 0;
    let mut peak_ln = f64::NEG_INFINITY;
    let mut past_peak = false;
    let mut prev: Option<SignedLog> = None;
    for s in 0..TERM_BUDGET {
        let t = term(s);
        if t.is_zero() {
            quiet += usize::from(past_peak || s > 0);
            if quiet >= QUIET_TERMS {
                return Ok(SeriesSum { value: sum, tail: 0.0, terms: s + 1, peak });
            }
            continue;
        }
        if t.ln_abs > peak_ln {
            peak_ln = t.ln_abs;
            peak = s;
        } else {
            past_peak = true;
        }
        let value = t.to_f64();
        sum += value;
        if past_peak && value.abs() < tol * sum.abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= QUIET_TERMS {
            let tail = prev.map_or(0.0, |p| power_law_tail(p, t, s, decay));
            return Ok(SeriesSum { value: sum + tail, tail, terms: s + 1, peak });
        }
        prev = Some(t);
    }
    Err(Error::ToleranceNotReached { tol, budget: TERM_BUDGET, partial: sum })
}

/// Remainder `sum_{k > s} t_k` for `t_k = A (k + c)^{-p}` matched to
/// `t_{s-1}` and `t_s`.
fn power_law_tail(before: SignedLog, last: SignedLog, s: usize, p: f64) -> f64 {
    let s = s as f64;
    // r = (s - 1 + c) / (s + c)
    let r = ((last.ln_abs - before.ln_abs) / p).exp();
    if !(r < 1.0) {
        return 0.0;
    }
    let c = (s - 1.0 - r * s) / (r - 1.0);
    let a = s + 1.0 + c;
    if a <= 1.0 {
        return 0.0;
    }
    // t_k / t_s = ((s + c) / (k + c))^p; sum over k >= s + 1 via Euler-Maclaurin
    // for the Hurwitz zeta function zeta(p, a).
    let zeta = a.powf(1.0 - p) / (p - 1.0) + 0.5 * a.powf(-p) + p * a.powf(-p - 1.0) / 12.0
        - p * (p + 1.0) * (p + 2.0) * a.powf(-p - 3.0) / 720.0;
    let scale = (s + c).powf(p);
    last.to_f64() * scale * zeta
}

/// Exponent of the power-law decay of the eigenvalue series on `S^d`.
pub fn decay_exponent(d: usize) -> f64 {
    (d as f64 + 3.0) / 2.0
}

/// Log-form summand `s` of the degree-`j` eigenvalue series on `S^d`,
/// including the prefactor `Gamma(d/2) / 2^{j+1}`.
pub fn series_term(kind: KernelKind, d: usize, j: usize, s: usize) -> SignedLog {
    let c = coeff(kind, (2 * s + j) as u64);
    if c.is_zero() {
        return SignedLog::ZERO;
    }
    let (df, jf, sf) = (d as f64, j as f64, s as f64);
    let ln = ln_gamma(df / 2.0) - (jf + 1.0) * std::f64::consts::LN_2
        + c.ln_abs
        + ln_gamma(2.0 * sf + jf + 1.0)
        - ln_gamma(2.0 * sf + 1.0)
        + ln_gamma(sf + 0.5)
        - ln_gamma(sf + jf + (df + 1.0) / 2.0);
    SignedLog::new(c.sign, ln)
}

/// `series_term(s + 1) / series_term(s)`, valid when `2s + j >= 1`.
fn term_ratio(kind: KernelKind, d: usize, j: usize, s: usize) -> f64 {
    let (df, jf, sf) = (d as f64, j as f64, s as f64);
    coeff_ratio(kind, (2 * s + j) as u64) * (2.0 * sf + jf + 1.0) * (2.0 * sf + jf + 2.0)
        / ((2.0 * sf + 1.0) * (2.0 * sf + 2.0))
        * (sf + 0.5)
        / (sf + jf + (df + 1.0) / 2.0)
}

/// Turns a direct evaluator and a ratio into a sequential term generator:
/// terms `0..=direct_until` are evaluated directly, later ones as
/// `t_s = t_{s-1} * ratio(s - 1)`. Must be called with `s = 0, 1, 2, ...`.
pub(crate) fn recurrent_terms(
    direct: impl Fn(usize) -> SignedLog,
    ratio: impl Fn(usize) -> f64,
    direct_until: usize,
) -> impl FnMut(usize) -> SignedLog {
    let mut last = SignedLog::ZERO;
    move |s| {
        last = if s <= direct_until { direct(s) } else { SignedLog::new(last.sign, last.ln_abs + ratio(s - 1).ln()) };
        last
    }
}

/// Degree-`j` eigenvalue of the kernel operator on `S^d` from the series,
/// summed to relative tolerance `tol`.
pub fn eigenvalue_series_sum(kind: KernelKind, d: usize, j: usize, tol: f64) -> Result<SeriesSum> {
    if d == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
    }
    if kind == KernelKind::Snowflake && j % 2 == 0 {
        // Only b_0 is nonzero among the even coefficients.
        let value = if j == 0 { series_term(kind, d, 0, 0).to_f64() } else { 0.0 };
        return Ok(SeriesSum { value, tail: 0.0, terms: 1, peak: 0 });
    }
    // For j = 0 the first summand carries the special coefficient a_0.
    let direct_until = usize::from(j == 0);
    let terms = recurrent_terms(|s| series_term(kind, d, j, s), |s| term_ratio(kind, d, j, s), direct_until);
    sum_unimodal(terms, decay_exponent(d), tol)
}

pub fn eigenvalue_series(kind: KernelKind, d: usize, j: usize, tol: f64) -> Result<f64> {
    eigenvalue_series_sum(kind, d, j, tol).map(|s| s.value)
}
