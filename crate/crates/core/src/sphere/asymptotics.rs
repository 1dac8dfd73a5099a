//! Decay of the positive sphere eigenvalues `lambda_{2n+1}`.
//!
//! `lambda_{2n+1} = Gamma(d/2) sum_s theta_n(s)` with
//! `theta_n(s) = sqrt(pi)/8 * Gamma(s+n+1/2)^2 / (Gamma(s+2n+(d+3)/2) s!)`.
//! The summand peaks at `s_n = ceil((2n-1)^2 / (2(d+3)) - 1)`, and the
//! eigenvalues decay like `n^{-(d+1)}`.

use statrs::function::gamma::ln_gamma;

use super::coeff::SignedLog;
use super::series::{decay_exponent, recurrent_terms, sum_unimodal};
use crate::error::Result;

/// `theta_n(s)` in log form. `s` may be fractional.
pub fn theta(d: usize, n: usize, s: f64) -> SignedLog {
    let (df, nf) = (d as f64, n as f64);
    let ln = 0.5 * std::f64::consts::PI.ln() - 8f64.ln() + 2.0 * ln_gamma(s + nf + 0.5)
        - ln_gamma(s + 2.0 * nf + (df + 3.0) / 2.0)
        - ln_gamma(s + 1.0);
    SignedLog::new(1, ln)
}

/// `theta_n(s+1) / theta_n(s) = (s+n+1/2)^2 / ((s+1)(s+2n+(d+3)/2))`.
pub fn alpha_ratio(d: usize, n: usize, s: f64) -> f64 {
    let (df, nf) = (d as f64, n as f64);
    (s + nf + 0.5).powi(2) / ((s + 1.0) * (s + 2.0 * nf + (df + 3.0) / 2.0))
}

/// The real root `s* = (2n-1)^2 / (2(d+3)) - 1` of `alpha_ratio = 1`.
pub fn s_star(d: usize, n: usize) -> f64 {
    let m = 2.0 * n as f64 - 1.0;
    m * m / (2.0 * (d as f64 + 3.0)) - 1.0
}

/// Index of the largest `theta_n(s)` over `s >= 0`: `ceil(s*)` clamped at 0.
pub fn s_peak(d: usize, n: usize) -> usize {
    let m = 2 * n as i128 - 1;
    let den = 2 * (d as i128 + 3);
    let num = m * m - den;
    if num <= 0 {
        0
    } else {
        ((num + den - 1) / den) as usize
    }
}

/// `lambda_{2n+1}` from the theta series.
pub fn positive_eigenvalue(d: usize, n: usize, tol: f64) -> Result<f64> {
    let terms = recurrent_terms(|s| theta(d, n, s as f64), |s| alpha_ratio(d, n, s as f64), 0);
    let sum = sum_unimodal(terms, decay_exponent(d), tol)?;
    Ok(ln_gamma(d as f64 / 2.0).exp() * sum.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub lambda: f64,
    /// `lambda * n^{d+1}`.
    pub normalized: f64,
    pub s_peak: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticScan {
    pub d: usize,
    pub rows: Vec<ScanRow>,
}

impl AsymptoticScan {
    /// max / min of the normalized products over rows with `n >= 1`.
    pub fn normalized_ratio(&self) -> f64 {
        let vals = self.rows.iter().filter(|r| r.n >= 1).map(|r| r.normalized);
        let (lo, hi) = vals.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        hi / lo
    }
}

/// A series tolerance that keeps scans fast and accurate to about `1e-10`.
pub const SCAN_TOL: f64 = 1e-10;

pub fn asymptotic_scan(d: usize, n_range: std::ops::RangeInclusive<usize>, tol: f64) -> Result<AsymptoticScan> {
    let rows = n_range
        .map(|n| {
            let lambda = positive_eigenvalue(d, n, tol)?;
            Ok(ScanRow { n, lambda, normalized: lambda * (n as f64).powi(d as i32 + 1), s_peak: s_peak(d, n) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticScan { d, rows })
}
