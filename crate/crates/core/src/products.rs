//! Spectra and embeddings of product spaces.
//!
//! For `X x Y` with the root-sum-square metric and the product measure the
//! kernel splits as `K_X (x) 1 + 1 (x) K_Y`. After double centering every
//! nonzero eigenpair of the product is a lifted factor eigenpair `u (x) 1`
//! or `1 (x) v`, so the MDS map is the concatenation of the factor maps and
//! squared embedded distances add up.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mds::{classical_mds, row_distance_sq, EmbeddingResult};
use crate::spaces::{sample, AnalyticSpace, FiniteSpace, SampleSpec};

/// Which factor an eigenpair of the product comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First(usize),
    Second(usize),
}

/// The predicted nonzero spectrum of a product space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPrediction {
    /// Nonzero eigenvalues sorted descending, each with its origin.
    pub spectrum: Vec<(f64, Factor)>,
    first: EmbeddingResult,
    second: EmbeddingResult,
}

impl ProductPrediction {
    pub fn positive_eigenvalues(&self) -> Vec<f64> {
        self.spectrum.iter().map(|s| s.0).filter(|&l| l > 0.0).collect()
    }

    /// All `n_A n_B` predicted eigenvalues, zeros included, descending.
    pub fn full_spectrum(&self) -> Vec<f64> {
        let n = self.first.len() * self.second.len();
        let mut all: Vec<f64> = self.spectrum.iter().map(|s| s.0).collect();
        all.resize(n, 0.0);
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }

    /// Lifted eigenfunction of spectrum entry `k` on the product, indexed
    /// like [`FiniteSpace::product`].
    pub fn eigenfunction(&self, k: usize) -> DVector<f64> {
        let nb = self.second.len();
        let n = self.first.len() * nb;
        match self.spectrum[k].1 {
            Factor::First(c) => DVector::from_fn(n, |p, _| self.first.eigenfunctions()[(p / nb, c)]),
            Factor::Second(c) => DVector::from_fn(n, |p, _| self.second.eigenfunctions()[(p % nb, c)]),
        }
    }

    /// Predicted `|M(p) - M(q)|^2` over the positive part for product
    /// indices `p`, `q`.
    pub fn distance_sq(&self, p: usize, q: usize) -> f64 {
        let nb = self.second.len();
        factor_distance_sq(&self.first, p / nb, q / nb) + factor_distance_sq(&self.second, p % nb, q % nb)
    }
}

fn factor_distance_sq(e: &EmbeddingResult, i: usize, j: usize) -> f64 {
    (0..e.positive_count())
        .map(|k| e.eigenvalues()[k] * (e.eigenfunctions()[(i, k)] - e.eigenfunctions()[(j, k)]).powi(2))
        .sum()
}

/// Merges the nonzero spectra of two factor decompositions.
pub fn predict_product_spectrum(first: &EmbeddingResult, second: &EmbeddingResult) -> ProductPrediction {
    let lift = |e: &EmbeddingResult, tag: fn(usize) -> Factor| {
        e.eigenvalues()
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != 0.0)
            .map(|(k, &l)| (l, tag(k)))
            .collect::<Vec<_>>()
    };
    let mut spectrum = lift(first, Factor::First);
    spectrum.extend(lift(second, Factor::Second));
    spectrum.sort_by(|a, b| b.0.total_cmp(&a.0));
    ProductPrediction { spectrum, first: first.clone(), second: second.clone() }
}

/// `max_k |a_k - b_k|` between two descending eigenvalue lists, the
/// shorter one padded with zeros.
pub fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Result of comparing a product decomposition with its prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    /// Distance between predicted and computed eigenvalue multisets.
    pub spectrum_error: f64,
    /// Largest violation of distance additivity over all pairs.
    pub additivity_error: f64,
}

/// Builds `a x b`, embeds it, and compares with the factor embeddings.
pub fn verify_product_embedding(a: &FiniteSpace, b: &FiniteSpace) -> Result<ProductReport> {
    let (ea, eb) = (classical_mds(a)?, classical_mds(b)?);
    let product = a.product(b)?;
    let direct = classical_mds(&product)?;
    let prediction = predict_product_spectrum(&ea, &eb);
    let spectrum_error = spectrum_distance(&prediction.full_spectrum(), direct.eigenvalues());
    let pts = direct.embed(direct.positive_count());
    let n = product.len();
    let mut additivity_error: f64 = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            additivity_error = additivity_error.max((row_distance_sq(&pts, p, q) - prediction.distance_sq(p, q)).abs());
        }
    }
    Ok(ProductReport { spectrum_error, additivity_error })
}

/// Summary of the flat-torus identity `|M(x) - M(y)|^2 = pi sum_i d(x_i, y_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusReport {
    pub pairs: usize,
    pub max_abs_error: f64,
    /// Largest `|error| / (pi sum_i d_i)` over pairs of distinct points.
    pub max_rel_error: f64,
    /// `min (|M(x) - M(y)|^2 - pi max_i d_i)`; negative means the lower
    /// bound failed by that much.
    pub lower_margin: f64,
    /// `min (pi sum_i d_i - |M(x) - M(y)|^2)`.
    pub upper_margin: f64,
}

/// Truncated per-factor embedding of the `n`-point circle grid: the top
/// `trunc + 1` positive eigenvalues, which for odd `trunc` are exactly the
/// odd frequencies up to `trunc`, each twice.
struct CircleFactor {
    lambdas: Vec<f64>,
    functions: DMatrix<f64>,
}

impl CircleFactor {
    fn new(n: usize, trunc: usize) -> Result<Self> {
        let grid = sample(&AnalyticSpace::circle(), &SampleSpec::grid(n))?;
        let e = classical_mds(&grid)?;
        let keep = (trunc + 1).min(e.positive_count());
        Ok(CircleFactor {
            lambdas: e.eigenvalues()[..keep].to_vec(),
            functions: e.eigenfunctions().columns(0, keep).into_owned(),
        })
    }

    fn distance_sq(&self, i: usize, j: usize) -> f64 {
        self.lambdas
            .iter()
            .enumerate()
            .map(|(k, l)| l * (self.functions[(i, k)] - self.functions[(j, k)]).powi(2))
            .sum()
    }
}

fn grid_geodesic(n: usize, i: usize, j: usize) -> f64 {
    let steps = i.abs_diff(j);
    std::f64::consts::PI * 2.0 * steps.min(n - steps) as f64 / n as f64
}

/// Checks the torus identity on `pairs` random pairs of points of the
/// `k`-fold product of `n`-point circle grids.
///
/// Product additivity reduces the embedded distance to a sum of circle
/// terms, so each factor is embedded once and the `n^k`-point product is
/// never formed. [`verify_product_embedding`] checks that reduction on
/// explicit products.
pub fn torus_check(n: usize, k: usize, trunc: usize, pairs: usize, seed: u64) -> Result<TorusReport> {
    if n < 2 || k == 0 || trunc == 0 {
        return Err(Error::InvalidArgument(format!("torus check needs n >= 2, k >= 1, trunc >= 1 (got {n}, {k}, {trunc})")));
    }
    let factor = CircleFactor::new(n, trunc)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TorusReport {
        pairs,
        max_abs_error: 0.0,
        max_rel_error: 0.0,
        lower_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
    };
    for _ in 0..pairs {
        let (mut embedded, mut sum, mut max) = (0.0, 0.0, 0.0f64);
        for _ in 0..k {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            embedded += factor.distance_sq(i, j);
            let d = grid_geodesic(n, i, j);
            sum += d;
            max = max.max(d);
        }
        let pi = std::f64::consts::PI;
        let err = (embedded - pi * sum).abs();
        report.max_abs_error = report.max_abs_error.max(err);
        if sum > 0.0 {
            report.max_rel_error = report.max_rel_error.max(err / (pi * sum));
        }
        report.lower_margin = report.lower_margin.min(embedded - pi * max);
        report.upper_margin = report.upper_margin.min(pi * sum - embedded);
    }
    Ok(report)
}
