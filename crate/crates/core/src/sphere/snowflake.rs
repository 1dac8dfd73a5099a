//! Truncated MDS embedding of `S^d` and the snowflake identity
//! `|M(x) - M(y)|^2 = pi dist(x, y)`.

use std::f64::consts::PI;

use super::coeff::KernelKind;
use super::quadrature::{eigenvalue_quadrature, multiplicity, zonal_polynomial};
use crate::error::{Error, Result};
use crate::spaces::geodesic;

/// The positive part of the sphere MDS map, kept up to a maximal degree.
///
/// By the addition theorem, summing `u(x) u(y)` over an orthonormal basis
/// of degree-`j` harmonics gives `N(d, j) P_j(x . y)`, so squared embedded
/// distances only need the eigenvalues and multiplicities.
#[derive(Debug, Clone)]
pub struct TruncatedSphereEmbedding {
    d: usize,
    degrees: Vec<(usize, f64, f64)>,
}

impl TruncatedSphereEmbedding {
    /// Uses quadrature eigenvalues of the full kernel for odd degrees up to
    /// `max_degree`.
    pub fn new(d: usize, max_degree: usize) -> Result<Self> {
        if max_degree == 0 {
            return Err(Error::InvalidArgument("truncation degree must be >= 1".into()));
        }
        let degrees = (1..=max_degree)
            .step_by(2)
            .map(|j| Ok((j, eigenvalue_quadrature(d, j, KernelKind::Full)?, multiplicity(d, j))))
            .collect::<Result<Vec<_>>>()?;
        Ok(TruncatedSphereEmbedding { d, degrees })
    }

    /// Uses caller-supplied `(degree, eigenvalue)` pairs.
    pub fn from_eigenvalues(d: usize, eigenvalues: &[(usize, f64)]) -> Self {
        let degrees = eigenvalues.iter().map(|&(j, l)| (j, l, multiplicity(d, j))).collect();
        TruncatedSphereEmbedding { d, degrees }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `(degree, eigenvalue, multiplicity)` triples.
    pub fn degrees(&self) -> &[(usize, f64, f64)] {
        &self.degrees
    }

    /// Squared embedded distance as a function of the geodesic angle.
    pub fn distance_sq_at_angle(&self, angle: f64) -> f64 {
        let t = angle.cos();
        self.degrees
            .iter()
            .map(|&(j, l, mult)| {
                let drop = if self.d == 1 { 1.0 - (j as f64 * angle).cos() } else { 1.0 - zonal_polynomial(self.d, j, t) };
                2.0 * l * mult * drop
            })
            .sum()
    }

    pub fn distance_sq(&self, x: &[f64], y: &[f64]) -> f64 {
        self.distance_sq_at_angle(geodesic(x, y))
    }
}

/// `max |(|M(x) - M(y)|^2 truncated) - pi dist(x, y)|` over `pairs`.
pub fn snowflake_identity_error(d: usize, max_degree: usize, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let emb = TruncatedSphereEmbedding::new(d, max_degree)?;
    Ok(pairs
        .iter()
        .map(|(x, y)| (emb.distance_sq(x, y) - PI * geodesic(x, y)).abs())
        .fold(0.0, f64::max))
}
