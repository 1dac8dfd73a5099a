//! Spectra of the MDS kernels on round spheres `S^d` with the normalized
//! surface measure.
//!
//! Two independent evaluators are provided. [`eigenvalue_series`] sums the
//! power-series expression for the eigenvalue of a degree-`j` harmonic, and
//! [`eigenvalue_quadrature`] integrates the zonal kernel against the
//! Gegenbauer polynomial directly. Their ratio is a single positive factor
//! per dimension, recorded by [`SphereSpectrum::calibration`]. Quadrature is
//! the one to use for distance identities.

mod asymptotics;
mod coeff;
mod quadrature;
mod series;
mod snowflake;

pub use asymptotics::{
    alpha_ratio, asymptotic_scan, positive_eigenvalue, s_peak, s_star, theta, AsymptoticScan, ScanRow, SCAN_TOL,
};
pub use coeff::{coeff, positive_part, KernelKind, SignedLog};
pub use quadrature::{eigenvalue_quadrature, multiplicity, zonal_polynomial};
pub use series::{eigenvalue_series, eigenvalue_series_sum, series_term, sum_unimodal, SeriesSum, TERM_BUDGET};
pub use snowflake::{snowflake_identity_error, TruncatedSphereEmbedding};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeEntry {
    pub degree: usize,
    pub series: f64,
    pub quadrature: f64,
    pub multiplicity: f64,
}

impl DegreeEntry {
    /// `quadrature / series`, or `None` when the series value vanishes.
    pub fn ratio(&self) -> Option<f64> {
        (self.series != 0.0).then(|| self.quadrature / self.series)
    }
}

/// Both eigenvalue evaluations for a range of degrees on one sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpectrum {
    pub d: usize,
    pub kind: KernelKind,
    pub entries: Vec<DegreeEntry>,
}

impl SphereSpectrum {
    pub fn compute(d: usize, kind: KernelKind, degrees: impl IntoIterator<Item = usize>, tol: f64) -> Result<Self> {
        let entries = degrees
            .into_iter()
            .map(|j| {
                Ok(DegreeEntry {
                    degree: j,
                    series: eigenvalue_series(kind, d, j, tol)?,
                    quadrature: eigenvalue_quadrature(d, j, kind)?,
                    multiplicity: multiplicity(d, j),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SphereSpectrum { d, kind, entries })
    }

    /// Per-degree `quadrature / series` ratios for the odd degrees.
    pub fn calibration_ratios(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .filter(|e| e.degree % 2 == 1)
            .filter_map(|e| e.ratio().map(|r| (e.degree, r)))
            .collect()
    }

    /// Mean of [`Self::calibration_ratios`] together with its largest
    /// relative deviation from that mean.
    pub fn calibration(&self) -> Option<(f64, f64)> {
        let ratios = self.calibration_ratios();
        if ratios.is_empty() {
            return None;
        }
        let mean = ratios.iter().map(|r| r.1).sum::<f64>() / ratios.len() as f64;
        let spread = ratios.iter().map(|r| (r.1 / mean - 1.0).abs()).fold(0.0, f64::max);
        Some((mean, spread))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_is_degree_independent() {
        for d in 1..=2 {
            let spec = SphereSpectrum::compute(d, KernelKind::Full, (1..=15).step_by(2), 1e-12).unwrap();
            let (mean, spread) = spec.calibration().unwrap();
            assert!(mean > 0.0);
            assert!(spread < 1e-6, "d={d}: spread {spread}");
        }
    }

    #[test]
    fn evaluators_agree_in_sign() {
        let spec = SphereSpectrum::compute(3, KernelKind::Full, 1..=8, 1e-10).unwrap();
        for e in &spec.entries {
            assert_eq!(e.series > 0.0, e.quadrature > 0.0, "degree {}", e.degree);
        }
    }
}
