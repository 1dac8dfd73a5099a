//! Finite multidimensional scaling on a weighted metric space.
//!
//! The centered operator `T` acts on `L^2(mu_n)`; it is stored in the
//! symmetrized basis `S = W^{1/2} K_T W^{1/2}` so that a plain symmetric
//! eigensolver applies. Eigenfunctions are normalized in `L^2(mu_n)`, which
//! makes the signed decomposition reproduce squared distances exactly:
//!
//! ```text
//! d(x_i, x_j)^2 = sum_k lambda_k (u_k(x_i) - u_k(x_j))^2
//! ```

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::spaces::FiniteSpace;

/// QR iterations allowed per matrix row before the eigensolver gives up.
const ITERATIONS_PER_ROW: usize = 64;

/// The double-centered kernel of a finite space.
#[derive(Debug, Clone)]
pub struct CenteredOperator {
    symmetrized: DMatrix<f64>,
    centered_kernel: DMatrix<f64>,
    kernel: DMatrix<f64>,
    weights: DVector<f64>,
}

impl CenteredOperator {
    /// `S = W^{1/2} K_T W^{1/2}`.
    pub fn symmetrized(&self) -> &DMatrix<f64> {
        &self.symmetrized
    }

    /// The centered kernel `k_T(x_i, x_j)`.
    pub fn centered_kernel(&self) -> &DMatrix<f64> {
        &self.centered_kernel
    }

    /// The raw kernel `-d^2 / 2`.
    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `P K P / n` with the unweighted centering projector `P = I - 11^T/n`.
    /// Equals [`CenteredOperator::symmetrized`] when the weights are uniform.
    pub fn uniform_matrix_form(&self) -> DMatrix<f64> {
        let n = self.len();
        let p = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
        &p * (&self.kernel / n as f64) * &p
    }
}

/// Weighted double centering of `-d^2/2`.
pub fn double_center(space: &FiniteSpace) -> CenteredOperator {
    let n = space.len();
    let w = space.weights().clone();
    let d = space.distances();
    let kernel = DMatrix::from_fn(n, n, |i, j| -0.5 * d[(i, j)] * d[(i, j)]);

    // The kernel is symmetric, so row and column averages coincide.
    let avg: DVector<f64> = &kernel * &w;
    let grand = w.dot(&avg);
    let centered_kernel = DMatrix::from_fn(n, n, |i, j| kernel[(i, j)] - avg[i] - avg[j] + grand);

    let sqrt_w = w.map(f64::sqrt);
    let mut symmetrized = DMatrix::from_fn(n, n, |i, j| sqrt_w[i] * centered_kernel[(i, j)] * sqrt_w[j]);
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (symmetrized[(i, j)] + symmetrized[(j, i)]);
            symmetrized[(i, j)] = m;
            symmetrized[(j, i)] = m;
        }
    }
    CenteredOperator { symmetrized, centered_kernel, kernel, weights: w }
}

/// A signed eigendecomposition of the centered operator.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    eigenvalues: Vec<f64>,
    eigenfunctions: DMatrix<f64>,
    weights: DVector<f64>,
    positive_count: usize,
    negative_count: usize,
}

/// One point of the Krein-space map `N = (M, M^-)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinPoint {
    pub positive_part: DVector<f64>,
    pub negative_part: DVector<f64>,
}

impl KreinPoint {
    /// Indefinite squared norm `|pos|^2 - |neg|^2`.
    pub fn pseudo_norm_sq(&self) -> f64 {
        self.positive_part.norm_squared() - self.negative_part.norm_squared()
    }

    pub fn difference(&self, other: &KreinPoint) -> KreinPoint {
        KreinPoint {
            positive_part: &self.positive_part - &other.positive_part,
            negative_part: &self.negative_part - &other.negative_part,
        }
    }
}

/// Diagonalizes `S`.
///
/// Eigenvalues come back sorted descending with `|lambda| <= n eps |S|_F`
/// clamped to zero. Each eigenspace (eigenvalues within `16 n eps |S|_F`
/// of each other) gets a canonical orthonormal basis built by pivoted
/// Gram-Schmidt on the projected coordinate vectors, so the output does
/// not depend on how the solver happened to rotate a degenerate block.
/// Each basis vector is then signed so that its first entry of largest
/// magnitude is positive.
pub fn eigendecompose(op: &CenteredOperator) -> Result<EmbeddingResult> {
    let n = op.len();
    let s = op.symmetrized();
    let norm = s.norm();
    let budget = ITERATIONS_PER_ROW * n + 100;
    let eig = SymmetricEigen::try_new(s.clone(), f64::EPSILON, budget)
        .ok_or(Error::NoConvergence { n, budget, norm })?;

    let clamp = n as f64 * f64::EPSILON * norm;
    let cluster_tol = 16.0 * clamp;

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() <= clamp { 0.0 } else { l })
        .collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = DMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end - 1]] - values[order[end]] <= cluster_tol {
            end += 1;
        }
        let block = DMatrix::from_fn(n, end - start, |i, c| eig.eigenvectors[(i, order[start + c])]);
        let basis = canonical_basis(&block);
        let mean = order[start..end].iter().map(|&k| values[k]).sum::<f64>() / (end - start) as f64;
        let mean = if values[order[start]] == 0.0 && values[order[end - 1]] == 0.0 { 0.0 } else { mean };
        for c in 0..(end - start) {
            let mut v = basis.column(c).into_owned();
            fix_sign(&mut v);
            vectors.set_column(start + c, &v);
            eigenvalues.push(mean);
        }
        start = end;
    }

    let eigenfunctions = to_eigenfunctions(op, &vectors, &eigenvalues);
    let positive_count = eigenvalues.iter().filter(|&&l| l > 0.0).count();
    let negative_count = eigenvalues.iter().filter(|&&l| l < 0.0).count();
    Ok(EmbeddingResult {
        eigenvalues,
        eigenfunctions,
        weights: op.weights().clone(),
        positive_count,
        negative_count,
    })
}

/// Orthonormal basis of the column span of `block` (orthonormal columns),
/// chosen by greedy pivoting on the projections of `e_0, e_1, ...`.
fn canonical_basis(block: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = block.shape();
    if k == 1 {
        return block.clone();
    }
    // Row i of `block` holds the coordinates of P e_i in the block basis.
    let mut residual: Vec<DVector<f64>> = (0..n).map(|i| block.row(i).transpose()).collect();
    let mut coeffs = DMatrix::zeros(k, k);
    for c in 0..k {
        let norms: Vec<f64> = residual.iter().map(|r| r.norm_squared()).collect();
        let best = norms.iter().copied().fold(0.0, f64::max);
        let pivot = norms.iter().position(|&x| x >= best * (1.0 - 1e-8)).unwrap_or(0);
        let q = &residual[pivot] / residual[pivot].norm();
        for r in residual.iter_mut() {
            let proj = q.dot(r);
            r.axpy(-proj, &q, 1.0);
        }
        coeffs.set_column(c, &q);
    }
    // Re-orthonormalize against drift.
    let qr = coeffs.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..k {
        if r[(c, c)] < 0.0 {
            let col = -q.column(c);
            q.set_column(c, &col);
        }
    }
    block * q
}

fn fix_sign(v: &mut DVector<f64>) {
    let max = v.amax();
    if max == 0.0 {
        return;
    }
    let lead = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-9)).unwrap_or(0);
    if v[lead] < 0.0 {
        v.neg_mut();
    }
}

/// `u_k(x_i) = v_k[i] / sqrt(w_i)`; zero-weight points are filled in from
/// the eigen-equation `u(x) = lambda^{-1} sum_y k_T(x, y) u(y) w_y`.
fn to_eigenfunctions(op: &CenteredOperator, vectors: &DMatrix<f64>, eigenvalues: &[f64]) -> DMatrix<f64> {
    let n = op.len();
    let w = op.weights();
    let mut u = DMatrix::zeros(n, n);
    for i in 0..n {
        if w[i] > 0.0 {
            let s = w[i].sqrt();
            for k in 0..n {
                u[(i, k)] = vectors[(i, k)] / s;
            }
        }
    }
    let kt = op.centered_kernel();
    for i in (0..n).filter(|&i| w[i] == 0.0) {
        for (k, &lambda) in eigenvalues.iter().enumerate() {
            if lambda != 0.0 {
                let acc: f64 = (0..n).filter(|&l| w[l] > 0.0).map(|l| kt[(i, l)] * u[(l, k)] * w[l]).sum();
                u[(i, k)] = acc / lambda;
            }
        }
    }
    u
}

impl EmbeddingResult {
    /// Full signed spectrum, sorted descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `U[(i, k)] = u_k(x_i)`, columns orthonormal in `L^2(mu_n)`.
    pub fn eigenfunctions(&self) -> &DMatrix<f64> {
        &self.eigenfunctions
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn negative_count(&self) -> usize {
        self.negative_count
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    fn negative_indices(&self) -> std::ops::Range<usize> {
        let n = self.len();
        (n - self.negative_count)..n
    }

    /// The MDS map into `R^m`: row `i` is `(sqrt(lambda_k) u_k(x_i))_k` over
    /// the `m` largest positive eigenvalues, zero-padded past
    /// `positive_count`.
    pub fn embed(&self, m: usize) -> DMatrix<f64> {
        let n = self.len();
        let used = m.min(self.positive_count);
        let mut out = DMatrix::zeros(n, m);
        for k in 0..used {
            let scale = self.eigenvalues[k].sqrt();
            for i in 0..n {
                out[(i, k)] = scale * self.eigenfunctions[(i, k)];
            }
        }
        out
    }

    /// The negative-part map `M^-`, built from `|lambda|` over every
    /// negative eigenvalue, most negative first.
    pub fn embed_negative(&self) -> DMatrix<f64> {
        let n = self.len();
        let idx: Vec<usize> = self.negative_indices().rev().collect();
        DMatrix::from_fn(n, idx.len(), |i, c| {
            let k = idx[c];
            (-self.eigenvalues[k]).sqrt() * self.eigenfunctions[(i, k)]
        })
    }

    pub fn krein_map(&self) -> Vec<KreinPoint> {
        let pos = self.embed(self.positive_count);
        let neg = self.embed_negative();
        (0..self.len())
            .map(|i| KreinPoint {
                positive_part: pos.row(i).transpose(),
                negative_part: neg.row(i).transpose(),
            })
            .collect()
    }

    /// `sum_k lambda_k (u_k(x_i) - u_k(x_j))^2` over the signed spectrum.
    pub fn reconstruct_distance_sq(&self, i: usize, j: usize) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != 0.0)
            .map(|(k, l)| {
                let diff = self.eigenfunctions[(i, k)] - self.eigenfunctions[(j, k)];
                l * diff * diff
            })
            .sum()
    }

    /// Embedding in the matrix scale of the classical algorithm:
    /// `sqrt(lambda_k) v_k[i]` with `v_k = sqrt(w) u_k` unit vectors. Its
    /// Gram matrix approximates `S`.
    pub fn gram_points(&self, m: usize) -> DMatrix<f64> {
        let mut pts = self.embed(m);
        for i in 0..self.len() {
            let s = self.weights[i].sqrt();
            pts.row_mut(i).scale_mut(s);
        }
        pts
    }

    /// Positive-part coordinates with eigenfunctions normalized in
    /// `L^p(mu_n)` instead of `L^2`.
    pub fn lp_normalize(&self, p: f64) -> Result<DMatrix<f64>> {
        if !p.is_finite() || p < 4.0 {
            return Err(Error::InvalidArgument(format!("L^p normalization needs finite p >= 4, got {p}")));
        }
        let n = self.len();
        let m = self.positive_count;
        let mut out = self.embed(m);
        for k in 0..m {
            let lp = (0..n)
                .map(|i| self.weights[i] * self.eigenfunctions[(i, k)].abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p);
            for i in 0..n {
                out[(i, k)] /= lp;
            }
        }
        Ok(out)
    }

    /// `max_i sum_{k >= m} lambda_k^+ u_k(x_i)^2`: how much of each point's
    /// squared norm lives beyond the first `m` positive coordinates.
    pub fn tail_diagnostic(&self, m: usize) -> f64 {
        (0..self.len())
            .map(|i| {
                (m..self.positive_count)
                    .map(|k| self.eigenvalues[k] * self.eigenfunctions[(i, k)].powi(2))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// `sum_ij (S_ij - y_i . y_j)^2` for points `y` in the matrix scale (see
/// [`EmbeddingResult::gram_points`]). Defined for uniform weights only.
pub fn strain(op: &CenteredOperator, points: &DMatrix<f64>) -> Result<f64> {
    let n = op.len();
    if points.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: points.nrows() });
    }
    let target = 1.0 / n as f64;
    if op.weights().iter().any(|w| (w - target).abs() > 1e-12) {
        return Err(Error::NonUniformWeights);
    }
    let gram = points * points.transpose();
    Ok((op.symmetrized() - gram).norm_squared())
}

/// Convenience: center and diagonalize.
pub fn classical_mds(space: &FiniteSpace) -> Result<EmbeddingResult> {
    eigendecompose(&double_center(space))
}

/// Euclidean squared distance between rows `i` and `j`.
pub fn row_distance_sq(points: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (points.row(i) - points.row(j)).norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral() -> FiniteSpace {
        FiniteSpace::uniform(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap()
    }

    fn four_cycle() -> FiniteSpace {
        let hop = |i: usize, j: usize| {
            let k = (i as i64 - j as i64).rem_euclid(4) as usize;
            k.min(4 - k) as f64
        };
        FiniteSpace::uniform(DMatrix::from_fn(4, 4, hop)).unwrap()
    }

    #[test]
    fn singleton_centers_to_zero() {
        let s = FiniteSpace::from_matrix(DMatrix::zeros(1, 1), DVector::from_element(1, 1.0)).unwrap();
        let op = double_center(&s);
        assert_eq!(op.symmetrized()[(0, 0)], 0.0);
        let r = eigendecompose(&op).unwrap();
        assert_eq!(r.positive_count(), 0);
    }

    #[test]
    fn equilateral_spectrum() {
        let r = classical_mds(&equilateral()).unwrap();
        let ev = r.eigenvalues();
        assert!((ev[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!((ev[1] - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(ev[2], 0.0);
        assert_eq!(r.positive_count(), 2);
        assert_eq!(r.embed_negative().ncols(), 0);
    }

    #[test]
    fn four_cycle_eigenfunctions_and_negative_map() {
        let r = classical_mds(&four_cycle()).unwrap();
        let u = r.eigenfunctions();
        let s2 = 2f64.sqrt();
        let expect0 = [s2, 0.0, -s2, 0.0];
        let expect1 = [0.0, s2, 0.0, -s2];
        for i in 0..4 {
            assert!((u[(i, 0)] - expect0[i]).abs() < 1e-12);
            assert!((u[(i, 1)] - expect1[i]).abs() < 1e-12);
        }
        let neg = r.embed_negative();
        assert_eq!(neg.ncols(), 1);
        for i in 0..4 {
            assert!((neg[(i, 0)].abs() - 0.5).abs() < 1e-12);
            if i > 0 {
                assert!((neg[(i, 0)] + neg[(i - 1, 0)]).abs() < 1e-12);
            }
        }
        let k = r.krein_map();
        let diff = k[0].difference(&k[1]);
        assert!((diff.positive_part.norm_squared() - 2.0).abs() < 1e-12);
        assert!((diff.negative_part.norm_squared() - 1.0).abs() < 1e-12);
        assert!((diff.pseudo_norm_sq() - 1.0).abs() < 1e-12);
        assert!((r.reconstruct_distance_sq(0, 2) - 4.0).abs() < 1e-12);
        assert_eq!(r.reconstruct_distance_sq(3, 3), 0.0);
    }

    #[test]
    fn zero_distances_clamp_everything() {
        let s = FiniteSpace::uniform(DMatrix::zeros(5, 5)).unwrap();
        let r = classical_mds(&s).unwrap();
        assert!(r.eigenvalues().iter().all(|&l| l == 0.0));
        assert_eq!(r.positive_count(), 0);
        let e = r.embed(2);
        assert!(e.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn padding_past_positive_rank() {
        let r = classical_mds(&four_cycle()).unwrap();
        let e = r.embed(r.positive_count() + 3);
        assert_eq!(e.ncols(), 5);
        for c in 2..5 {
            assert!(e.column(c).iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn lp_normalization() {
        let r = classical_mds(&four_cycle()).unwrap();
        let l4 = r.lp_normalize(4.0).unwrap();
        let l2 = r.embed(2);
        for i in 0..4 {
            for c in 0..2 {
                // |u|_4 = 2^{1/4} for u = (sqrt2, 0, -sqrt2, 0).
                assert!((l4[(i, c)] - l2[(i, c)] / 2f64.powf(0.25)).abs() < 1e-12);
            }
        }
        assert!(r.lp_normalize(f64::INFINITY).is_err());
        assert!(r.lp_normalize(2.0).is_err());

        let tri = classical_mds(&equilateral()).unwrap().lp_normalize(4.0).unwrap();
        let d01 = row_distance_sq(&tri, 0, 1);
        assert!((row_distance_sq(&tri, 0, 2) - d01).abs() < 1e-12);
        assert!((row_distance_sq(&tri, 1, 2) - d01).abs() < 1e-12);
    }

    #[test]
    fn strain_identities() {
        let space = four_cycle();
        let op = double_center(&space);
        assert!((op.uniform_matrix_form() - op.symmetrized()).amax() < 1e-14);
        let r = eigendecompose(&op).unwrap();
        let best = strain(&op, &r.gram_points(r.positive_count())).unwrap();
        assert!((best - 0.0625).abs() < 1e-12);
        let origin = strain(&op, &DMatrix::zeros(4, 2)).unwrap();
        assert!((origin - op.symmetrized().norm_squared()).abs() < 1e-14);
        assert!(matches!(strain(&op, &DMatrix::zeros(3, 2)), Err(Error::DimensionMismatch { .. })));

        let tri = equilateral();
        let op = double_center(&tri);
        let r = eigendecompose(&op).unwrap();
        assert!(strain(&op, &r.gram_points(2)).unwrap() < 1e-24);
    }

    #[test]
    fn strain_rejects_weighted_spaces() {
        let d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        let s = FiniteSpace::from_matrix(d, DVector::from_vec(vec![0.5, 0.25, 0.25])).unwrap();
        let op = double_center(&s);
        assert_eq!(strain(&op, &DMatrix::zeros(3, 1)), Err(Error::NonUniformWeights));
    }

    #[test]
    fn zero_weight_points_use_the_eigen_equation() {
        let hop = |i: usize, j: usize| (i as f64 - j as f64).abs();
        let d = DMatrix::from_fn(3, 3, hop);
        let s = FiniteSpace::from_matrix(d, DVector::from_vec(vec![0.5, 0.0, 0.5])).unwrap();
        let r = classical_mds(&s).unwrap();
        // The middle point sits halfway along the single positive axis.
        let e = r.embed(1);
        assert!((e[(1, 0)] - 0.5 * (e[(0, 0)] + e[(2, 0)])).abs() < 1e-12);
        assert!((r.reconstruct_distance_sq(0, 2) - 4.0).abs() < 1e-12);
    }
}
