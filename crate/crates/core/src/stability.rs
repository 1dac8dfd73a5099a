//! Couplings between finite spaces and the quantities that control how MDS
//! reacts to perturbing the input space.
//!
//! Every Gromov-Kantorovich number produced here is the distortion of one
//! explicit coupling, hence an upper bound on the true infimum. The kernel
//! comparison bounds hold coupling by coupling, so that is all they need.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mds::{classical_mds, row_distance_sq};
use crate::spaces::{sample, AnalyticSpace, FiniteSpace, SampleSpec};
use crate::sphere::{eigenvalue_quadrature, KernelKind};

/// Tolerance on coupling marginals.
pub const MARGINAL_TOL: f64 = 1e-12;

/// A joint probability matrix between two finite spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    plan: DMatrix<f64>,
    support: Vec<(usize, usize, f64)>,
}

impl Coupling {
    /// Validates `plan` against the marginals `wa` (rows) and `wb` (columns).
    pub fn new(plan: DMatrix<f64>, wa: &DVector<f64>, wb: &DVector<f64>) -> Result<Self> {
        if plan.nrows() != wa.len() {
            return Err(Error::DimensionMismatch { expected: wa.len(), found: plan.nrows() });
        }
        if plan.ncols() != wb.len() {
            return Err(Error::DimensionMismatch { expected: wb.len(), found: plan.ncols() });
        }
        if let Some(x) = plan.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::MarginalMismatch(format!("plan entry {x} is not a nonnegative number")));
        }
        for (i, row) in plan.row_iter().enumerate() {
            let s = row.sum();
            if (s - wa[i]).abs() > MARGINAL_TOL {
                return Err(Error::MarginalMismatch(format!("row {i} sums to {s}, expected {}", wa[i])));
            }
        }
        for (j, col) in plan.column_iter().enumerate() {
            let s = col.sum();
            if (s - wb[j]).abs() > MARGINAL_TOL {
                return Err(Error::MarginalMismatch(format!("column {j} sums to {s}, expected {}", wb[j])));
            }
        }
        let mut support = Vec::new();
        for i in 0..plan.nrows() {
            for j in 0..plan.ncols() {
                if plan[(i, j)] > 0.0 {
                    support.push((i, j, plan[(i, j)]));
                }
            }
        }
        Ok(Coupling { plan, support })
    }

    /// The diagonal coupling of a space with itself.
    pub fn identity(a: &FiniteSpace) -> Self {
        let w = a.weights();
        Coupling::new(DMatrix::from_diagonal(w), w, w).expect("diagonal plan has the right marginals")
    }

    /// The independent coupling `w_i v_j`.
    pub fn product(a: &FiniteSpace, b: &FiniteSpace) -> Result<Self> {
        Coupling::new(a.weights() * b.weights().transpose(), a.weights(), b.weights())
    }

    /// The deterministic coupling that sends point `i` of `a`, with its
    /// whole mass, to point `map[i]` of `b`.
    pub fn from_map(a: &FiniteSpace, b: &FiniteSpace, map: &[usize]) -> Result<Self> {
        if map.len() != a.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), found: map.len() });
        }
        let mut plan = DMatrix::zeros(a.len(), b.len());
        for (i, &t) in map.iter().enumerate() {
            if t >= b.len() {
                return Err(Error::InvalidArgument(format!("map sends {i} to {t}, outside 0..{}", b.len())));
            }
            plan[(i, t)] += a.weights()[i];
        }
        Coupling::new(plan, a.weights(), b.weights())
    }

    pub fn plan(&self) -> &DMatrix<f64> {
        &self.plan
    }

    /// Nonzero entries `(i, j, mass)` in row-major order.
    pub fn support(&self) -> &[(usize, usize, f64)] {
        &self.support
    }

    /// `(sum G_ij c(i, j)^p)^{1/p}` for a cross-space cost `c`.
    pub fn transport_cost(&self, cost: impl Fn(usize, usize) -> f64, p: f64) -> f64 {
        self.support.iter().map(|&(i, j, g)| g * cost(i, j).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Nearest-point map from the `fine`-point circle grid onto the
/// `coarse`-point grid, rounding half-way points up. When `coarse` divides
/// `fine` every coarse point receives the same number of fine points.
pub fn circle_nearest_map(fine: usize, coarse: usize) -> Vec<usize> {
    (0..fine).map(|j| ((2 * j * coarse + fine) / (2 * fine)) % coarse).collect()
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent must be finite and >= 1, got {p}")))
    }
}

/// Gromov-Kantorovich distortion of `coupling`:
/// `(sum G_ij G_kl |d_A(i, k) - d_B(j, l)|^p)^{1/p}`.
pub fn gw_cost(coupling: &Coupling, a: &FiniteSpace, b: &FiniteSpace, p: f64) -> Result<f64> {
    check_exponent(p)?;
    check_shape(coupling, a, b)?;
    let s = coupling.support();
    let mut acc = 0.0;
    for &(i, j, g) in s {
        let mut row = 0.0;
        for &(k, l, h) in s {
            let gap = (a.distance(i, k) - b.distance(j, l)).abs();
            row += h * if p == 2.0 { gap * gap } else { gap.powf(p) };
        }
        acc += g * row;
    }
    Ok(acc.powf(1.0 / p))
}

fn check_shape(coupling: &Coupling, a: &FiniteSpace, b: &FiniteSpace) -> Result<()> {
    let plan = coupling.plan();
    if plan.nrows() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: plan.nrows() });
    }
    if plan.ncols() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), found: plan.ncols() });
    }
    Ok(())
}

/// Largest size accepted by [`gw_bruteforce`].
pub const BRUTEFORCE_MAX: usize = 8;

/// Smallest [`gw_cost`] over the `n!` permutation couplings of two
/// uniform spaces of equal size. Still only an upper bound on the true
/// infimum: optimal couplings need not be permutations.
pub fn gw_bruteforce(a: &FiniteSpace, b: &FiniteSpace, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let n = a.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.len() });
    }
    if n > BRUTEFORCE_MAX {
        return Err(Error::TooLarge { n, max: BRUTEFORCE_MAX });
    }
    if !a.is_uniform() || !b.is_uniform() {
        return Err(Error::NonUniformWeights);
    }
    let w = 1.0 / (n * n) as f64;
    let cost = |perm: &[usize]| {
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += (a.distance(i, k) - b.distance(perm[i], perm[k])).abs().powf(p);
            }
        }
        (w * acc).powf(1.0 / p)
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = cost(&perm);
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(cost(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// `W_4` between the uniform measure on the unit circle and the uniform
/// measure on the regular `n`-gon: each grid point collects the arc of
/// length `2 pi / n` around it, so `W_4^4 = (pi/n)^4 / 5`.
pub fn w4_circle_grid(n: usize) -> f64 {
    PI * 5f64.powf(-0.25) / n as f64
}

/// Numerical `W_4` between the circle and its `n`-grid.
///
/// The circle is cut at angle `c`, unrolled, and its `cells` equal cells
/// are poured in order into the grid atoms `0, 1, ...` with mass `1/n`
/// each (the monotone coupling on the unrolled line). The cost of every
/// cell piece is integrated exactly. The cut is scanned over about 128
/// cell boundaries in `[-2 pi/n, 2 pi/n]` and then refined by
/// golden-section search between the neighbours of the best one.
pub fn w4_circle_transport(n: usize, cells: usize) -> Result<f64> {
    if n == 0 || cells == 0 {
        return Err(Error::InvalidArgument("grid and cell counts must be positive".into()));
    }
    let h = 2.0 * PI / cells as f64;
    let cost = |cut: f64| monotone_cost(n, cells, cut);
    let span = (2.0 * cells as f64 / n as f64).ceil() as i64;
    let stride = (span / 64).max(1);
    let mut best_k = -span;
    let mut best = f64::INFINITY;
    for k in (-span..=span).step_by(stride as usize) {
        let v = cost(k as f64 * h);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let (mut lo, mut hi) = ((best_k - stride) as f64 * h, (best_k + stride) as f64 * h);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(best.min(cost(0.5 * (lo + hi))).powf(0.25))
}

/// `W_4^4` of the monotone coupling for one cut position.
fn monotone_cost(n: usize, cells: usize, cut: f64) -> f64 {
    let h = 2.0 * PI / cells as f64;
    let mass_per_len = 1.0 / (2.0 * PI);
    let atom_len = 2.0 * PI / n as f64;
    let mut total = 0.0;
    for c in 0..cells {
        let (a, b) = (cut + c as f64 * h, cut + (c + 1) as f64 * h);
        // Atom k takes the arc [cut + k L, cut + (k+1) L).
        let first = ((((a - cut) / atom_len).floor()) as i64).max(0);
        let last = ((((b - cut) / atom_len).ceil()) as i64 - 1).min(n as i64 - 1);
        for k in first..=last {
            let lo = a.max(cut + k as f64 * atom_len);
            let hi = b.min(cut + (k + 1) as f64 * atom_len);
            if hi <= lo {
                continue;
            }
            // Integrate (t - g)^4 using the lift of atom k nearest the piece.
            let g0 = k as f64 * atom_len;
            let g = g0 + 2.0 * PI * ((0.5 * (lo + hi) - g0) / (2.0 * PI)).round();
            total += mass_per_len * ((hi - g).powi(5) - (lo - g).powi(5)) / 5.0;
        }
    }
    total
}

/// `(sum G_ij G_kl (d_A(i, k)^2 - d_B(j, l)^2)^2 / 4)^{1/2}`: the
/// Hilbert-Schmidt distance of the kernels `-d^2/2` read through the
/// coupling.
pub fn hs_gap(a: &FiniteSpace, b: &FiniteSpace, coupling: &Coupling) -> Result<f64> {
    check_shape(coupling, a, b)?;
    let s = coupling.support();
    let mut acc = 0.0;
    for &(i, j, g) in s {
        let mut row = 0.0;
        for &(k, l, h) in s {
            let gap = 0.5 * (a.distance(i, k).powi(2) - b.distance(j, l).powi(2));
            row += h * gap * gap;
        }
        acc += g * row;
    }
    Ok(acc.sqrt())
}

/// Both sides of a kernel comparison inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }

    /// `rhs / lhs`, infinite when the left side vanishes.
    pub fn slack(&self) -> f64 {
        if self.lhs == 0.0 {
            f64::INFINITY
        } else {
            self.rhs / self.lhs
        }
    }
}

/// `hs_gap <= C_A GW_4 + GW_4^2 / 2` where `GW_4` is the distortion of the
/// same coupling and `C_A` the `L^4` norm of the distance on `A`.
pub fn gw_kernel_bound(a: &FiniteSpace, b: &FiniteSpace, coupling: &Coupling) -> Result<BoundCheck> {
    let gw = gw_cost(coupling, a, b, 4.0)?;
    let c = a.fourth_moment_norm();
    Ok(BoundCheck { lhs: hs_gap(a, b, coupling)?, rhs: c * gw + 0.5 * gw * gw })
}

/// `hs_gap <= 2 C_A W_4 + 2 W_4^2` for a coupling of two samples of one
/// ambient space, where `w4` is the transport cost of that coupling in the
/// ambient metric.
pub fn transport_kernel_bound(a: &FiniteSpace, b: &FiniteSpace, coupling: &Coupling, w4: f64) -> Result<BoundCheck> {
    let c = a.fourth_moment_norm();
    Ok(BoundCheck { lhs: hs_gap(a, b, coupling)?, rhs: 2.0 * c * w4 + 2.0 * w4 * w4 })
}

/// Outcome of an orthogonal Procrustes fit.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult {
    /// Orthogonal `m x m` matrix applied to the second configuration.
    pub q: DMatrix<f64>,
    /// `(sum_i w_i |x_i - Q y_i|^2)^{1/2}` at the optimum.
    pub residual: f64,
    pub diagonal_only: bool,
}

/// Largest dimension for the sign-matrix search.
pub const DIAGONAL_SEARCH_MAX: usize = 20;

/// Weighted residual of `x` against `y` rotated by `q`, rows being points.
pub fn aligned_residual(x: &DMatrix<f64>, y: &DMatrix<f64>, weights: &DVector<f64>, q: &DMatrix<f64>) -> f64 {
    let rotated = y * q.transpose();
    (0..x.nrows())
        .map(|i| weights[i] * (x.row(i) - rotated.row(i)).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Orthogonal `Q` minimizing `sum_i w_i |x_i - Q y_i|^2` (rows are points).
///
/// The full problem is solved by the polar factor `U V^T` of
/// `sum_i w_i x_i y_i^T = U S V^T`, reflections included. With
/// `diagonal_only`, `Q` ranges over the `2^m` diagonal sign matrices.
pub fn procrustes(x: &DMatrix<f64>, y: &DMatrix<f64>, weights: &DVector<f64>, diagonal_only: bool) -> Result<AlignmentResult> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: y.nrows() });
    }
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch { expected: x.ncols(), found: y.ncols() });
    }
    if weights.len() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), found: weights.len() });
    }
    let m = x.ncols();
    let q = if diagonal_only {
        if m > DIAGONAL_SEARCH_MAX {
            return Err(Error::TooLarge { n: m, max: DIAGONAL_SEARCH_MAX });
        }
        let mut best = (f64::INFINITY, DMatrix::identity(m, m));
        for mask in 0u32..(1u32 << m) {
            let q = DMatrix::from_diagonal(&DVector::from_fn(m, |k, _| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }));
            let r = aligned_residual(x, y, weights, &q);
            if r < best.0 {
                best = (r, q);
            }
        }
        best.1
    } else {
        let mut cross = DMatrix::zeros(m, m);
        for i in 0..x.nrows() {
            cross += weights[i] * x.row(i).transpose() * y.row(i);
        }
        let svd = cross.svd(true, true);
        let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
        u * v_t
    };
    let residual = aligned_residual(x, y, weights, &q);
    Ok(AlignmentResult { q, residual, diagonal_only })
}

/// Projector comparison for one isolated simple eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorCheck {
    /// Position in the descending spectrum.
    pub index: usize,
    /// Half the distance to the nearest other eigenvalue.
    pub radius: f64,
    pub projector_gap: f64,
    pub bound: f64,
}

impl ProjectorCheck {
    pub fn holds(&self) -> bool {
        self.projector_gap <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    /// `max_i |alpha_i - beta_i|` with both spectra sorted descending.
    pub matching_sup: f64,
    /// `|S_1 - S_2|_HS`.
    pub hs_norm: f64,
    pub projectors: Vec<ProjectorCheck>,
}

impl PerturbationReport {
    pub fn matching_holds(&self) -> bool {
        self.matching_sup <= self.hs_norm
    }
}

fn sorted_eigen(s: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(s.clone());
    let mut order: Vec<usize> = (0..s.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(s.nrows(), s.nrows(), |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

/// Compares the spectra of two symmetric matrices of equal size.
///
/// Eigenvalues are matched in sorted order, which is the optimal matching.
/// For every simple eigenvalue of `s1` with gap `2r` to the rest of the
/// spectrum and `|S_1 - S_2|_HS <= r/2`, the rank-one projectors are also
/// compared against `(2/r) |S_1 - S_2|_HS`.
pub fn eigen_perturbation_check(s1: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<PerturbationReport> {
    let n = s1.nrows();
    if s1.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: s1.ncols() });
    }
    if s2.shape() != s1.shape() {
        return Err(Error::DimensionMismatch { expected: n, found: s2.nrows() });
    }
    let hs_norm = (s1 - s2).norm();
    let (a, va) = sorted_eigen(s1);
    let (b, vb) = sorted_eigen(s2);
    let matching_sup = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let mut projectors = Vec::new();
    for k in 0..n {
        let gap = (0..n).filter(|&l| l != k).map(|l| (a[k] - a[l]).abs()).fold(f64::INFINITY, f64::min);
        let r = gap / 2.0;
        if !(r > 0.0 && r.is_finite() && hs_norm <= r / 2.0) {
            continue;
        }
        let (u, v) = (va.column(k), vb.column(k));
        let projector_gap = (u * u.transpose() - v * v.transpose()).norm();
        projectors.push(ProjectorCheck { index: k, radius: r, projector_gap, bound: 2.0 / r * hs_norm });
    }
    Ok(PerturbationReport { matching_sup, hs_norm, projectors })
}

/// One row of the circle convergence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Procrustes residual between the grid embedding and the limit map.
    pub aligned_l2: f64,
    /// `gw_cost` between the two image point clouds under the identity
    /// coupling of the grid, with the exponent passed to the experiment.
    pub gw_images: f64,
    /// Closed-form `W_4` between the circle and the grid.
    pub w4: f64,
    pub hs_gap_bound_lhs: f64,
    pub hs_gap_bound_rhs: f64,
}

/// Size of the fine grid standing in for the continuous circle in the
/// kernel bound of row `n`: `8n`, reduced to keep it at most 2048 points
/// while staying a multiple of `n` with at least two fine points per cell.
pub fn reference_size(n: usize) -> usize {
    let factor = (2048 / n.max(1)).clamp(2, 8);
    factor * n
}

/// The circle MDS limit map at angle `t`: coordinates
/// `sqrt(2 lambda_k) cos(k t)`, `sqrt(2 lambda_k) sin(k t)` for odd `k`,
/// truncated to `m`.
pub fn circle_limit_map(angles: &[f64], m: usize) -> Result<DMatrix<f64>> {
    let freqs = m.div_ceil(2);
    let lambdas = (0..freqs)
        .map(|f| eigenvalue_quadrature(1, 2 * f + 1, KernelKind::Full))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(angles.len(), m, |i, c| {
        let k = (2 * (c / 2) + 1) as f64;
        let amp = (2.0 * lambdas[c / 2]).sqrt();
        if c % 2 == 0 {
            amp * (k * angles[i]).cos()
        } else {
            amp * (k * angles[i]).sin()
        }
    }))
}

fn euclidean_space(points: &DMatrix<f64>, weights: &DVector<f64>) -> Result<FiniteSpace> {
    let n = points.nrows();
    let d = DMatrix::from_fn(n, n, |i, j| row_distance_sq(points, i, j).sqrt());
    FiniteSpace::from_matrix(d, weights.clone())
}

/// Runs one size of the circle experiment. `p` is the exponent of the
/// image distortion column.
pub fn convergence_row(n: usize, m: usize, p: f64) -> Result<ConvergenceRow> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid size must be >= 2, got {n}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("embedding dimension must be >= 1".into()));
    }
    check_exponent(p)?;
    let circle = AnalyticSpace::circle();
    let grid = sample(&circle, &SampleSpec::grid(n))?;
    let emb = classical_mds(&grid)?.embed(m);
    let angles: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let limit = circle_limit_map(&angles, m)?;
    let weights = grid.weights();
    let aligned = procrustes(&limit, &emb, weights, false)?;

    let img_a = euclidean_space(&emb, weights)?;
    let img_b = euclidean_space(&limit, weights)?;
    let gw_images = gw_cost(&Coupling::identity(&img_a), &img_a, &img_b, p)?;

    let fine_n = reference_size(n);
    let fine = sample(&circle, &SampleSpec::grid(fine_n))?;
    let map = circle_nearest_map(fine_n, n);
    let coupling = Coupling::from_map(&fine, &grid, &map)?;
    let step = 2.0 * PI / n as f64;
    let fine_step = 2.0 * PI / fine_n as f64;
    let w4_map = coupling.transport_cost(
        |i, j| {
            let t = (i as f64 * fine_step - j as f64 * step).rem_euclid(2.0 * PI);
            t.min(2.0 * PI - t)
        },
        4.0,
    );
    let bound = transport_kernel_bound(&fine, &grid, &coupling, w4_map)?;
    Ok(ConvergenceRow {
        n,
        aligned_l2: aligned.residual,
        gw_images,
        w4: w4_circle_grid(n),
        hs_gap_bound_lhs: bound.lhs,
        hs_gap_bound_rhs: bound.rhs,
    })
}

/// Runs [`convergence_row`] for every size, in order. Only the circle has
/// a known limit map.
pub fn convergence_experiment(space: &AnalyticSpace, sizes: &[usize], m: usize, p: f64) -> Result<Vec<ConvergenceRow>> {
    if *space != AnalyticSpace::circle() {
        return Err(Error::InvalidArgument(format!("no limit map available for {space}")));
    }
    sizes.iter().map(|&n| convergence_row(n, m, p)).collect()
}
