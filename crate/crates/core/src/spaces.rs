//! Metric measure spaces: finite (explicit distance matrix plus weights) and
//! analytic (spheres, snowflakes, products, flat tori).
//!
//! Every analytic space is reduced to a [`FiniteSpace`] through [`sample`]
//! before any spectral computation happens.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest point count for which the triangle inequality is checked on
/// every triple. Larger spaces are checked on `10 n^2` random triples.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 512;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const MATRIX_REL_TOL: f64 = 1e-12;
const UNIT_NORM_TOL: f64 = 1e-10;
const TRIANGLE_SEED: u64 = 0x7269_616e_676c_6573;

/// An n-point metric measure space.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    distances: DMatrix<f64>,
    weights: DVector<f64>,
    labels: Option<Vec<String>>,
}

impl FiniteSpace {
    /// Validates `d` as a metric and `w` as a probability vector.
    ///
    /// Entries within `1e-12 * max(1, max d)` of symmetric are accepted and
    /// symmetrized; the same slack is used for the diagonal and the
    /// triangle inequality.
    pub fn from_matrix(d: DMatrix<f64>, w: DVector<f64>) -> Result<Self> {
        let n = d.nrows();
        if d.ncols() != n {
            return Err(Error::NotSquare { rows: n, cols: d.ncols() });
        }
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: w.len() });
        }
        if n == 0 {
            return Err(Error::InvalidArgument("a space needs at least one point".into()));
        }
        validate_weights(&w)?;

        let mut scale = 1.0_f64;
        for i in 0..n {
            for j in 0..n {
                let v = d[(i, j)];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeDistance { i, j, value: v });
                }
                scale = scale.max(v);
            }
        }
        let tol = MATRIX_REL_TOL * scale;

        let mut d = d;
        for i in 0..n {
            if d[(i, i)] > tol {
                return Err(Error::NonzeroDiagonal { i, value: d[(i, i)] });
            }
            d[(i, i)] = 0.0;
            for j in (i + 1)..n {
                let (a, b) = (d[(i, j)], d[(j, i)]);
                if (a - b).abs() > tol {
                    return Err(Error::AsymmetricMatrix { i, j, dij: a, dji: b });
                }
                if a != b {
                    let m = 0.5 * (a + b);
                    d[(i, j)] = m;
                    d[(j, i)] = m;
                }
            }
        }
        check_triangle(&d, tol)?;

        Ok(FiniteSpace { distances: d, weights: w, labels: None })
    }

    /// Same as [`FiniteSpace::from_matrix`] with weights `1/n`.
    pub fn uniform(d: DMatrix<f64>) -> Result<Self> {
        let n = d.nrows();
        Self::from_matrix(d, DVector::from_element(n, 1.0 / n.max(1) as f64))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn distances(&self) -> &DMatrix<f64> {
        &self.distances
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[(i, j)]
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn diameter(&self) -> f64 {
        self.distances.max()
    }

    /// True when every weight equals `1/n` to within `1e-12`.
    pub fn is_uniform(&self) -> bool {
        let target = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| (w - target).abs() <= 1e-12)
    }

    /// `(sum_ij w_i w_j d_ij^4)^(1/4)`, the L^4 norm of the distance under
    /// the product measure.
    pub fn fourth_moment_norm(&self) -> f64 {
        let n = self.len();
        let mut acc = 0.0;
        for j in 0..n {
            let wj = self.weights[j];
            for i in 0..n {
                let d2 = self.distances[(i, j)] * self.distances[(i, j)];
                acc += self.weights[i] * wj * d2 * d2;
            }
        }
        acc.powf(0.25)
    }

    /// Reorders points so that new point `k` is old point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.len();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let d = DMatrix::from_fn(n, n, |i, j| self.distances[(perm[i], perm[j])]);
        let w = DVector::from_fn(n, |i, _| self.weights[perm[i]]);
        let labels = self
            .labels
            .as_ref()
            .map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        Ok(FiniteSpace { distances: d, weights: w, labels })
    }

    /// Cartesian product with root-sum-square distances and product weights.
    /// Point `(i, j)` is stored at index `i * other.len() + j`.
    pub fn product(&self, other: &FiniteSpace) -> Result<Self> {
        let (na, nb) = (self.len(), other.len());
        let n = na * nb;
        let d = DMatrix::from_fn(n, n, |p, q| {
            let (i, j) = (p / nb, p % nb);
            let (k, l) = (q / nb, q % nb);
            self.distances[(i, k)].hypot(other.distances[(j, l)])
        });
        let w = DVector::from_fn(n, |p, _| self.weights[p / nb] * other.weights[p % nb]);
        let w = renormalize(w);
        FiniteSpace::from_matrix(d, w)
    }
}

fn renormalize(mut w: DVector<f64>) -> DVector<f64> {
    let s = w.sum();
    if s > 0.0 {
        w /= s;
    }
    w
}

fn validate_weights(w: &DVector<f64>) -> Result<()> {
    for (i, &x) in w.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::BadWeights(format!("weight {i} is {x}")));
        }
    }
    let s = w.sum();
    if (s - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::BadWeights(format!("weights sum to {s:.17}, expected 1")));
    }
    Ok(())
}

fn check_triangle(d: &DMatrix<f64>, tol: f64) -> Result<()> {
    let n = d.nrows();
    let violation = |i: usize, j: usize, k: usize| {
        let via = d[(i, k)] + d[(k, j)];
        (d[(i, j)] > via + tol).then_some(Error::TriangleViolation { i, j, k, dij: d[(i, j)], via })
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        // Column-major: column k of d holds d[.][k] contiguously.
        for k in 0..n {
            let col_k = d.column(k);
            for j in 0..n {
                let dkj = d[(k, j)];
                let col_j = d.column(j);
                for i in 0..n {
                    if col_j[i] > col_k[i] + dkj + tol {
                        return Err(violation(i, j, k).expect("checked above"));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(TRIANGLE_SEED);
        for _ in 0..10 * n * n {
            let (i, j, k) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
            if let Some(e) = violation(i, j, k) {
                return Err(e);
            }
        }
    }
    Ok(())
}

/// Analytic metric measure spaces with their normalized uniform measures.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSpace {
    /// Unit sphere `S^d` in `R^(d+1)` with the geodesic distance.
    Sphere { dim: usize },
    /// Same points and measure as `base`, distance raised to `alpha`.
    Snowflake { base: Box<AnalyticSpace>, alpha: f64 },
    /// Root-sum-square product metric, product measure.
    Product(Box<AnalyticSpace>, Box<AnalyticSpace>),
    /// Flat torus `(S^1)^k`; a point is `k` unit vectors in `R^2`.
    Torus { factors: usize },
}

impl AnalyticSpace {
    pub fn sphere(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
        }
        Ok(AnalyticSpace::Sphere { dim })
    }

    pub fn circle() -> Self {
        AnalyticSpace::Sphere { dim: 1 }
    }

    pub fn snowflake(base: AnalyticSpace, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!("snowflake exponent {alpha} not in (0, 1]")));
        }
        Ok(AnalyticSpace::Snowflake { base: Box::new(base), alpha })
    }

    pub fn product(a: AnalyticSpace, b: AnalyticSpace) -> Self {
        AnalyticSpace::Product(Box::new(a), Box::new(b))
    }

    pub fn torus(factors: usize) -> Result<Self> {
        if factors == 0 {
            return Err(Error::InvalidArgument("torus needs at least one factor".into()));
        }
        Ok(AnalyticSpace::Torus { factors })
    }

    /// Number of coordinates of a point.
    pub fn ambient_dim(&self) -> usize {
        match self {
            AnalyticSpace::Sphere { dim } => dim + 1,
            AnalyticSpace::Snowflake { base, .. } => base.ambient_dim(),
            AnalyticSpace::Product(a, b) => a.ambient_dim() + b.ambient_dim(),
            AnalyticSpace::Torus { factors } => 2 * factors,
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let dim = self.ambient_dim();
        for p in [x, y] {
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
        }
        match self {
            AnalyticSpace::Sphere { .. } => {
                check_unit(x)?;
                check_unit(y)?;
                Ok(geodesic(x, y))
            }
            AnalyticSpace::Snowflake { base, alpha } => Ok(base.distance(x, y)?.powf(*alpha)),
            AnalyticSpace::Product(a, b) => {
                let k = a.ambient_dim();
                let da = a.distance(&x[..k], &y[..k])?;
                let db = b.distance(&x[k..], &y[k..])?;
                Ok(da.hypot(db))
            }
            AnalyticSpace::Torus { .. } => {
                let mut acc = 0.0;
                for (xc, yc) in x.chunks(2).zip(y.chunks(2)) {
                    check_unit(xc)?;
                    check_unit(yc)?;
                    let g = geodesic(xc, yc);
                    acc += g * g;
                }
                Ok(acc.sqrt())
            }
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

fn check_unit(x: &[f64]) -> Result<()> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::PointOffManifold(format!("norm {norm} is not 1")));
    }
    Ok(())
}

/// Great-circle distance of unit vectors, dot product clamped to [-1, 1].
pub fn geodesic(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    dot.clamp(-1.0, 1.0).acos()
}

impl fmt::Display for AnalyticSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticSpace::Sphere { dim: 1 } => write!(f, "circle"),
            AnalyticSpace::Sphere { dim } => write!(f, "sphere({dim})"),
            AnalyticSpace::Snowflake { base, alpha } => write!(f, "snowflake({base},{alpha})"),
            AnalyticSpace::Product(a, b) => write!(f, "product({a},{b})"),
            AnalyticSpace::Torus { factors } => write!(f, "torus({factors})"),
        }
    }
}

impl FromStr for AnalyticSpace {
    type Err = Error;

    /// Parses `circle`, `sphere(d)`, `torus(k)`, `snowflake(<space>,alpha)`
    /// and `product(<space>,<space>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = SpaceParser { src: s.as_bytes(), pos: 0 };
        let space = parser.space()?;
        if parser.pos != parser.src.len() {
            return Err(Error::Parse(format!("trailing input in space description {s:?}")));
        }
        Ok(space)
    }
}

struct SpaceParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl SpaceParser<'_> {
    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || matches!(self.src[self.pos], b'.' | b'e' | b'E' | b'-' | b'+'))
        {
            self.pos += 1;
        }
        let text = String::from_utf8_lossy(&self.src[start..self.pos]);
        text.parse().map_err(|_| Error::Parse(format!("bad number {text:?} in space description")))
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{}' at offset {} in space description", c as char, self.pos)))
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let v = self.number()?;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(Error::Parse(format!("expected a non-negative integer, got {v}")));
        }
        Ok(v as usize)
    }

    fn space(&mut self) -> Result<AnalyticSpace> {
        match self.ident().as_str() {
            "circle" => Ok(AnalyticSpace::circle()),
            "sphere" => {
                self.expect(b'(')?;
                let d = self.integer()?;
                self.expect(b')')?;
                AnalyticSpace::sphere(d)
            }
            "torus" => {
                self.expect(b'(')?;
                let k = self.integer()?;
                self.expect(b')')?;
                AnalyticSpace::torus(k)
            }
            "snowflake" => {
                self.expect(b'(')?;
                let base = self.space()?;
                self.expect(b',')?;
                let alpha = self.number()?;
                self.expect(b')')?;
                AnalyticSpace::snowflake(base, alpha)
            }
            "product" => {
                self.expect(b'(')?;
                let a = self.space()?;
                self.expect(b',')?;
                let b = self.space()?;
                self.expect(b')')?;
                Ok(AnalyticSpace::product(a, b))
            }
            other => Err(Error::Parse(format!("unknown space kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Grid,
    UniformRandom,
}

impl FromStr for SampleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(SampleMode::Grid),
            "uniform" | "uniform_random" | "random" => Ok(SampleMode::UniformRandom),
            _ => Err(Error::Parse(format!("unknown sample mode {s:?}"))),
        }
    }
}

/// How to draw a finite sample. For grids on products `n` counts points
/// per factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub mode: SampleMode,
    pub n: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn grid(n: usize) -> Self {
        SampleSpec { mode: SampleMode::Grid, n, seed: 0 }
    }

    pub fn uniform(n: usize, seed: u64) -> Self {
        SampleSpec { mode: SampleMode::UniformRandom, n, seed }
    }
}

/// Points of the regular `n`-gon on the unit circle, at angles `2 pi i / n`.
pub fn circle_grid_points(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

/// Draws sample points (in ambient coordinates) from `space`.
pub fn sample_points(space: &AnalyticSpace, spec: &SampleSpec) -> Result<Vec<Vec<f64>>> {
    if spec.n == 0 {
        return Err(Error::InvalidArgument("sample size must be >= 1".into()));
    }
    match spec.mode {
        SampleMode::Grid => grid_points(space, spec.n),
        SampleMode::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            Ok((0..spec.n).map(|_| random_point(space, &mut rng)).collect())
        }
    }
}

fn grid_points(space: &AnalyticSpace, n: usize) -> Result<Vec<Vec<f64>>> {
    match space {
        AnalyticSpace::Sphere { dim: 1 } => Ok(circle_grid_points(n)),
        AnalyticSpace::Sphere { .. } => Err(Error::GridUnsupported(space.describe())),
        AnalyticSpace::Snowflake { base, .. } => grid_points(base, n),
        AnalyticSpace::Product(a, b) => Ok(cartesian(&grid_points(a, n)?, &grid_points(b, n)?)),
        AnalyticSpace::Torus { factors } => {
            let circle = circle_grid_points(n);
            let mut pts = circle.clone();
            for _ in 1..*factors {
                pts = cartesian(&pts, &circle);
            }
            Ok(pts)
        }
    }
}

fn cartesian(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.iter().chain(y).copied().collect()))
        .collect()
}

fn random_point(space: &AnalyticSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match space {
        AnalyticSpace::Sphere { dim } => random_unit(dim + 1, rng),
        AnalyticSpace::Snowflake { base, .. } => random_point(base, rng),
        AnalyticSpace::Product(a, b) => {
            let mut p = random_point(a, rng);
            p.extend(random_point(b, rng));
            p
        }
        AnalyticSpace::Torus { factors } => (0..*factors).flat_map(|_| random_unit(2, rng)).collect(),
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Pairwise distance matrix of `points` under `space`, zero diagonal.
pub fn distance_matrix(space: &AnalyticSpace, points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = points.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = space.distance(&points[i], &points[j])?;
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

/// Samples `space` and returns the finite space with uniform weights.
pub fn sample(space: &AnalyticSpace, spec: &SampleSpec) -> Result<FiniteSpace> {
    let points = sample_points(space, spec)?;
    FiniteSpace::uniform(distance_matrix(space, &points)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn equilateral() -> FiniteSpace {
        let d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        FiniteSpace::uniform(d).unwrap()
    }

    #[test]
    fn singleton_space() {
        let s = FiniteSpace::from_matrix(DMatrix::zeros(1, 1), DVector::from_element(1, 1.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.fourth_moment_norm(), 0.0);
    }

    #[test]
    fn validation_errors_name_indices() {
        let mut d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        d[(0, 1)] = 1.0;
        d[(1, 0)] = 2.0;
        let w = DVector::from_element(3, 1.0 / 3.0);
        assert!(matches!(
            FiniteSpace::from_matrix(d, w.clone()),
            Err(Error::AsymmetricMatrix { i: 0, j: 1, .. })
        ));

        let mut d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        d[(2, 1)] = -1.0;
        assert!(matches!(
            FiniteSpace::from_matrix(d, w.clone()),
            Err(Error::NegativeDistance { i: 2, j: 1, .. })
        ));

        let mut d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        d[(1, 1)] = 0.5;
        assert!(matches!(FiniteSpace::from_matrix(d, w.clone()), Err(Error::NonzeroDiagonal { i: 1, .. })));

        let mut d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        d[(0, 2)] = 3.0;
        d[(2, 0)] = 3.0;
        assert!(matches!(FiniteSpace::from_matrix(d, w), Err(Error::TriangleViolation { .. })));

        let d = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        let bad = DVector::from_vec(vec![0.5, 0.5, 0.5]);
        assert!(matches!(FiniteSpace::from_matrix(d.clone(), bad), Err(Error::BadWeights(_))));
        let neg = DVector::from_vec(vec![1.5, -0.5, 0.0]);
        assert!(matches!(FiniteSpace::from_matrix(d, neg), Err(Error::BadWeights(_))));
    }

    #[test]
    fn fourth_moment_of_equilateral_triangle() {
        assert!(close(equilateral().fourth_moment_norm(), (2.0f64 / 3.0).powf(0.25), 1e-15));
    }

    #[test]
    fn fourth_moment_of_circle_grid_approaches_limit() {
        let limit = PI * 5f64.powf(-0.25);
        let err = |n| (sample(&AnalyticSpace::circle(), &SampleSpec::grid(n)).unwrap().fourth_moment_norm() - limit).abs();
        let (e64, e256) = (err(64), err(256));
        assert!(e256 < e64);
        assert!(e256 < 1e-3, "{e256}");
    }

    #[test]
    fn sphere_and_snowflake_distances() {
        let c = AnalyticSpace::circle();
        let (x, y) = ([1.0, 0.0], [-1.0, 0.0]);
        assert_eq!(c.distance(&x, &y).unwrap(), PI);
        let s = AnalyticSpace::snowflake(c.clone(), 0.5).unwrap();
        assert_eq!(s.distance(&x, &y).unwrap(), PI.sqrt());
        assert!(matches!(c.distance(&[2.0, 0.0], &y), Err(Error::PointOffManifold(_))));
    }

    #[test]
    fn product_distance_is_root_sum_square() {
        let p = AnalyticSpace::product(AnalyticSpace::circle(), AnalyticSpace::circle());
        let x = [1.0, 0.0, 1.0, 0.0];
        let y = [0.0, 1.0, 0.0, 1.0];
        assert!(close(p.distance(&x, &y).unwrap(), PI / 2f64.sqrt(), 1e-15));
        let t = AnalyticSpace::torus(2).unwrap();
        assert!(close(t.distance(&x, &y).unwrap(), PI / 2f64.sqrt(), 1e-15));
    }

    #[test]
    fn circle_grids() {
        let s4 = sample(&AnalyticSpace::circle(), &SampleSpec::grid(4)).unwrap();
        assert!(close(s4.distance(0, 1), PI / 2.0, 1e-14));
        assert!(close(s4.distance(0, 2), PI, 1e-14));
        let s2 = sample(&AnalyticSpace::circle(), &SampleSpec::grid(2)).unwrap();
        assert!(close(s2.distance(0, 1), PI, 1e-14));
    }

    #[test]
    fn torus_grid_has_product_weights() {
        let t = sample(&AnalyticSpace::torus(2).unwrap(), &SampleSpec::grid(4)).unwrap();
        assert_eq!(t.len(), 16);
        assert!(t.weights().iter().all(|&w| close(w, 1.0 / 16.0, 1e-15)));
    }

    #[test]
    fn grid_unsupported_on_higher_spheres() {
        let s2 = AnalyticSpace::sphere(2).unwrap();
        assert!(matches!(sample(&s2, &SampleSpec::grid(8)), Err(Error::GridUnsupported(_))));
    }

    #[test]
    fn large_spaces_use_sampled_triangle_check() {
        let n = EXHAUSTIVE_TRIANGLE_LIMIT + 8;
        let s = sample(&AnalyticSpace::circle(), &SampleSpec::grid(n)).unwrap();
        assert_eq!(s.len(), n);
    }

    #[test]
    fn space_spec_round_trips_through_text() {
        for text in ["circle", "sphere(3)", "torus(2)", "snowflake(circle,0.5)", "product(sphere(2),torus(1))"] {
            let s: AnalyticSpace = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!("cube(3)".parse::<AnalyticSpace>().is_err());
    }

    #[test]
    fn permutation_and_product_of_finite_spaces() {
        let tri = equilateral();
        let p = tri.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.distances(), tri.distances());
        let prod = tri.product(&tri).unwrap();
        assert_eq!(prod.len(), 9);
        assert!(close(prod.distance(0, 4), 2f64.sqrt(), 1e-15));
    }
}
