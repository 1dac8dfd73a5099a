//! Shared generators for the integration tests.

#![allow(dead_code)]

use mdslab_core::FiniteSpace;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Shortest-path metric of the complete graph on `n` vertices with edge
/// lengths drawn from `[0.1, 1)`, completed by Floyd-Warshall.
pub fn shortest_path_metric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.random_range(0.1..1.0);
            d[(i, j)] = w;
            d[(j, i)] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    d
}

/// Probability vector with entries drawn from `[0.2, 1)` before scaling.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> DVector<f64> {
    let w = DVector::from_fn(n, |_, _| rng.random_range(0.2..1.0));
    let s = w.sum();
    w / s
}

/// A random metric space, uniform or weighted.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, weighted: bool) -> FiniteSpace {
    let d = shortest_path_metric(rng, n);
    if weighted {
        FiniteSpace::from_matrix(d, random_weights(rng, n)).expect("valid random space")
    } else {
        FiniteSpace::uniform(d).expect("valid random space")
    }
}

pub fn symmetric<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn unit(theta: f64) -> Vec<f64> {
    vec![theta.cos(), theta.sin()]
}

pub fn equilateral() -> FiniteSpace {
    FiniteSpace::uniform(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap()
}

/// The 4-cycle graph metric.
pub fn four_cycle() -> FiniteSpace {
    FiniteSpace::uniform(DMatrix::from_fn(4, 4, |i, j| {
        let k = i.abs_diff(j);
        k.min(4 - k) as f64
    }))
    .unwrap()
}
