mod common;

use std::f64::consts::PI;

use mdslab_core::mds::row_distance_sq;
use mdslab_core::products::verify_product_embedding;
use mdslab_core::sphere::{alpha_ratio, eigenvalue_quadrature, s_peak, s_star, theta, KernelKind};
use mdslab_core::stability::{
    aligned_residual, eigen_perturbation_check, gw_bruteforce, gw_cost, gw_kernel_bound, procrustes, Coupling,
};
use mdslab_core::table::{space_from_csv, space_to_csv};
use mdslab_core::{classical_mds, sample, AnalyticSpace, FiniteSpace, SampleSpec};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_permutation(r: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(r);
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn krein_map_reproduces_every_distance(seed in any::<u64>(), n in 1usize..40, weighted in any::<bool>()) {
        let space = common::random_space(&mut rng(seed), n, weighted);
        let r = classical_mds(&space).unwrap();
        let krein = r.krein_map();
        for i in 0..n {
            for j in 0..n {
                let d2 = space.distance(i, j).powi(2);
                prop_assert!((r.reconstruct_distance_sq(i, j) - d2).abs() <= 1e-9 * d2.max(1.0));
                let pn = krein[i].difference(&krein[j]).pseudo_norm_sq();
                prop_assert!((pn - d2).abs() <= 1e-9 * d2.max(1.0));
            }
        }
    }

    #[test]
    fn positive_part_never_contracts(seed in any::<u64>(), n in 2usize..40) {
        let space = common::random_space(&mut rng(seed), n, true);
        let r = classical_mds(&space).unwrap();
        let pts = r.embed(r.positive_count());
        for i in 0..n {
            for j in 0..n {
                prop_assert!(row_distance_sq(&pts, i, j) >= space.distance(i, j).powi(2) - 1e-9);
            }
        }
    }

    #[test]
    fn trace_is_half_the_mean_squared_distance(seed in any::<u64>(), n in 2usize..40) {
        let space = common::random_space(&mut rng(seed), n, true);
        let r = classical_mds(&space).unwrap();
        let w = space.weights();
        let mut half = 0.0;
        for i in 0..n {
            for j in 0..n {
                half += 0.5 * w[i] * w[j] * space.distance(i, j).powi(2);
            }
        }
        prop_assert!((r.trace() - half).abs() <= 1e-10 * half);
    }

    #[test]
    fn spectrum_is_relabeling_invariant(seed in any::<u64>(), n in 2usize..30) {
        let mut g = rng(seed);
        let space = common::random_space(&mut g, n, true);
        let perm = random_permutation(&mut g, n);
        let a = classical_mds(&space).unwrap();
        let b = classical_mds(&space.permuted(&perm).unwrap()).unwrap();
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn permutation_couplings_bound_the_bruteforce_search(seed in any::<u64>(), n in 1usize..=6) {
        let mut g = rng(seed);
        let a = common::random_space(&mut g, n, false);
        let b = common::random_space(&mut g, n, false);
        let best = gw_bruteforce(&a, &b, 4.0).unwrap();
        let map = random_permutation(&mut g, n);
        let c = Coupling::from_map(&a, &b, &map).unwrap();
        prop_assert!(gw_cost(&c, &a, &b, 4.0).unwrap() >= best - 1e-12);
        let prod = Coupling::product(&a, &b).unwrap();
        prop_assert!(gw_cost(&prod, &a, &b, 4.0).unwrap() >= 0.0);
        // Relabeling A does not change the search result.
        let pa = a.permuted(&random_permutation(&mut g, n)).unwrap();
        prop_assert!((gw_bruteforce(&pa, &b, 4.0).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn gw_cost_is_invariant_under_joint_relabeling(seed in any::<u64>(), n in 2usize..10, m in 2usize..10) {
        let mut g = rng(seed);
        let a = common::random_space(&mut g, n, true);
        let b = common::random_space(&mut g, m, true);
        let c = Coupling::product(&a, &b).unwrap();
        let perm = random_permutation(&mut g, n);
        let pa = a.permuted(&perm).unwrap();
        let plan = DMatrix::from_fn(n, m, |i, j| c.plan()[(perm[i], j)]);
        let pc = Coupling::new(plan, pa.weights(), b.weights()).unwrap();
        let (x, y) = (gw_cost(&c, &a, &b, 2.0).unwrap(), gw_cost(&pc, &pa, &b, 2.0).unwrap());
        prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn kernel_gap_is_bounded_by_coupling_distortion(seed in any::<u64>(), n in 2usize..12, m in 2usize..12) {
        let mut g = rng(seed);
        let a = common::random_space(&mut g, n, true);
        let b = common::random_space(&mut g, m, true);
        // The bound can be attained, so allow a few ulps of rounding.
        let check = gw_kernel_bound(&a, &b, &Coupling::product(&a, &b).unwrap()).unwrap();
        prop_assert!(check.lhs <= check.rhs * (1.0 + 1e-12), "{check:?}");
        let same = common::random_space(&mut rng(seed ^ 1), n, false);
        let scaled = FiniteSpace::uniform(same.distances() * (1.0 + g.random_range(0.0..0.5))).unwrap();
        let check = gw_kernel_bound(&same, &scaled, &Coupling::identity(&same)).unwrap();
        prop_assert!(check.lhs <= check.rhs * (1.0 + 1e-12), "{check:?}");
    }

    #[test]
    fn procrustes_never_increases_the_discrepancy(seed in any::<u64>(), n in 1usize..20, m in 1usize..5) {
        let mut g = rng(seed);
        let x = DMatrix::from_fn(n, m, |_, _| g.random_range(-1.0..1.0));
        let y = DMatrix::from_fn(n, m, |_, _| g.random_range(-1.0..1.0));
        let w = common::random_weights(&mut g, n);
        let unaligned = aligned_residual(&x, &y, &w, &DMatrix::identity(m, m));
        for diag in [false, true] {
            let r = procrustes(&x, &y, &w, diag).unwrap();
            prop_assert!(r.residual <= unaligned + 1e-12);
            prop_assert!((r.q.transpose() * &r.q - DMatrix::identity(m, m)).norm() < 1e-10);
        }
    }

    #[test]
    fn noisy_rotations_align_to_noise_level(seed in any::<u64>(), m in 1usize..5) {
        let mut g = rng(seed);
        let n = 40;
        let x = DMatrix::from_fn(n, m, |_, _| g.random_range(-1.0..1.0));
        let q0 = DMatrix::from_fn(m, m, |_, _| g.random_range(-1.0..1.0)).qr().q();
        let sigma = 1e-3;
        let noise = DMatrix::from_fn(n, m, |_, _| g.random_range(-sigma..sigma));
        let y = &x * &q0 + noise;
        let w = DVector::from_element(n, 1.0 / n as f64);
        let r = procrustes(&x, &y, &w, false).unwrap();
        prop_assert!(r.residual <= 2.0 * sigma * (m as f64).sqrt());
    }

    #[test]
    fn kato_matching_on_random_pairs(seed in any::<u64>(), n in 1usize..=64) {
        let mut g = rng(seed);
        let s1 = common::symmetric(&mut g, n);
        let s2 = common::symmetric(&mut g, n);
        prop_assert!(eigen_perturbation_check(&s1, &s2).unwrap().matching_holds());
        let small = &s1 + 1e-4 * common::symmetric(&mut g, n);
        let rep = eigen_perturbation_check(&s1, &small).unwrap();
        prop_assert!(rep.matching_holds());
        prop_assert!(rep.projectors.iter().all(|p| p.holds()));
    }

    // Arguments are kept where log-gamma values stay in the hundreds; beyond
    // that their f64 rounding alone exceeds the 1e-12 target.
    #[test]
    fn theta_ratio_is_alpha(d in 1usize..6, n in 0usize..60, s in 0.0f64..120.0) {
        let r = (theta(d, n, s + 1.0).ln_abs - theta(d, n, s).ln_abs).exp();
        prop_assert!((r / alpha_ratio(d, n, s) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn theta_is_unimodal(d in 1usize..6, n in 1usize..150) {
        let peak = s_peak(d, n);
        for s in 0..(2 * peak + 20) {
            let a = alpha_ratio(d, n, s as f64);
            if (s as f64) < s_star(d, n) {
                prop_assert!(a > 1.0);
            } else {
                prop_assert!(a <= 1.0);
            }
            prop_assert_eq!(s < peak, a > 1.0);
        }
    }

    #[test]
    fn product_distances_add(seed in any::<u64>(), na in 1usize..=12, nb in 1usize..=12) {
        let mut g = rng(seed);
        let a = common::random_space(&mut g, na, true);
        let b = common::random_space(&mut g, nb, false);
        let r = verify_product_embedding(&a, &b).unwrap();
        prop_assert!(r.spectrum_error <= 1e-8 && r.additivity_error <= 1e-8, "{r:?}");
    }

    #[test]
    fn spaces_round_trip_through_csv(seed in any::<u64>(), n in 1usize..30) {
        let space = common::random_space(&mut rng(seed), n, true);
        let back = space_from_csv(&space_to_csv(&space)).unwrap();
        prop_assert_eq!(back.distances(), space.distances());
        prop_assert_eq!(back.weights(), space.weights());
    }
}

#[test]
fn circle_quadrature_matches_fourier_oracle() {
    for k in 1..=20usize {
        let full = eigenvalue_quadrature(1, k, KernelKind::Full).unwrap();
        let exact = if k % 2 == 1 { 1.0 } else { -1.0 } / (k * k) as f64;
        assert!((full - exact).abs() < 1e-8, "k = {k}");
        if k % 2 == 1 {
            let snow = eigenvalue_quadrature(1, k, KernelKind::Snowflake).unwrap();
            assert!((full - PI * snow).abs() < 1e-8, "k = {k}");
        }
    }
}

#[test]
fn circle_grid_spectrum_approaches_the_operator_limit() {
    let grid = sample(&AnalyticSpace::circle(), &SampleSpec::grid(512)).unwrap();
    let r = classical_mds(&grid).unwrap();
    let ev = r.eigenvalues();
    let positive: Vec<f64> = ev.iter().copied().filter(|&l| l > 0.0).collect();
    let mut negative: Vec<f64> = ev.iter().copied().filter(|&l| l < 0.0).collect();
    negative.reverse();
    // Each nonzero frequency k carries a cos/sin pair.
    for (idx, k) in [1usize, 3, 5].iter().enumerate() {
        let want = 1.0 / (k * k) as f64;
        assert!((positive[2 * idx] - want).abs() < 1e-3 && (positive[2 * idx + 1] - want).abs() < 1e-3);
    }
    for (idx, k) in [2usize, 4].iter().enumerate() {
        let want = -1.0 / (k * k) as f64;
        assert!((negative[2 * idx] - want).abs() < 1e-3 && (negative[2 * idx + 1] - want).abs() < 1e-3);
    }
}
