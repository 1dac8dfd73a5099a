//! Kernel eigenvalues on `S^d` by direct integration (Funk-Hecke).
//!
//! Under the normalized surface measure, a zonal kernel `k(angle)` acts on
//! degree-`j` harmonics by
//!
//! ```text
//! lambda_j = int_0^pi k(phi) P_j(cos phi) sin^{d-1}(phi) dphi / int_0^pi sin^{d-1}(phi) dphi
//! ```
//!
//! where `P_j` is the Gegenbauer polynomial of index `(d-1)/2` scaled to
//! `P_j(1) = 1` (`cos(j phi)` on the circle).

use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use super::coeff::KernelKind;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

const RULE_ORDER: usize = 16;
const CIRCLE_ABS_TOL: f64 = 1e-10;
const SPHERE_ABS_TOL: f64 = 1e-9;

fn kernel(kind: KernelKind, angle: f64) -> f64 {
    match kind {
        KernelKind::Full => -0.5 * angle * angle,
        KernelKind::Snowflake => -0.5 * angle,
    }
}

/// Degree-`j` zonal polynomial on `S^d` normalized to 1 at `t = 1`:
/// Chebyshev `T_j` for `d = 1`, Gegenbauer `C_j^{(d-1)/2} / C_j^{(d-1)/2}(1)`
/// otherwise.
pub fn zonal_polynomial(d: usize, j: usize, t: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if d == 1 {
        let (mut p0, mut p1) = (1.0, t);
        for _ in 1..j {
            let p2 = 2.0 * t * p1 - p0;
            p0 = p1;
            p1 = p2;
        }
        return p1;
    }
    let alpha = (d as f64 - 1.0) / 2.0;
    // Run the recurrence at t and at 1 together and normalize as we go.
    let (mut p0, mut p1) = (1.0, 2.0 * alpha * t);
    let (mut q0, mut q1) = (1.0, 2.0 * alpha);
    for n in 1..j {
        let nf = n as f64;
        let p2 = (2.0 * (nf + alpha) * t * p1 - (nf + 2.0 * alpha - 1.0) * p0) / (nf + 1.0);
        let q2 = (2.0 * (nf + alpha) * q1 - (nf + 2.0 * alpha - 1.0) * q0) / (nf + 1.0);
        p0 = p1 / q2;
        p1 = p2 / q2;
        q0 = q1 / q2;
        q1 = 1.0;
    }
    p1 / q1
}

/// Dimension of the degree-`j` harmonic space on `S^d`:
/// `(2j+d-1) (j+d-2)! / (j! (d-1)!)`, and 1 for `j = 0`.
pub fn multiplicity(d: usize, j: usize) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let (df, jf) = (d as f64, j as f64);
    let ln = (2.0 * jf + df - 1.0).ln() + ln_gamma(jf + df - 1.0) - ln_gamma(jf + 1.0) - ln_gamma(df);
    ln.exp().round()
}

/// Degree-`j` eigenvalue of the `kind` kernel operator on `S^d` under the
/// normalized measure.
pub fn eigenvalue_quadrature(d: usize, j: usize, kind: KernelKind) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument("sphere dimension must be >= 1".into()));
    }
    let rule = GaussLegendre::new(RULE_ORDER);
    let initial_panels = (j / 4).max(2);
    if d == 1 {
        let f = |phi: f64| kernel(kind, phi) * (j as f64 * phi).cos();
        let v = rule.integrate_converged(&f, 0.0, PI, initial_panels, CIRCLE_ABS_TOL * PI)?;
        return Ok(v / PI);
    }
    let power = d as i32 - 1;
    let f = |phi: f64| kernel(kind, phi) * zonal_polynomial(d, j, phi.cos()) * phi.sin().powi(power);
    let v = rule.integrate_converged(&f, 0.0, PI, initial_panels, SPHERE_ABS_TOL)?;
    let df = d as f64;
    let area = PI.sqrt() * (ln_gamma(df / 2.0) - ln_gamma((df + 1.0) / 2.0)).exp();
    Ok(v / area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_fourier_coefficients() {
        assert!((eigenvalue_quadrature(1, 1, KernelKind::Full).unwrap() - 1.0).abs() < 1e-10);
        assert!((eigenvalue_quadrature(1, 2, KernelKind::Full).unwrap() + 0.25).abs() < 1e-10);
        assert!((eigenvalue_quadrature(1, 1, KernelKind::Snowflake).unwrap() - 1.0 / PI).abs() < 1e-10);
        assert!((eigenvalue_quadrature(1, 0, KernelKind::Full).unwrap() + PI * PI / 6.0).abs() < 1e-10);
    }

    #[test]
    fn multiplicities() {
        assert_eq!(multiplicity(1, 0), 1.0);
        assert_eq!(multiplicity(1, 5), 2.0);
        assert_eq!(multiplicity(2, 3), 7.0);
        // S^3: (j+1)^2
        assert_eq!(multiplicity(3, 4), 25.0);
    }

    #[test]
    fn zonal_polynomials() {
        let t: f64 = 0.3;
        assert!((zonal_polynomial(1, 5, t) - (5.0 * t.acos()).cos()).abs() < 1e-13);
        // Legendre P_2 on S^2.
        assert!((zonal_polynomial(2, 2, t) - 0.5 * (3.0 * t * t - 1.0)).abs() < 1e-14);
        for d in 1..5 {
            for j in 0..30 {
                assert!((zonal_polynomial(d, j, 1.0) - 1.0).abs() < 1e-12, "d={d} j={j}");
            }
        }
    }

    #[test]
    fn sphere_degree_one_snowflake_relation() {
        for d in 2..=3 {
            let full = eigenvalue_quadrature(d, 1, KernelKind::Full).unwrap();
            let snow = eigenvalue_quadrature(d, 1, KernelKind::Snowflake).unwrap();
            assert!((full - PI * snow).abs() < 1e-8, "d={d}");
        }
    }
}
