//! Power-series coefficients of the sphere kernels in `t = x . y`:
//! `-arccos(t)^2 / 2 = sum a_n t^n` and `-arccos(t) / 2 = sum b_n t^n`.

use std::f64::consts::{LN_2, PI};

use statrs::function::gamma::ln_gamma;

/// A real number stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, ln_abs: f64::NEG_INFINITY };

    pub fn new(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLog { sign: sign.signum(), ln_abs }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, ln_abs: x.abs().ln() }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.ln_abs.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }
}

/// Which kernel the coefficients belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `-dist^2 / 2`.
    Full,
    /// `-dist / 2`, the kernel of the square-root snowflake.
    Snowflake,
}

impl std::str::FromStr for KernelKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "full" => Ok(KernelKind::Full),
            "snowflake" => Ok(KernelKind::Snowflake),
            _ => Err(crate::Error::Parse(format!("unknown kernel kind {s:?}"))),
        }
    }
}

/// `ln( (2j)! / ((2j+1) 2^{2j+1} (j!)^2) )`, the arcsine Taylor coefficient
/// of `t^{2j+1}` divided by two.
fn ln_odd_core(j: u64) -> f64 {
    let jf = j as f64;
    ln_gamma(2.0 * jf + 1.0) - (2.0 * jf + 1.0).ln() - (2.0 * jf + 1.0) * LN_2 - 2.0 * ln_gamma(jf + 1.0)
}

/// Coefficient of `t^n` in the kernel expansion.
///
/// For the full kernel:
/// `a_0 = -pi^2/8`, `a_{2j+1} = pi (2j)! / ((2j+1) 2^{2j+1} (j!)^2)`,
/// `a_{2j+2} = -4^j (j!)^2 / (2 (j+1) (2j+1) (2j)!)`.
/// For the snowflake kernel: `b_0 = -pi/4`, `b_{2j+1} = a_{2j+1} / pi`,
/// and `b_n = 0` for even `n >= 2`.
pub fn coeff(kind: KernelKind, n: u64) -> SignedLog {
    match (kind, n) {
        (KernelKind::Full, 0) => SignedLog::new(-1, (PI * PI / 8.0).ln()),
        (KernelKind::Snowflake, 0) => SignedLog::new(-1, (PI / 4.0).ln()),
        (KernelKind::Full, n) if n % 2 == 1 => SignedLog::new(1, PI.ln() + ln_odd_core((n - 1) / 2)),
        (KernelKind::Snowflake, n) if n % 2 == 1 => SignedLog::new(1, ln_odd_core((n - 1) / 2)),
        (KernelKind::Full, n) => {
            let j = ((n - 2) / 2) as f64;
            let ln = j * 4f64.ln() + 2.0 * ln_gamma(j + 1.0)
                - LN_2
                - (j + 1.0).ln()
                - (2.0 * j + 1.0).ln()
                - ln_gamma(2.0 * j + 1.0);
            SignedLog::new(-1, ln)
        }
        (KernelKind::Snowflake, _) => SignedLog::ZERO,
    }
}

/// `coeff(kind, n + 2) / coeff(kind, n)` for `n >= 1`, from the Taylor
/// recurrences of `arcsin` and `arcsin^2`. Zero for even snowflake indices.
pub fn coeff_ratio(kind: KernelKind, n: u64) -> f64 {
    assert!(n >= 1, "coefficient ratio undefined at n = 0");
    if n % 2 == 1 {
        let i = ((n - 1) / 2) as f64;
        (2.0 * i + 1.0).powi(2) / (2.0 * (i + 1.0) * (2.0 * i + 3.0))
    } else if kind == KernelKind::Full {
        let i = ((n - 2) / 2) as f64;
        2.0 * (i + 1.0).powi(2) / ((i + 2.0) * (2.0 * i + 3.0))
    } else {
        0.0
    }
}

/// `a_n^+ = max(a_n, 0)` in log form.
pub fn positive_part(x: SignedLog) -> SignedLog {
    if x.sign > 0 {
        x
    } else {
        SignedLog::ZERO
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn val(kind: KernelKind, n: u64) -> f64 {
        coeff(kind, n).to_f64()
    }

    #[test]
    fn leading_coefficients() {
        assert!((val(KernelKind::Full, 0) + PI * PI / 8.0).abs() < 1e-15);
        assert!((val(KernelKind::Snowflake, 0) + PI / 4.0).abs() < 1e-15);
        assert!((val(KernelKind::Full, 1) - PI / 2.0).abs() < 1e-15);
        assert!((val(KernelKind::Full, 2) + 0.5).abs() < 1e-15);
        assert!((val(KernelKind::Snowflake, 1) - 0.5).abs() < 1e-15);
        assert_eq!(val(KernelKind::Snowflake, 4), 0.0);
    }

    #[test]
    fn sign_pattern() {
        for j in 0..100 {
            assert_eq!(coeff(KernelKind::Full, 2 * j + 1).sign, 1);
            assert_eq!(coeff(KernelKind::Full, 2 * j + 2).sign, -1);
            assert_eq!(coeff(KernelKind::Snowflake, 2 * j + 1).sign, 1);
            assert_eq!(coeff(KernelKind::Snowflake, 2 * j + 2).sign, 0);
        }
    }

    // Independent route: the Taylor coefficients of arcsin(t)^2 satisfy
    // c_{2j+2} = c_{2j} * (2j)^2 / ((2j+1)(2j+2)) with c_2 = 1, and those of
    // arcsin(t) satisfy e_{2j+1} = e_{2j-1} (2j-1)^2 / ((2j)(2j+1)), e_1 = 1.
    #[test]
    fn coefficients_match_taylor_recurrences() {
        let mut c = 1.0; // c_2
        let mut e = 1.0; // e_1
        for j in 1..60u64 {
            let jf = j as f64;
            assert!((val(KernelKind::Full, 2 * j) / (-0.5 * c) - 1.0).abs() < 1e-12, "a_{}", 2 * j);
            assert!((val(KernelKind::Full, 2 * j - 1) / (0.5 * PI * e) - 1.0).abs() < 1e-12);
            assert!((val(KernelKind::Snowflake, 2 * j - 1) / (0.5 * e) - 1.0).abs() < 1e-12);
            c *= (2.0 * jf).powi(2) / ((2.0 * jf + 1.0) * (2.0 * jf + 2.0));
            e *= (2.0 * jf - 1.0).powi(2) / ((2.0 * jf) * (2.0 * jf + 1.0));
        }
    }

    #[test]
    fn series_sum_to_the_kernels() {
        for t in [-0.6f64, -0.1, 0.0, 0.3, 0.7] {
            let full: f64 = (0..400).map(|n| val(KernelKind::Full, n) * t.powi(n as i32)).sum();
            let snow: f64 = (0..400).map(|n| val(KernelKind::Snowflake, n) * t.powi(n as i32)).sum();
            assert!((full + 0.5 * t.acos().powi(2)).abs() < 1e-12, "t = {t}");
            assert!((snow + 0.5 * t.acos()).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn ratios_match_closed_forms() {
        for kind in [KernelKind::Full, KernelKind::Snowflake] {
            for n in 1..150u64 {
                let (a, b) = (coeff(kind, n), coeff(kind, n + 2));
                if a.is_zero() {
                    assert_eq!(coeff_ratio(kind, n), 0.0);
                } else {
                    let direct = (b.ln_abs - a.ln_abs).exp();
                    assert!((coeff_ratio(kind, n) / direct - 1.0).abs() < 1e-12, "n = {n}");
                }
            }
        }
    }

    #[test]
    fn signed_log_round_trip() {
        for x in [-3.5, 0.0, 1e-300, 42.0] {
            let y = SignedLog::from_f64(x).to_f64();
            // exp(ln x) keeps about |ln x| ulps of relative error.
            assert!((x - y).abs() <= 1e-13 * x.abs());
        }
    }
}
