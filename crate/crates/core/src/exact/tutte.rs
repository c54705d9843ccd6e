//! Asymptotic count of rooted simplicial 3-polytopes:
//! `Z_n = 3 / (16 sqrt(6 pi n^5)) * (256/27)^(n-2)`.
//!
//! The primary evaluator works in log space so arbitrarily large n cannot
//! overflow; `tutte_exact_reference` is an independent fixed-point big-integer
//! evaluation of the same closed form, used to cross-check the float route to
//! many significant digits.

use num::bigint::BigInt;
use num::integer::Roots;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy)]
pub struct TutteEstimate {
    pub n: u64,
    /// Natural log of Z_n; finite for any n where f64 holds the magnitude.
    pub log_z: f64,
    /// exp(log_z); +inf once the count exceeds f64 range.
    pub z: f64,
}

/// Evaluates the asymptotic count in log space.
pub fn tutte_asymptotic(n: u64) -> TutteEstimate {
    assert!(n >= 1, "n must be positive");
    let nf = n as f64;
    let log_z = 3f64.ln() - 16f64.ln() - 0.5 * ((6.0 * std::f64::consts::PI).ln() + 5.0 * nf.ln())
        + (nf - 2.0) * (256f64 / 27f64).ln();
    TutteEstimate {
        n,
        log_z,
        z: log_z.exp(),
    }
}

/// A positive value as `digits * 10^exp10` with the decimal point after the
/// first digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighPrecision {
    pub digits: String,
    pub exp10: i64,
}

impl HighPrecision {
    pub fn to_f64(&self) -> f64 {
        let mantissa: f64 = format!("{}.{}", &self.digits[..1], &self.digits[1..])
            .parse()
            .expect("decimal digits");
        mantissa * 10f64.powi(self.exp10 as i32)
    }
}

impl std::fmt::Display for HighPrecision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}.{}e{}",
            &self.digits[..1],
            &self.digits[1..],
            self.exp10
        )
    }
}

// 3.14159... to 50 decimal places, scaled by 10^50.
const PI_DIGITS: &str = "314159265358979323846264338327950288419716939937510582097494";
const PI_SCALE: u32 = (PI_DIGITS.len() - 1) as u32;

/// Independent evaluation of the closed form with big-integer fixed-point
/// arithmetic: exact rational powers, a 50-digit rational for pi and an
/// integer square root carried to `digits + 10` guard digits.
pub fn tutte_exact_reference(n: u64, digits: usize) -> HighPrecision {
    assert!(n >= 1 && digits >= 1 && digits <= 40);
    let big = |v: i64| BigInt::from(v);
    let ten = big(10);
    let pi_num: BigInt = PI_DIGITS.parse().expect("constant");
    let pi_den = ten.pow(PI_SCALE);
    // X = 6 pi n^5, as a ratio of big integers
    let n5 = big(n as i64).pow(5);
    let x_num = big(6) * &pi_num * n5;
    let x_den = pi_den;
    // sqrt(X) = isqrt(x_num * x_den * 10^(2g)) / (x_den * 10^g)
    let guard = (digits + 10) as u32;
    let s = (&x_num * &x_den) * ten.pow(2 * guard);
    let root = s.sqrt();
    let sqrt_den = &x_den * ten.pow(guard);
    // Z = 3 * 256^(n-2) / (16 * 27^(n-2) * sqrt(X))
    let exp = (n as i64 - 2).unsigned_abs() as u32;
    let (pow_num, pow_den) = if n >= 2 {
        (big(256).pow(exp), big(27).pow(exp))
    } else {
        (big(27).pow(exp), big(256).pow(exp))
    };
    let z = BigRational::new(big(3) * pow_num * sqrt_den, big(16) * pow_den * root);
    to_scientific(&z, digits)
}

/// Decimal expansion of a positive rational, truncated to `digits`
/// significant digits.
fn to_scientific(value: &BigRational, digits: usize) -> HighPrecision {
    assert!(value.is_positive(), "value must be positive");
    let ten = BigInt::from(10);
    // exponent = number of integer digits - 1 (may be negative)
    let mut exp10: i64 = 0;
    let mut num = value.numer().clone();
    let mut den = value.denom().clone();
    while num < den {
        num *= &ten;
        exp10 -= 1;
    }
    while &num / &den >= ten {
        den *= &ten;
        exp10 += 1;
    }
    // now 1 <= num/den < 10; extract the digits
    let mut out = String::with_capacity(digits);
    for _ in 0..digits {
        let d: BigInt = &num / &den;
        out.push_str(&d.to_string());
        num = (num - d * &den) * &ten;
    }
    if out.is_empty() {
        out.push('0');
    }
    HighPrecision {
        digits: out,
        exp10,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ratio_tends_to_log_256_27() {
        let target = (256f64 / 27.0).ln();
        let est = tutte_asymptotic(1_000_000);
        assert!((est.log_z / 1_000_000.0 - target).abs() < 1e-4);
    }

    #[test]
    fn ratio_approaches_256_27() {
        // Z_{n+1}/Z_n = (256/27) (n/(n+1))^{5/2}
        let a = tutte_asymptotic(1000);
        let b = tutte_asymptotic(1001);
        let ratio = (b.log_z - a.log_z).exp();
        assert!((ratio * 27.0 / 256.0 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn float_route_matches_big_integer_route_to_12_digits() {
        for n in [10u64, 100, 1000] {
            let float_z = tutte_asymptotic(n).z;
            let exact = tutte_exact_reference(n, 16);
            let rel = (float_z - exact.to_f64()).abs() / exact.to_f64();
            assert!(rel < 1e-12, "n={n}: rel error {rel}");
        }
    }

    #[test]
    fn degenerate_n3_is_defined() {
        let est = tutte_asymptotic(3);
        assert!(est.z.is_finite() && est.z > 0.0);
        let exact = tutte_exact_reference(3, 12);
        let rel = (est.z - exact.to_f64()).abs() / exact.to_f64();
        assert!(rel < 1e-12);
    }

    #[test]
    fn large_n_stays_finite_in_log_space() {
        let est = tutte_asymptotic(1_000_000_000);
        assert!(est.log_z.is_finite());
        assert!(est.z.is_infinite());
    }
}
