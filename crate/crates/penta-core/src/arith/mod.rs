//! Exact and certified arithmetic primitives.
//!
//! Everything downstream reduces to four tools:
//!
//! - arbitrary precision integers and rationals (re-exported from the `num` family),
//! - generalized binomial coefficients over [`BigInt`],
//! - dyadic floating point numbers with directed rounding ([`Dyadic`]),
//! - certified interval arithmetic on top of them ([`CertifiedInterval`]).
//!
//! All operations here are exact or carry explicit outward rounding; nothing
//! in this module ever rounds to nearest silently.

pub mod dyadic;
pub mod interval;
pub mod poly;

pub use dyadic::{Dyadic, RoundDir};
pub use interval::{certify, Certification, CertifiedInterval, Verdict};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use poly::QPoly;

use num_traits::{One, Signed, Zero};

/// Errors from certified or domain-restricted arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by an interval containing zero")]
    IntervalContainsZero,
    #[error("square root of a possibly negative value (lower endpoint {lo})")]
    SqrtNegative { lo: String },
    #[error("logarithm of a possibly nonpositive value (lower endpoint {lo})")]
    LogNonPositive { lo: String },
    #[error("precision cap of {cap} bits reached without a conclusive comparison")]
    PrecisionExhausted { cap: u32 },
    #[error("argument outside supported domain: {0}")]
    Domain(String),
}

/// Generalized binomial coefficient `C(n, k)` for integer `n` and `k >= 0`.
///
/// Uses the falling factorial `n (n-1) ... (n-k+1) / k!`, so `C(n, k) = 0`
/// for `0 <= n < k` and `C(n, k) = (-1)^k C(k-n-1, k)` for `n < 0`.
pub fn binomial(n: &BigInt, k: u64) -> BigInt {
    let mut c = BigInt::one();
    for j in 0..k {
        c *= n - BigInt::from(j);
        if c.is_zero() {
            return c;
        }
        let d = BigInt::from(j + 1);
        debug_assert!((&c % &d).is_zero(), "binomial step must divide exactly");
        c /= d;
    }
    c
}

/// `C(n, k)` for machine-sized nonnegative arguments.
pub fn binomial_u(n: u64, k: u64) -> BigInt {
    binomial(&BigInt::from(n), k)
}

/// `k!` as a big integer.
pub fn factorial(k: u64) -> BigInt {
    let mut f = BigInt::one();
    for j in 2..=k {
        f *= BigInt::from(j);
    }
    f
}

/// Ceiling of a rational number.
pub fn ceil_rational(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// True if `q` is an integer.
pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one() || q.numer().is_zero()
}

/// Sign of a rational as -1, 0, or 1.
pub fn rational_sign(q: &BigRational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent additive oracle: Pascal's triangle, nonnegative range only.
    fn pascal(n: u64, k: u64) -> BigInt {
        let mut row = vec![BigInt::one()];
        for _ in 0..n {
            let mut next = vec![BigInt::one()];
            for j in 1..row.len() {
                next.push(&row[j - 1] + &row[j]);
            }
            next.push(BigInt::one());
            row = next;
        }
        row.get(k as usize).cloned().unwrap_or_else(BigInt::zero)
    }

    #[test]
    fn binomial_matches_pascal_oracle() {
        for n in 0..20u64 {
            for k in 0..25u64 {
                assert_eq!(binomial_u(n, k), pascal(n, k), "C({n}, {k})");
            }
        }
    }

    #[test]
    fn binomial_vanishes_below_diagonal() {
        for n in 0..8 {
            for k in (n + 1)..12 {
                assert!(binomial_u(n, k).is_zero());
            }
        }
    }

    #[test]
    fn binomial_negative_upper_argument() {
        // C(-1, k) = (-1)^k, C(-2, k) = (-1)^k (k+1).
        for k in 0..10u64 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(binomial(&BigInt::from(-1), k), BigInt::from(sign));
            assert_eq!(
                binomial(&BigInt::from(-2), k),
                BigInt::from(sign * (k as i64 + 1))
            );
        }
    }

    #[test]
    fn factorial_small_values() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(factorial(10), BigInt::from(3628800));
    }

    #[test]
    fn ceil_of_rationals() {
        let q = BigRational::new(BigInt::from(64), BigInt::from(3));
        assert_eq!(ceil_rational(&q), BigInt::from(22));
        let q = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(ceil_rational(&q), BigInt::from(-3));
        let q = BigRational::from(BigInt::from(9));
        assert_eq!(ceil_rational(&q), BigInt::from(9));
    }
}
