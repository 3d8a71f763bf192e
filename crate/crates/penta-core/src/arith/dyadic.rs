//! Dyadic floating point numbers `mant * 2^exp` with directed rounding.
//!
//! Invariants:
//! - `mant` is odd or zero; zero is stored canonically as `(0, 0)`.
//! - all arithmetic (`add`, `sub`, `mul`) is exact; precision is only lost
//!   through an explicit [`Dyadic::round`] call with a stated direction.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction: toward minus or plus infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundDir {
    Down,
    Up,
}

impl RoundDir {
    pub fn flip(self) -> Self {
        match self {
            RoundDir::Down => RoundDir::Up,
            RoundDir::Up => RoundDir::Down,
        }
    }
}

/// Arbitrary precision dyadic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    /// Builds `mant * 2^exp`, normalizing to an odd (or zero) mantissa.
    pub fn new(mant: BigInt, exp: i64) -> Self {
        if mant.is_zero() {
            return Dyadic { mant, exp: 0 };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic {
                mant: mant >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Dyadic::new(BigInt::one(), 0)
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dyadic::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mant.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    /// Number of significant bits of the mantissa (0 for zero).
    pub fn precision_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`: the magnitude lies in `[2^k, 2^(k+1))`.
    pub fn floor_log2_abs(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.mant.bits() as i64 + self.exp - 1
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: if self.mant.is_zero() { 0 } else { self.exp },
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Exact sum.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << u64::try_from(self.exp - e).expect("exponent gap");
        let b = &other.mant << u64::try_from(other.exp - e).expect("exponent gap");
        Dyadic::new(a + b, e)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Rounds to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u32, dir: RoundDir) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= u64::from(prec.max(1)) {
            return self.clone();
        }
        let drop = bits - u64::from(prec.max(1));
        let pow = BigInt::one() << drop;
        let q = match dir {
            RoundDir::Down => self.mant.div_floor(&pow),
            RoundDir::Up => Integer::div_ceil(&self.mant, &pow),
        };
        Dyadic::new(q, self.exp + drop as i64)
    }

    /// Directed conversion from a rational `num / den` (requires `den > 0`).
    ///
    /// The result `r` satisfies `r <= num/den` for [`RoundDir::Down`] and
    /// `r >= num/den` for [`RoundDir::Up`], with about `prec` mantissa bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32, dir: RoundDir) -> Dyadic {
        assert!(den.is_positive(), "denominator must be positive");
        if num.is_zero() {
            return Dyadic::zero();
        }
        let shift = i64::from(prec) + 2 + den.bits() as i64 - num.bits() as i64;
        let (n2, d2) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let q = match dir {
            RoundDir::Down => n2.div_floor(&d2),
            RoundDir::Up => Integer::div_ceil(&n2, &d2),
        };
        Dyadic::new(q, -shift).round(prec, dir)
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: RoundDir) -> Dyadic {
        Dyadic::from_ratio(q.numer(), q.denom(), prec, dir)
    }

    /// Exact conversion to a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Lossy conversion for display and coarse estimates only.
    pub fn to_f64_approx(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 62 {
            let drop = bits - 62;
            (
                (&self.mant >> drop).to_i64().unwrap_or(0),
                self.exp + drop as i64,
            )
        } else {
            (self.mant.to_i64().unwrap_or(0), self.exp)
        };
        (m as f64) * (e as f64).exp2()
    }

    /// Decimal string with `digits` significant digits, rounded in `dir`
    /// so the printed value still bounds the true one from the stated side.
    pub fn to_decimal_string(&self, digits: u32, dir: RoundDir) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1) as i64;
        // |x| ~ 10^dec_mag; scale so that x * 10^(digits - 1 - dec_mag) is an integer range.
        let log2 = self.floor_log2_abs();
        let dec_mag = (log2 as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let scale = digits - 1 - dec_mag;
        let q = self.to_rational();
        let ten = BigInt::from(10);
        let scaled = if scale >= 0 {
            q * BigRational::from(ten.pow(scale as u32))
        } else {
            q / BigRational::from(ten.pow((-scale) as u32))
        };
        let int = match dir {
            RoundDir::Down => scaled.floor().to_integer(),
            RoundDir::Up => scaled.ceil().to_integer(),
        };
        if scale <= 0 {
            format!("{}e{}", int, -scale)
        } else {
            let neg = int.is_negative();
            let digits_str = int.abs().to_string();
            let scale = scale as usize;
            let body = if digits_str.len() > scale {
                let split = digits_str.len() - scale;
                format!("{}.{}", &digits_str[..split], &digits_str[split..])
            } else {
                format!("0.{}{}", "0".repeat(scale - digits_str.len()), digits_str)
            };
            let trimmed = body.trim_end_matches('0').trim_end_matches('.').to_string();
            let body = if trimmed.is_empty() {
                "0".to_string()
            } else {
                trimmed
            };
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
    }

    fn cmp_abs(&self, other: &Dyadic) -> Ordering {
        debug_assert!(!self.is_zero() && !other.is_zero());
        let la = self.mant.bits() as i64 + self.exp;
        let lb = other.mant.bits() as i64 + other.exp;
        if la != lb {
            return la.cmp(&lb);
        }
        // Same magnitude window: exponent gap is bounded by the bit lengths.
        let e = self.exp.min(other.exp);
        let a = self.mant.magnitude() << (self.exp - e) as u64;
        let b = other.mant.magnitude() << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.sign(), other.sign()) {
            (Sign::Minus, Sign::Minus) => other.cmp_abs(self),
            (Sign::Plus, Sign::Plus) => self.cmp_abs(other),
            (a, b) => {
                let rank = |s: Sign| match s {
                    Sign::Minus => -1,
                    Sign::NoSign => 0,
                    Sign::Plus => 1,
                };
                rank(a).cmp(&rank(b))
            }
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.mant)
        } else if self.precision_bits() <= 64 && self.exp > -64 && self.exp < 64 {
            // Small enough to show exactly in decimal.
            let q = self.to_rational();
            if q.denom().is_one() {
                write!(f, "{}", q.numer())
            } else {
                write!(f, "{}", self.to_decimal_string(24, RoundDir::Down))
            }
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn normalization_strips_twos() {
        let x = d(24, 0);
        assert_eq!(x.mantissa(), &BigInt::from(3));
        assert_eq!(x.exponent(), 3);
        assert!(d(0, 17).is_zero());
        assert_eq!(d(0, 17).exponent(), 0);
    }

    #[test]
    fn exact_ring_ops_match_rationals() {
        let cases = [d(3, -2), d(-7, 1), d(1, -10), d(5, 3), Dyadic::zero()];
        for a in &cases {
            for b in &cases {
                assert_eq!(a.add(b).to_rational(), a.to_rational() + b.to_rational());
                assert_eq!(a.sub(b).to_rational(), a.to_rational() - b.to_rational());
                assert_eq!(a.mul(b).to_rational(), a.to_rational() * b.to_rational());
            }
        }
    }

    #[test]
    fn ordering_matches_rationals() {
        let cases = [
            d(3, -2),
            d(-7, 1),
            d(1, -10),
            d(5, 3),
            Dyadic::zero(),
            d(-1, -40),
        ];
        for a in &cases {
            for b in &cases {
                assert_eq!(
                    a.cmp(b),
                    a.to_rational().cmp(&b.to_rational()),
                    "{a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn directed_rounding_brackets_value() {
        let x = Dyadic::new(BigInt::from(0xdead_beef_u64), -13);
        for prec in [4u32, 8, 16, 24] {
            let lo = x.round(prec, RoundDir::Down);
            let hi = x.round(prec, RoundDir::Up);
            assert!(lo <= x && x <= hi);
            assert!(lo.precision_bits() <= u64::from(prec));
            assert!(hi.precision_bits() <= u64::from(prec) + 1);
        }
    }

    #[test]
    fn from_ratio_brackets_value() {
        let num = BigInt::from(1);
        let den = BigInt::from(3);
        let q = BigRational::new(num.clone(), den.clone());
        for prec in [8u32, 32, 128] {
            let lo = Dyadic::from_ratio(&num, &den, prec, RoundDir::Down);
            let hi = Dyadic::from_ratio(&num, &den, prec, RoundDir::Up);
            assert!(lo.to_rational() <= q && q <= hi.to_rational());
            assert!(lo < hi, "1/3 is not dyadic, bounds must be strict");
            // Gap shrinks like 2^-prec relative to the value.
            let gap = hi.sub(&lo);
            assert!(gap.floor_log2_abs() < -(i64::from(prec)));
        }
    }

    #[test]
    fn negative_rounding_directions() {
        let num = BigInt::from(-1);
        let den = BigInt::from(3);
        let lo = Dyadic::from_ratio(&num, &den, 16, RoundDir::Down);
        let hi = Dyadic::from_ratio(&num, &den, 16, RoundDir::Up);
        let q = BigRational::new(num, den);
        assert!(lo.to_rational() <= q && q <= hi.to_rational());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(d(1, -1).to_decimal_string(6, RoundDir::Down), "0.5");
        assert_eq!(d(3, 2).to_decimal_string(6, RoundDir::Down), "12");
        let third_lo = Dyadic::from_ratio(&BigInt::from(1), &BigInt::from(3), 64, RoundDir::Down);
        let s = third_lo.to_decimal_string(6, RoundDir::Down);
        assert!(s.starts_with("0.3333"), "{s}");
    }
}
