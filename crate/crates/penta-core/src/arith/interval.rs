//! Certified interval arithmetic over dyadic endpoints.
//!
//! A [`CertifiedInterval`] is a pair `lo <= hi` of [`Dyadic`] numbers that
//! provably encloses the real value it stands for. Ring operations compute
//! exact dyadic endpoint candidates and round them outward to the working
//! precision; `div`, `sqrt`, `ln`, `exp` and rational powers use directed
//! rounding and explicit series tail bounds, so the enclosure property is
//! preserved by construction.
//!
//! Comparisons return a three-valued [`Verdict`]; an `Inconclusive` answer
//! can be retried at doubled precision through [`certify`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dyadic::{Dyadic, RoundDir};
use super::ArithError;

/// Extra bits used internally by the elementary functions.
const GUARD_BITS: u32 = 32;

/// Outcome of a certified comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The claimed relation holds for every pair of values in the enclosures.
    Verified,
    /// The negation of the claim holds for every pair of values.
    Refuted,
    /// The enclosures overlap; the claim cannot be decided at this precision.
    Inconclusive,
}

/// Result of [`certify`]: final verdict and the precision that produced it.
#[derive(Debug, Clone, Copy)]
pub struct Certification {
    pub verdict: Verdict,
    pub precision: u32,
}

/// Retries a three-valued comparison with doubling precision up to `max_prec`.
pub fn certify<E>(
    start_prec: u32,
    max_prec: u32,
    mut attempt: impl FnMut(u32) -> Result<Verdict, E>,
) -> Result<Certification, E> {
    let mut p = start_prec.max(8);
    loop {
        let verdict = attempt(p)?;
        if verdict != Verdict::Inconclusive || p >= max_prec {
            return Ok(Certification {
                verdict,
                precision: p,
            });
        }
        p = p.saturating_mul(2).min(max_prec);
    }
}

/// A closed interval with dyadic endpoints and attached working precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedInterval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl CertifiedInterval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        CertifiedInterval { lo, hi, prec }
    }

    /// Exact singleton; no rounding is applied to the endpoint.
    pub fn singleton(value: Dyadic, prec: u32) -> Self {
        CertifiedInterval {
            lo: value.clone(),
            hi: value,
            prec,
        }
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        Self::singleton(Dyadic::from_bigint(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::singleton(Dyadic::from_i64(n), prec)
    }

    /// Tight two-sided enclosure of a rational number.
    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let lo = Dyadic::from_rational(q, prec, RoundDir::Down);
        let hi = Dyadic::from_rational(q, prec, RoundDir::Up);
        CertifiedInterval::new(lo, hi, prec)
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        assert!(den != 0);
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        Self::from_rational(&q, prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::singleton(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::singleton(Dyadic::one(), prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.lo.to_rational() <= *q && *q <= self.hi.to_rational()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Human-readable outward decimal rendering of the enclosure.
    pub fn describe(&self) -> String {
        format!(
            "[{}, {}]",
            self.lo.to_decimal_string(25, RoundDir::Down),
            self.hi.to_decimal_string(25, RoundDir::Up)
        )
    }

    fn join_prec(&self, other: &Self) -> u32 {
        self.prec.max(other.prec)
    }

    fn rounded(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        CertifiedInterval::new(
            lo.round(prec, RoundDir::Down),
            hi.round(prec, RoundDir::Up),
            prec,
        )
    }

    pub fn neg(&self) -> Self {
        CertifiedInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.join_prec(other);
        Self::rounded(self.lo.add(&other.lo), self.hi.add(&other.hi), prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.join_prec(other);
        let candidates = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = candidates.iter().min().unwrap().clone();
        let hi = candidates.iter().max().unwrap().clone();
        Self::rounded(lo, hi, prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        CertifiedInterval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
            prec: self.prec,
        }
    }

    /// Multiplicative inverse; requires the interval to exclude zero.
    pub fn recip(&self) -> Result<Self, ArithError> {
        if !self.lo.is_positive() && !self.hi.is_negative() {
            return Err(ArithError::IntervalContainsZero);
        }
        let prec = self.prec;
        let inv = |d: &Dyadic, dir: RoundDir| -> Dyadic {
            let q = d.to_rational().recip();
            Dyadic::from_rational(&q, prec, dir)
        };
        Ok(CertifiedInterval::new(
            inv(&self.hi, RoundDir::Down),
            inv(&self.lo, RoundDir::Up),
            prec,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&other.recip()?))
    }

    /// Integer power by repeated squaring; negative powers via `recip`.
    pub fn pow_int(&self, n: i64) -> Result<Self, ArithError> {
        if n < 0 {
            return self.pow_int(-n)?.recip();
        }
        let mut result = Self::one(self.prec);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// Square root; requires a certainly nonnegative interval.
    pub fn sqrt(&self) -> Result<Self, ArithError> {
        if self.lo.is_negative() {
            return Err(ArithError::SqrtNegative {
                lo: self.lo.to_decimal_string(12, RoundDir::Down),
            });
        }
        Ok(CertifiedInterval::new(
            sqrt_dyadic(&self.lo, self.prec, RoundDir::Down),
            sqrt_dyadic(&self.hi, self.prec, RoundDir::Up),
            self.prec,
        ))
    }

    /// Natural logarithm; requires a certainly positive interval.
    pub fn ln(&self) -> Result<Self, ArithError> {
        if !self.lo.is_positive() {
            return Err(ArithError::LogNonPositive {
                lo: self.lo.to_decimal_string(12, RoundDir::Down),
            });
        }
        let wp = self.prec + GUARD_BITS;
        let lo = ln_point(&self.lo, wp);
        let hi = ln_point(&self.hi, wp);
        Ok(Self::rounded(lo.lo, hi.hi, self.prec))
    }

    /// Exponential function (total).
    pub fn exp(&self) -> Self {
        let wp = self.prec + GUARD_BITS;
        let lo = exp_point(&self.lo, wp);
        let hi = exp_point(&self.hi, wp);
        Self::rounded(lo.lo, hi.hi, self.prec)
    }

    /// Rational power `x^(num/den)` for a nonnegative base.
    ///
    /// Denominators 1, 2 and 4 stay in the square root chain and never touch
    /// `exp`/`ln`; other denominators go through `exp((num/den) ln x)`.
    pub fn pow_ratio(&self, num: i64, den: u32) -> Result<Self, ArithError> {
        assert!(den > 0);
        match den {
            1 => self.pow_int(num),
            2 => self.sqrt()?.pow_int(num),
            4 => self.sqrt()?.sqrt()?.pow_int(num),
            _ => {
                let exponent = Self::from_ratio(num, i64::from(den), self.prec);
                Ok(self.ln()?.mul(&exponent).exp())
            }
        }
    }

    /// Verdict for the claim `self < other`.
    pub fn verdict_lt(&self, other: &Self) -> Verdict {
        if self.hi < other.lo {
            Verdict::Verified
        } else if other.hi <= self.lo {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        }
    }

    /// Verdict for the claim `self <= other`.
    pub fn verdict_le(&self, other: &Self) -> Verdict {
        if self.hi <= other.lo {
            Verdict::Verified
        } else if other.hi < self.lo {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.verdict_lt(other) == Verdict::Verified
    }

    pub fn certainly_le(&self, other: &Self) -> bool {
        self.verdict_le(other) == Verdict::Verified
    }
}

/// Directed dyadic square root of a nonnegative dyadic.
fn sqrt_dyadic(x: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return Dyadic::zero();
    }
    let m = x.mantissa().clone();
    let e = x.exponent();
    // Shift so the mantissa carries at least 2(prec+2) bits and the exponent is even.
    let mut t = (2 * (i64::from(prec) + 2) - m.bits() as i64).max(0);
    if (e - t) % 2 != 0 {
        t += 1;
    }
    let m2: BigInt = m << t as u64;
    let e2 = (e - t) / 2;
    let r = m2.sqrt();
    let r = match dir {
        RoundDir::Down => r,
        RoundDir::Up => {
            if &r * &r == m2 {
                r
            } else {
                r + BigInt::one()
            }
        }
    };
    Dyadic::new(r, e2).round(prec, dir)
}

/// Enclosure of `atanh(u)` as a power series, for `0 <= u <= 0.35`.
fn atanh_series(u: &CertifiedInterval, wp: u32) -> CertifiedInterval {
    debug_assert!(!u.lo().is_negative());
    debug_assert!(
        u.hi().to_rational() < BigRational::new(BigInt::from(35), BigInt::from(100)),
        "series argument out of range"
    );
    let usq = u.mul(u);
    let mut sum = u.clone();
    let mut power = u.clone();
    let mut n: i64 = 1;
    loop {
        power = power.mul(&usq);
        let contribution = power.mul(&CertifiedInterval::from_ratio(1, 2 * n + 1, wp));
        sum = sum.add(&contribution);
        n += 1;
        let bound = &contribution.hi;
        if bound.is_zero() || bound.floor_log2_abs() < -(i64::from(wp) + 8) {
            // Remaining tail is a geometric series with ratio u^2 < 1/8:
            // bounded by the last contribution itself.
            let tail = CertifiedInterval::new(Dyadic::zero(), bound.clone(), wp);
            return sum.add(&tail);
        }
    }
}

/// Enclosure of ln 2 = 2 atanh(1/3).
fn ln2(wp: u32) -> CertifiedInterval {
    let third = CertifiedInterval::from_ratio(1, 3, wp);
    atanh_series(&third, wp).mul_pow2(1)
}

/// Enclosure of `ln x` for a positive dyadic point.
fn ln_point(x: &Dyadic, wp: u32) -> CertifiedInterval {
    debug_assert!(x.is_positive());
    let bl = x.mantissa().bits() as i64;
    // x = t * 2^k with t = m / 2^(bl-1) in [1, 2).
    let k = x.exponent() + bl - 1;
    let half_pow: BigInt = BigInt::one() << (bl - 1) as u64;
    let num = x.mantissa() - &half_pow;
    let den = x.mantissa() + &half_pow;
    // u = (t-1)/(t+1) in [0, 1/3).
    let u = if num.is_zero() {
        CertifiedInterval::zero(wp)
    } else {
        let q = BigRational::new(num, den);
        CertifiedInterval::from_rational(&q, wp)
    };
    let ln_t = atanh_series(&u, wp).mul_pow2(1);
    let k_term = ln2(wp).mul(&CertifiedInterval::from_i64(k, wp));
    ln_t.add(&k_term)
}

/// Enclosure of `exp x` for a dyadic point.
fn exp_point(x: &Dyadic, wp: u32) -> CertifiedInterval {
    if x.is_zero() {
        return CertifiedInterval::one(wp);
    }
    let ln2_iv = ln2(wp);
    // Argument reduction: x = v + k ln 2 with |v| <= 3/4.
    let mut k = (x.to_f64_approx() / std::f64::consts::LN_2).round() as i64;
    let x_iv = CertifiedInterval::singleton(x.clone(), wp);
    let three_quarters = Dyadic::new(BigInt::from(3), -2);
    let mut v = x_iv.sub(&ln2_iv.mul(&CertifiedInterval::from_i64(k, wp)));
    for _ in 0..128 {
        if v.hi() > &three_quarters {
            k += 1;
        } else if v.lo() < &three_quarters.neg() {
            k -= 1;
        } else {
            break;
        }
        v = x_iv.sub(&ln2_iv.mul(&CertifiedInterval::from_i64(k, wp)));
    }
    assert!(
        v.hi() <= &three_quarters && v.lo() >= &three_quarters.neg(),
        "argument reduction failed"
    );
    // exp v = sum v^n / n! with factorial-dominated tail.
    let mut sum = CertifiedInterval::one(wp).add(&v);
    let mut term = v.clone();
    let mut n: i64 = 1;
    loop {
        n += 1;
        term = term.mul(&v).mul(&CertifiedInterval::from_ratio(1, n, wp));
        sum = sum.add(&term);
        let bound = term.lo().abs().max(term.hi().abs());
        if bound.is_zero() || bound.floor_log2_abs() < -(i64::from(wp) + 8) {
            // |v|/(n+1) < 1/2 from here on, so the tail is below the last term.
            let tail = CertifiedInterval::new(bound.neg(), bound, wp);
            sum = sum.add(&tail);
            break;
        }
    }
    sum.mul_pow2(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn approx(iv: &CertifiedInterval) -> f64 {
        iv.lo().to_f64_approx()
    }

    fn assert_encloses(iv: &CertifiedInterval, value: f64, label: &str) {
        let lo = iv.lo().to_f64_approx();
        let hi = iv.hi().to_f64_approx();
        let eps = 1e-9 * (1.0 + value.abs());
        assert!(
            lo - eps <= value && value <= hi + eps,
            "{label}: [{lo}, {hi}] should contain {value}"
        );
        assert!(hi - lo < eps, "{label}: enclosure too wide: {}", hi - lo);
    }

    #[test]
    fn ring_ops_enclose() {
        let a = CertifiedInterval::from_ratio(1, 3, P);
        let b = CertifiedInterval::from_ratio(-2, 7, P);
        assert_encloses(&a.add(&b), 1.0 / 3.0 - 2.0 / 7.0, "add");
        assert_encloses(&a.sub(&b), 1.0 / 3.0 + 2.0 / 7.0, "sub");
        assert_encloses(&a.mul(&b), -2.0 / 21.0, "mul");
        assert_encloses(&a.div(&b).unwrap(), (1.0 / 3.0) / (-2.0 / 7.0), "div");
    }

    #[test]
    fn division_by_zero_interval_fails() {
        let a = CertifiedInterval::from_ratio(1, 3, P);
        let z = CertifiedInterval::new(Dyadic::from_i64(-1), Dyadic::from_i64(1), P);
        assert_eq!(a.div(&z), Err(ArithError::IntervalContainsZero));
    }

    #[test]
    fn sqrt_encloses_and_respects_domain() {
        let two = CertifiedInterval::from_i64(2, P);
        assert_encloses(&two.sqrt().unwrap(), std::f64::consts::SQRT_2, "sqrt 2");
        let exact = CertifiedInterval::from_i64(144, P).sqrt().unwrap();
        assert_eq!(exact.lo(), exact.hi());
        assert_eq!(
            exact.lo().to_rational(),
            BigRational::from(BigInt::from(12))
        );
        let neg = CertifiedInterval::from_i64(-1, P);
        assert!(neg.sqrt().is_err());
    }

    #[test]
    fn sqrt_respects_monotone_squaring() {
        // Enclosure check without floats: lo^2 <= n <= hi^2.
        for n in [2i64, 3, 5, 6359, 40436881] {
            let iv = CertifiedInterval::from_i64(n, 192).sqrt().unwrap();
            let n_rat = BigRational::from(BigInt::from(n));
            let lo2 = iv.lo().to_rational().pow(2);
            let hi2 = iv.hi().to_rational().pow(2);
            assert!(lo2 <= n_rat && n_rat <= hi2, "sqrt({n})");
        }
    }

    #[test]
    fn ln_and_exp_against_f64() {
        for v in [2i64, 3, 10, 6359] {
            let iv = CertifiedInterval::from_i64(v, P).ln().unwrap();
            assert_encloses(&iv, (v as f64).ln(), "ln");
        }
        for (num, den) in [(1i64, 2i64), (-3, 2), (5, 1), (0, 1)] {
            let x = CertifiedInterval::from_ratio(num, den, P);
            let iv = x.exp();
            assert_encloses(&iv, (num as f64 / den as f64).exp(), "exp");
        }
        assert!(CertifiedInterval::zero(P).ln().is_err());
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = CertifiedInterval::from_i64(7, P);
        let rt = x.ln().unwrap().exp();
        assert!(rt.contains_rational(&BigRational::from(BigInt::from(7))));
        assert!((approx(&rt) - 7.0).abs() < 1e-9);
    }

    #[test]
    fn integer_and_rational_powers() {
        let x = CertifiedInterval::from_ratio(3, 2, P);
        assert_encloses(&x.pow_int(5).unwrap(), 7.59375, "pow 5");
        assert_encloses(&x.pow_int(-2).unwrap(), 4.0 / 9.0, "pow -2");
        let m = CertifiedInterval::from_i64(6359, P);
        // 6359^(3/2) through the square root chain.
        let p32 = m.pow_ratio(3, 2).unwrap();
        assert_encloses(&p32, 6359f64.powf(1.5), "pow 3/2");
        // (2*6359)^(-3/4) through the double square root chain.
        let p34 = m.mul_pow2(1).pow_ratio(-3, 4).unwrap();
        assert_encloses(&p34, (2.0 * 6359.0f64).powf(-0.75), "pow -3/4");
        // General denominator goes through exp/ln.
        let p15 = m.pow_ratio(1, 5).unwrap();
        assert_encloses(&p15, 6359f64.powf(0.2), "pow 1/5");
    }

    #[test]
    fn verdicts_and_certify() {
        let a = CertifiedInterval::from_ratio(1, 3, P);
        let b = CertifiedInterval::from_ratio(1, 2, P);
        assert_eq!(a.verdict_lt(&b), Verdict::Verified);
        assert_eq!(b.verdict_lt(&a), Verdict::Refuted);
        let wide = CertifiedInterval::new(Dyadic::from_i64(0), Dyadic::from_i64(1), P);
        assert_eq!(wide.verdict_lt(&a), Verdict::Inconclusive);

        // The certify loop must refine a comparison that fails at low precision:
        // 1/3 < 0.33334 is inconclusive at 8 bits, decidable at higher precision.
        let outcome = certify(8, 1024, |p| {
            let lhs = CertifiedInterval::from_ratio(1, 3, p);
            let rhs = CertifiedInterval::from_ratio(33334, 100000, p);
            Ok::<_, ArithError>(lhs.verdict_lt(&rhs))
        })
        .unwrap();
        assert_eq!(outcome.verdict, Verdict::Verified);
        assert!(outcome.precision > 8);
    }

    #[test]
    fn certify_reports_inconclusive_at_cap() {
        // Comparing a value against itself can never be decided strictly.
        let outcome = certify(8, 64, |p| {
            let x = CertifiedInterval::from_ratio(1, 3, p);
            let y = CertifiedInterval::from_ratio(1, 3, p);
            Ok::<_, ArithError>(x.verdict_lt(&y))
        })
        .unwrap();
        assert_eq!(outcome.verdict, Verdict::Inconclusive);
        assert_eq!(outcome.precision, 64);
    }

    #[test]
    fn widths_shrink_with_precision() {
        let mut last_width = f64::INFINITY;
        for p in [32u32, 64, 128, 256] {
            let iv = CertifiedInterval::from_i64(2, p).sqrt().unwrap();
            let w = iv.width().to_f64_approx();
            assert!(w < last_width || w == 0.0);
            last_width = w;
        }
        assert!(last_width < 1e-70);
    }
}
