//! Dense univariate polynomials over `BigRational`, with exact evaluation,
//! shifting, division, and Sturm-chain root isolation.
//!
//! Invariant: the coefficient vector is ascending in degree and its last
//! entry is nonzero; the zero polynomial is the empty vector.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::binomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    pub fn constant_int(c: i64) -> Self {
        QPoly::constant(BigRational::from(BigInt::from(c)))
    }

    /// The identity polynomial `t`.
    pub fn var() -> Self {
        QPoly::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn monomial(c: BigRational, degree: usize) -> Self {
        if c.is_zero() {
            return QPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        QPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn neg(&self) -> Self {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        QPoly::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return QPoly::zero();
        }
        QPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_int(&self, x: &BigInt) -> BigRational {
        self.eval(&BigRational::from(x.clone()))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from(BigInt::from(k)))
            .collect();
        QPoly::new(coeffs)
    }

    /// Composition with `t + 1`: returns `p(t + 1)`.
    pub fn shift_one(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![BigRational::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (k, slot) in out.iter_mut().enumerate().take(j + 1) {
                let b = binomial(&BigInt::from(j), k as u64);
                *slot += c * BigRational::from(b);
            }
        }
        QPoly::new(out)
    }

    /// Substitution of an affine argument: `p(a*t + b)`, by Horner.
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Self {
        let lin = QPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&QPoly::constant(c.clone()));
        }
        acc
    }

    /// Exact long division: `self = q * div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dlead = div.leading().unwrap().clone();
        let ddeg = div.degree().unwrap();
        let mut rem = self.clone();
        let mut q =
            vec![BigRational::zero(); self.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        while let Some(rdeg) = rem.degree() {
            if rdeg < ddeg {
                break;
            }
            let factor = rem.leading().unwrap() / &dlead;
            let shift = rdeg - ddeg;
            q[shift] = factor.clone();
            let sub = div.mul(&QPoly::monomial(factor, shift));
            rem = rem.sub(&sub);
            debug_assert!(rem.degree().is_none_or(|d| d < rdeg));
        }
        (QPoly::new(q), rem)
    }

    /// Division known to be exact; panics if a remainder survives.
    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "division was not exact");
        q
    }

    /// Positive rescaling to a primitive integer-coefficient polynomial.
    /// The sign of every value is preserved.
    fn primitive(&self) -> Self {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut gcd = BigInt::zero();
        for v in &ints {
            gcd = gcd.gcd(v);
        }
        QPoly {
            coeffs: ints.iter().map(|v| BigRational::from(v / &gcd)).collect(),
        }
    }

    fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.primitive();
        }
        a
    }

    /// Sturm chain of the squarefree part.
    pub fn sturm_chain(&self) -> Vec<QPoly> {
        assert!(!self.is_zero(), "Sturm chain of the zero polynomial");
        let deriv = self.derivative();
        let mut p0 = self.primitive();
        if !deriv.is_zero() {
            let g = self.gcd(&deriv);
            if g.degree().unwrap_or(0) >= 1 {
                p0 = p0.div_exact(&g).primitive();
            }
        }
        let mut chain = vec![p0.clone()];
        let mut p1 = p0.derivative().primitive();
        while !p1.is_zero() {
            chain.push(p1.clone());
            let (_, r) = p0.divrem(&p1);
            p0 = p1;
            p1 = r.neg().primitive();
        }
        chain
    }

    /// Integers within distance 1 of a real root of `self` inside `[lo, hi]`,
    /// sorted and deduplicated. Intended for locating integer extrema of a
    /// polynomial whose difference this is.
    pub fn integer_root_neighbors(&self, lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
        assert!(!self.is_zero(), "root isolation needs a nonzero polynomial");
        if lo > hi {
            return Vec::new();
        }
        let chain = self.sturm_chain();
        let variations = |x: &BigRational| -> usize {
            let mut count = 0;
            let mut last: Option<bool> = None;
            for p in &chain {
                let v = p.eval(x);
                if v.is_zero() {
                    continue;
                }
                let sign = v.is_positive();
                if let Some(prev) = last {
                    if prev != sign {
                        count += 1;
                    }
                }
                last = Some(sign);
            }
            count
        };
        let mut out: BTreeSet<BigInt> = BTreeSet::new();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        // Count roots on (a, b]; start just left of lo to include lo itself.
        let start = BigRational::from(lo.clone()) - &half;
        let end = BigRational::from(hi.clone());
        let mut stack = vec![(start, end)];
        while let Some((a, b)) = stack.pop() {
            let roots = variations(&a).saturating_sub(variations(&b));
            if roots == 0 {
                continue;
            }
            if &b - &a <= half {
                let mut t = a.ceil().to_integer();
                let stop = b.ceil().to_integer();
                while t <= stop {
                    if &t >= lo && &t <= hi {
                        out.insert(t.clone());
                    }
                    t += 1;
                }
                continue;
            }
            let mid = (&a + &b) / BigRational::from(BigInt::from(2));
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        out.into_iter().collect()
    }
}

/// The polynomial `C(t + shift, k)` in the variable `t`.
pub fn binomial_poly(shift: i64, k: u64) -> QPoly {
    let mut p = QPoly::constant(BigRational::one());
    for j in 0..k {
        let root = BigRational::from(BigInt::from(shift - j as i64));
        // factor (t + shift - j)
        p = p.mul(&QPoly::new(vec![root, BigRational::one()]));
    }
    let kfact = super::factorial(k);
    p.scale(&BigRational::new(BigInt::one(), kfact))
}
