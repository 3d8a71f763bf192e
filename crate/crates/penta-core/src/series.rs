//! The truncated generating series family behind the coefficient table.
//!
//! The family starts at `F_0 = 1`. One application of the step operator at
//! level `i` sends `F` to `(1-x)^{-1} F - x^i - x^{i+1}`; the table value
//! `m_i` is the coefficient of `x^i` in `F_i`, and `F_{i+1}` applies the step
//! `m_i` times at level `i`. Iterating the step has the closed form
//!
//! `F_{i+1} = (1-x)^{-m} F_i + ((1-x)^{-m} - 1) (x^{i+1} - x^{i-1})`,
//!
//! which is what [`TruncatedSeries::advance`] implements (the `i = 0` case
//! shifts through `x^{-1}` soundly because `(1-x)^{-m} - 1` has no constant
//! term). Row extraction reads `m_{i,j}` as the coefficient of `x^{i+j}`.
//!
//! Coefficients are exact `BigInt`s; every series carries a hard truncation
//! order and panics on reads beyond it rather than inventing zeros.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::poly::{binomial_poly, QPoly};
use crate::arith::{binomial, BigRational};

/// A power series known exactly up to and including `x^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        TruncatedSeries { coeffs }
    }

    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); order + 1];
        coeffs[0] = BigInt::one();
        TruncatedSeries { coeffs }
    }

    /// Highest exponent with a known coefficient.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^n`; panics past the truncation order.
    pub fn coeff(&self, n: usize) -> &BigInt {
        assert!(
            n <= self.order(),
            "coefficient {n} beyond truncation order {}",
            self.order()
        );
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Multiplication by `(1-x)^{-m}` for `m >= 0`, truncated to this order.
    pub fn mul_inv_one_minus_x_pow(&self, m: &BigInt) -> Self {
        assert!(!m.is_negative());
        let weights = inv_pow_weights(m, self.order());
        let n = self.coeffs.len();
        let mut out = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, w) in weights.iter().take(n - i).enumerate() {
                out[i + j] += c * w;
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// One step at level `i`: `(1-x)^{-1} self - x^i - x^{i+1}`.
    pub fn delta(&self, i: usize) -> Self {
        assert!(
            self.order() > i + 1,
            "order too small for a step at level {i}"
        );
        let mut out = self.mul_inv_one_minus_x_pow(&BigInt::one());
        out.coeffs[i] -= 1;
        out.coeffs[i + 1] -= 1;
        out
    }

    /// `m`-fold step at level `i` in closed form.
    pub fn advance(&self, i: usize, m: &BigInt) -> Self {
        assert!(!m.is_negative());
        assert!(
            self.order() > i + 1,
            "order too small for a step at level {i}"
        );
        if m.is_zero() {
            return self.clone();
        }
        let mut out = self.mul_inv_one_minus_x_pow(m);
        // g = (1-x)^{-m} - 1 has zero constant term; add g*x^{i+1} - g*x^{i-1}.
        // The downward shift by x^{i-1} reads one weight past the order.
        let mut g = inv_pow_weights(m, self.order() + 1);
        g[0] = BigInt::zero();
        let n = out.coeffs.len();
        for (j, w) in g.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            if i + 1 + j < n {
                out.coeffs[i + 1 + j] += w;
            }
            // Subtract the shift by i-1; for i = 0 this lands at j-1, which
            // is in range because g has no constant term.
            let target = i + j;
            if i == 0 {
                if j >= 1 && target - 1 < n {
                    out.coeffs[target - 1] -= w;
                }
            } else if target - 1 < n {
                out.coeffs[target - 1] -= w;
            }
        }
        out
    }
}

/// Coefficients of `(1-x)^{-m}` up to `x^order`: `C(m-1+n, n)`.
fn inv_pow_weights(m: &BigInt, order: usize) -> Vec<BigInt> {
    let mut w = Vec::with_capacity(order + 1);
    let mut acc = BigInt::one();
    w.push(acc.clone());
    // Incremental: w_{n+1} = w_n * (m + n) / (n + 1).
    for n in 0..order {
        acc *= m + BigInt::from(n);
        let den = BigInt::from(n + 1);
        debug_assert!((&acc % &den).is_zero());
        acc /= den;
        w.push(acc.clone());
    }
    w
}

/// The generated family `F_0, ..., F_imax` with extracted table values.
#[derive(Debug, Clone)]
pub struct SeriesFamily {
    order: usize,
    series: Vec<TruncatedSeries>,
    m: Vec<BigInt>,
}

impl SeriesFamily {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn i_max(&self) -> usize {
        self.series.len() - 1
    }

    pub fn series(&self, i: usize) -> &TruncatedSeries {
        &self.series[i]
    }

    /// Table value `m_i`, read off as a series coefficient.
    pub fn m(&self, i: usize) -> &BigInt {
        &self.m[i]
    }

    pub fn m_values(&self) -> &[BigInt] {
        &self.m
    }

    /// Row `m_{i,0..=j_max}` read off as series coefficients.
    pub fn row(&self, i: usize, j_max: usize) -> Vec<BigInt> {
        (0..=j_max)
            .map(|j| self.series[i].coeff(i + j).clone())
            .collect()
    }
}

/// Generates the family up to `F_imax`, all truncated at `x^order`.
///
/// Requires `order >= i_max + 2` so every step stays inside the truncation.
pub fn generate(i_max: usize, order: usize) -> SeriesFamily {
    assert!(order >= i_max + 2, "order must exceed i_max + 1");
    let mut series = vec![TruncatedSeries::one(order)];
    let mut m = Vec::new();
    for i in 0..=i_max {
        let current = series.last().unwrap();
        // Everything below x^i has telescoped away; check, then read m_i.
        for n in 0..i {
            assert!(
                current.coeff(n).is_zero(),
                "series {i} must vanish below x^{i}"
            );
        }
        let mi = current.coeff(i).clone();
        assert!(!mi.is_negative(), "table values stay nonnegative");
        if i < i_max {
            let next = current.advance(i, &mi);
            series.push(next);
        }
        m.push(mi);
    }
    SeriesFamily { order, series, m }
}

/// Coefficients `a_{i,1..=K}` of the decomposition
/// `F_i = x^i (-1 + sum_k a_{i,k} (1-x)^{-k})` with `K = m_0 + ... + m_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisDecomposition {
    pub i: usize,
    /// `coeffs[k-1]` is the weight of `(1-x)^{-k}`.
    pub coeffs: Vec<BigInt>,
}

impl BasisDecomposition {
    pub fn basis_size(&self) -> usize {
        self.coeffs.len()
    }

    /// Sum of the coefficients; equals `m_i + 1` for a valid decomposition.
    pub fn coeff_sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Checks nonnegativity and re-expands the decomposition against the
    /// series coefficients of `family` over the whole available window.
    pub fn check_against(&self, family: &SeriesFamily) -> bool {
        if self.coeffs.iter().any(Signed::is_negative) {
            return false;
        }
        let f = family.series(self.i);
        let window = family.order() - self.i;
        for n in 0..=window {
            // [x^n] of (-1 + sum_k a_k (1-x)^{-k}); the binomial
            // C(n+k-1, k-1) advances by the exact ratio (n+k-1)/(k-1).
            let mut acc = BigInt::zero();
            let mut c = BigInt::one();
            for (k0, a) in self.coeffs.iter().enumerate() {
                if k0 > 0 {
                    c *= BigInt::from(n as u64) + BigInt::from(k0 as u64);
                    let den = BigInt::from(k0 as u64);
                    debug_assert!((&c % &den).is_zero());
                    c /= den;
                }
                if !a.is_zero() {
                    acc += a * &c;
                }
            }
            if n == 0 {
                acc -= 1;
            }
            if &acc != f.coeff(self.i + n) {
                return false;
            }
        }
        true
    }

    /// The polynomial `f_i(t) = sum_k a_{i,k} C(t + k - 1, k - 1)`, which
    /// interpolates the table row: `f_i(j) = m_{i,j}` for `j >= 1`.
    pub fn interpolating_polynomial(&self) -> InterpolatingPolynomial {
        InterpolatingPolynomial {
            i: self.i,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// Row interpolator in the binomial basis; exact at integers.
#[derive(Debug, Clone)]
pub struct InterpolatingPolynomial {
    pub i: usize,
    coeffs: Vec<BigInt>,
}

impl InterpolatingPolynomial {
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Exact at integers `t >= 0`; the binomial `C(t+k-1, k-1)` advances by
    /// the exact ratio `(t+k-1)/(k-1)` so the whole sum is linear in the
    /// basis size.
    pub fn eval(&self, t: &BigInt) -> BigInt {
        assert!(!t.is_negative(), "row interpolation is evaluated at t >= 0");
        let mut acc = BigInt::zero();
        let mut c = BigInt::one();
        for (k0, a) in self.coeffs.iter().enumerate() {
            if k0 > 0 {
                c *= t + BigInt::from(k0 as u64);
                let den = BigInt::from(k0 as u64);
                debug_assert!((&c % &den).is_zero());
                c /= den;
            }
            if !a.is_zero() {
                acc += a * &c;
            }
        }
        acc
    }

    /// Expansion into monomial coefficients; quadratic in the basis size,
    /// intended for small `i` only.
    pub fn to_qpoly(&self) -> QPoly {
        let mut acc = QPoly::zero();
        for (k0, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let k = k0 as u64 + 1;
            let term = binomial_poly(k as i64 - 1, k - 1).scale(&BigRational::from(a.clone()));
            acc = acc.add(&term);
        }
        acc
    }
}

/// Triangular change-of-basis solve for the decomposition of `F_i`.
///
/// Multiplies `F_i / x^i + 1` by `(1-x)^K` and rewrites the resulting
/// polynomial in the basis `(1-x)^j`. Independent of the suffix-sum
/// recursion; costs `O(K^2)` big-integer operations, so it is the oracle for
/// small `i` while [`basis_decomposition`] serves the general case.
///
/// `family` must be generated with order at least `i + K + 8`.
pub fn decomposition_by_solve(i: usize, family: &SeriesFamily) -> BasisDecomposition {
    assert!(i >= 3, "the decomposition exists from level 3 on");
    let k_total: BigInt = family.m_values()[..i].iter().sum();
    let k = usize::try_from(u64::try_from(&k_total).expect("basis size fits u64"))
        .expect("basis size fits usize");
    assert!(
        family.order() >= i + k + 8,
        "family order {} too small for solve at level {i} (need {})",
        family.order(),
        i + k + 8
    );
    let f = family.series(i);
    let window = family.order() - i;
    // G = F_i / x^i + 1.
    let mut g: Vec<BigInt> = (0..=window).map(|n| f.coeff(i + n).clone()).collect();
    g[0] += 1;
    // H = G * (1-x)^K, truncated; must be a polynomial of degree < K.
    let mut h = vec![BigInt::zero(); window + 1];
    for (n, gn) in g.iter().enumerate() {
        if gn.is_zero() {
            continue;
        }
        for j in 0..=(k.min(window - n)) {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            h[n + j] += gn * binomial(&k_total, j as u64) * BigInt::from(sign);
        }
    }
    for (n, c) in h.iter().enumerate().skip(k) {
        assert!(
            c.is_zero(),
            "solve window: residual coefficient at x^{n} is {c}, not zero"
        );
    }
    // Rewrite H in powers of (1-x): b_j = (-1)^j sum_n C(n, j) H_n.
    let mut coeffs = vec![BigInt::zero(); k];
    for (idx, slot) in coeffs.iter_mut().enumerate() {
        let j = (k - 1 - idx) as u64; // a_k = b_{K-k}
        let mut b = BigInt::zero();
        for (n, c) in h.iter().enumerate().take(k) {
            if c.is_zero() {
                continue;
            }
            b += c * binomial(&BigInt::from(n as u64), j);
        }
        if j % 2 == 1 {
            b = -b;
        }
        *slot = b;
    }
    BasisDecomposition { i, coeffs }
}

/// One decomposition step: the coefficients at level `i+1` from level `i`.
///
/// With `m = m_i >= 1` and `T_j` the suffix sums of `a`, the new vector is
/// `l - 1` for `l < m`, `m` at `l = m`, and `T_{l-m}` for `l > m`.
pub fn decomposition_step(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if m.is_zero() {
        return a.to_vec();
    }
    let m_us = usize::try_from(u64::try_from(m).expect("step size fits u64"))
        .expect("step size fits usize");
    let k = a.len();
    let mut suffix = vec![BigInt::zero(); k + 2];
    for j in (0..k).rev() {
        suffix[j + 1] = &suffix[j + 2] + &a[j];
    }
    let mut out = Vec::with_capacity(k + m_us);
    for l in 1..=(k + m_us) {
        let v = if l < m_us {
            BigInt::from(l as u64 - 1)
        } else if l == m_us {
            m.clone()
        } else {
            let j = l - m_us;
            if j <= k {
                suffix[j].clone()
            } else {
                BigInt::zero()
            }
        };
        out.push(v);
    }
    out
}

/// Decomposition of `F_i` for `i >= 3`, by solve at the anchor level 3 and
/// suffix-sum steps upward. Memory grows with `m_0 + ... + m_{i-1}`, which
/// stays reasonable through `i = 8` and explodes beyond.
pub fn basis_decomposition(i: usize) -> BasisDecomposition {
    assert!(i >= 3, "the decomposition exists from level 3 on");
    // m_0..m_{i-1} from a small family; the anchor solve needs order 3+K+8.
    let family = generate(i.max(3), i + 4);
    let anchor_family = generate(3, 13);
    let mut decomp = decomposition_by_solve(3, &anchor_family);
    for level in 3..i {
        decomp = BasisDecomposition {
            i: level + 1,
            coeffs: decomposition_step(&decomp.coeffs, family.m(level)),
        };
    }
    decomp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(vals: &[i64]) -> Vec<BigInt> {
        vals.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn inverse_power_weights() {
        // (1-x)^{-1} and (1-x)^{-3}.
        assert_eq!(inv_pow_weights(&BigInt::from(1), 4), ints(&[1, 1, 1, 1, 1]));
        assert_eq!(
            inv_pow_weights(&BigInt::from(3), 4),
            ints(&[1, 3, 6, 10, 15])
        );
        assert_eq!(inv_pow_weights(&BigInt::zero(), 3), ints(&[1, 0, 0, 0]));
    }

    #[test]
    fn family_reproduces_frozen_table_rows() {
        let fam = generate(8, 14);
        assert_eq!(
            fam.m_values(),
            &ints(&[1, 0, 1, 1, 3, 11, 103, 6359, 20700541])[..]
        );
        assert_eq!(fam.row(3, 3), ints(&[1, 3, 4, 5]));
        assert_eq!(fam.row(4, 3), ints(&[3, 8, 13, 19]));
        assert_eq!(fam.row(5, 3), ints(&[11, 48, 127, 275]));
        assert_eq!(fam.row(6, 3), ints(&[103, 1106, 7051, 33955]));
        assert_eq!(
            fam.row(7, 3),
            vec![
                BigInt::from(6359),
                BigInt::from(485280u64),
                BigInt::from(21029990u64),
                BigInt::from(654279500u64)
            ]
        );
    }

    #[test]
    fn early_series_are_explicit() {
        let fam = generate(3, 10);
        // F_1 = x^2/(1-x).
        assert_eq!(
            fam.series(1).coeffs(),
            &ints(&[0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1])[..]
        );
        // F_2 = F_1 because m_1 = 0.
        assert_eq!(fam.series(2), fam.series(1));
        // F_3 = x^3 + 3x^4 + 4x^5 + 5x^6 + ...
        assert_eq!(
            &fam.series(3).coeffs()[..7],
            &ints(&[0, 0, 0, 1, 3, 4, 5])[..]
        );
    }

    #[test]
    fn advance_agrees_with_iterated_delta() {
        let fam = generate(4, 16);
        let f4 = fam.series(4);
        let m4 = fam.m(4);
        assert_eq!(m4, &BigInt::from(3));
        let stepped = f4.delta(4).delta(4).delta(4);
        let advanced = f4.advance(4, m4);
        assert_eq!(stepped, advanced);
        // And the resulting row is the frozen one for level 5.
        let row: Vec<BigInt> = (0..4).map(|j| advanced.coeff(5 + j).clone()).collect();
        assert_eq!(row, ints(&[11, 48, 127, 275]));
    }

    #[test]
    fn advance_at_level_zero_handles_the_inner_shift() {
        // F_1 = advance(F_0, 0, 1) must be x^2/(1-x).
        let f0 = TruncatedSeries::one(8);
        let f1 = f0.advance(0, &BigInt::one());
        assert_eq!(f1.coeffs(), &ints(&[0, 0, 1, 1, 1, 1, 1, 1, 1])[..]);
    }

    #[test]
    #[should_panic(expected = "beyond truncation")]
    fn reads_beyond_truncation_panic() {
        let f = TruncatedSeries::one(4);
        let _ = f.coeff(5);
    }

    #[test]
    fn decomposition_solve_matches_published_small_levels() {
        let fam = generate(5, 40);
        assert_eq!(decomposition_by_solve(3, &fam).coeffs, ints(&[1, 1]));
        assert_eq!(decomposition_by_solve(4, &fam).coeffs, ints(&[1, 2, 1]));
        assert_eq!(
            decomposition_by_solve(5, &fam).coeffs,
            ints(&[0, 1, 3, 4, 3, 1])
        );
    }

    #[test]
    fn decomposition_recursion_matches_solve() {
        // Independent routes agree where the solve is feasible.
        let fam = generate(6, 40);
        for i in 3..=6 {
            let by_solve = decomposition_by_solve(i, &fam);
            let by_recursion = basis_decomposition(i);
            assert_eq!(by_solve, by_recursion, "level {i}");
        }
    }

    #[test]
    fn decomposition_solve_matches_recursion_at_seven() {
        let fam = generate(7, 140);
        let by_solve = decomposition_by_solve(7, &fam);
        let by_recursion = basis_decomposition(7);
        assert_eq!(by_solve, by_recursion);
    }

    #[test]
    fn decomposition_window_and_sum_checks() {
        let fam = generate(8, 22);
        for i in 3..=8 {
            let d = basis_decomposition(i);
            assert_eq!(d.coeff_sum(), fam.m(i) + 1, "sum at level {i}");
            assert!(d.check_against(&fam), "window at level {i}");
            let expected_size: BigInt = fam.m_values()[..i].iter().sum();
            assert_eq!(BigInt::from(d.basis_size() as u64), expected_size);
        }
    }

    #[test]
    fn interpolation_reproduces_rows_and_known_values() {
        let fam = generate(8, 15);
        for i in 3..=8 {
            let f = basis_decomposition(i).interpolating_polynomial();
            for j in 1..=6u64 {
                assert_eq!(
                    f.eval(&BigInt::from(j)),
                    *fam.series(i).coeff(i + j as usize),
                    "f_{i}({j})"
                );
            }
            // At 0 the interpolator overshoots the table by exactly 1.
            assert_eq!(f.eval(&BigInt::zero()), fam.m(i) + 1);
        }
        let f7 = basis_decomposition(7).interpolating_polynomial();
        assert_eq!(f7.eval(&BigInt::one()), BigInt::from(485280u64));
    }

    #[test]
    fn interpolator_level_three_is_t_plus_two() {
        let f3 = basis_decomposition(3).interpolating_polynomial();
        let p = f3.to_qpoly();
        assert_eq!(
            p.coeffs(),
            &[
                BigRational::from(BigInt::from(2)),
                BigRational::from(BigInt::from(1))
            ][..]
        );
    }
}
