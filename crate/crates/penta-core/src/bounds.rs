//! Ambient-dimension bounds along derivation chains.
//!
//! Two numbers are attached to a multi-degree: `r`, the largest plane
//! dimension the recursion needs, and `n`, the smallest ambient dimension
//! the recursion certifies. `r` collapses to a closed form in the chain
//! length. `n` is a maximum over the whole chain of the per-element
//! quantity [`n0`], which this module evaluates either literally (short
//! stretches) or through a polynomial model of the stretch whose integer
//! maximum is localized by Sturm sequences; both routes end in exact
//! rational arithmetic.
//!
//! The module also carries the integer coefficient table `m_{i,j}` that
//! expresses `r` and `n` of a single degree, with two independent
//! constructions (direct recursion and series extraction) kept side by
//! side so each can certify the other.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::poly::{binomial_poly, QPoly};
use crate::arith::{binomial, ceil_rational, BigRational};
use crate::multidegree::{chain_length, MultiDegree, MultiplicitySequence, Shape, Stretch};
use crate::series;

/// Stretches at most this long are walked element by element; longer ones
/// go through the polynomial model.
pub const LITERAL_STRETCH_LIMIT: u64 = 4096;

/// `r_0 = sum mu_d (d - 1) - 1`; equals `-1` on the empty sequence.
pub fn r0(mu: &MultiplicitySequence) -> BigInt {
    let mut acc = BigInt::from(-1);
    for (idx, m) in mu.entries().iter().enumerate() {
        acc += BigInt::from(m.clone()) * BigInt::from(idx as u64);
    }
    acc
}

/// `n_0(mu, r) = r + (1/r) sum mu_d [C(d + r, d) - 1]` for `r >= 1`.
///
/// The empty sequence is allowed and gives `r`, matching the recursion's
/// value there.
pub fn n0(mu: &MultiplicitySequence, r: &BigInt) -> BigRational {
    assert!(r >= &BigInt::one(), "n0 needs r >= 1 (got {r})");
    let mut total = BigInt::zero();
    for (idx, m) in mu.entries().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let d = idx as u64 + 1;
        total += BigInt::from(m.clone()) * (binomial(&(r + BigInt::from(d)), d) - 1);
    }
    BigRational::new(r * r + total, r.clone())
}

/// The plane dimension `r` of the recursion, in closed form: `mu_2 - 1`
/// when the top degree is at most two, chain length minus two otherwise,
/// and `-2` on the empty sequence.
pub fn r_bound(mu: &MultiplicitySequence) -> BigInt {
    match mu.top_degree() {
        None => BigInt::from(-2),
        Some(1) => BigInt::from(-1),
        Some(2) => BigInt::from(mu.get(2)) - 1,
        Some(_) => BigInt::from(chain_length(mu)) - 2,
    }
}

/// Outcome of inspecting one chain element at excess `rho`; values exclude
/// the walk offset, which the caller adds.
pub(crate) enum StepOutcome {
    Stop(BigRational),
    Candidate(BigRational),
}

pub(crate) fn classify_element(state: &MultiplicitySequence, rho: &BigInt) -> StepOutcome {
    match state.shape() {
        Shape::Empty => unreachable!("the walk stops before the empty element"),
        Shape::Ones { c } => StepOutcome::Stop(BigRational::from(rho + BigInt::from(c))),
        Shape::OnesAndTwo { c } => {
            StepOutcome::Stop(BigRational::from(rho * 2 + BigInt::from(c) + 1))
        }
        Shape::General => {
            if rho.is_zero() {
                StepOutcome::Stop(BigRational::from(BigInt::from(state.degree_sum())))
            } else if rho.is_negative() {
                StepOutcome::Stop(BigRational::from(BigInt::from(state.count()) - 1))
            } else {
                StepOutcome::Candidate(n0(state, rho))
            }
        }
    }
}

/// The ambient bound `n(mu, r)` for `r >= -1`, by maximizing over the
/// derivation chain with the stop rules of the recursion.
pub fn n_bound(mu: &MultiplicitySequence, r: &BigInt) -> BigRational {
    n_walk(mu, r, LITERAL_STRETCH_LIMIT)
}

/// `n(mu) = n(mu, r(mu))`, the bound at the canonical plane dimension.
pub fn n_exact(mu: &MultiplicitySequence) -> BigRational {
    n_bound(mu, &r_bound(mu))
}

fn n_walk(mu: &MultiplicitySequence, r: &BigInt, literal_limit: u64) -> BigRational {
    assert!(
        r >= &BigInt::from(-1),
        "the recursion needs r >= -1 (got {r})"
    );
    if mu.is_empty() {
        return BigRational::from(r.clone());
    }
    let mut best: Option<BigRational> = None;
    let push = |best: &mut Option<BigRational>, v: BigRational| {
        if best.as_ref().is_none_or(|b| &v > b) {
            *best = Some(v);
        }
    };
    let mut k0 = BigInt::zero();
    for stretch in mu.stretches() {
        let rho0 = r - &k0;
        let steps = BigInt::from(stretch.steps.clone());
        if stretch.level == 1 {
            // Single all-ones element; the walk stops here whatever rho is.
            let c = BigInt::from(stretch.start.get(1));
            push(&mut best, BigRational::from(&rho0 + c + &k0));
            return best.expect("at least one value");
        }
        // Elements with rho >= 1 and a shape that keeps the walk going
        // contribute n0 candidates; level 2 reserves its last element.
        let one = BigInt::one();
        let mut t_hi = (&rho0 - &one).min(&steps - &one);
        if stretch.level == 2 {
            t_hi = t_hi.min(&steps - BigInt::from(2));
        }
        if !t_hi.is_negative() {
            collect_stretch_candidates(&stretch, &rho0, &k0, &t_hi, literal_limit, |v| {
                push(&mut best, v)
            });
        }
        // Find where (or whether) the walk stops inside this stretch.
        let stop_t = if rho0.is_negative() {
            Some(BigInt::zero())
        } else if stretch.level == 2 {
            Some(rho0.clone().min(&steps - BigInt::one()))
        } else if rho0 <= &steps - BigInt::one() {
            Some(rho0.clone())
        } else {
            None
        };
        match stop_t {
            Some(t) => {
                let state = stretch.state_at(&t.to_biguint().expect("t >= 0"));
                let rho = &rho0 - &t;
                let value = match classify_element(&state, &rho) {
                    StepOutcome::Stop(v) => v,
                    StepOutcome::Candidate(_) => {
                        unreachable!("stop element must not continue the walk")
                    }
                };
                push(&mut best, value + BigRational::from(&k0 + &t));
                return best.expect("at least one value");
            }
            None => k0 += &steps,
        }
    }
    unreachable!("every chain ends in a stopping element")
}

/// Reports `n0(state(t), rho0 - t) + k0 + t` for the maximizing integer
/// `t` in `[0, t_hi]` (plus a few near-maximal ones), all exactly.
fn collect_stretch_candidates(
    stretch: &Stretch,
    rho0: &BigInt,
    k0: &BigInt,
    t_hi: &BigInt,
    literal_limit: u64,
    mut sink: impl FnMut(BigRational),
) {
    let value_at = |t: &BigInt| -> BigRational {
        let state = stretch.state_at(&t.to_biguint().expect("t >= 0"));
        let rho = rho0 - t;
        n0(&state, &rho) + BigRational::from(k0 + t)
    };
    if *t_hi <= BigInt::from(literal_limit) {
        let mut state = stretch.start.clone();
        let mut t = BigInt::zero();
        while &t <= t_hi {
            let rho = rho0 - &t;
            match classify_element(&state, &rho) {
                StepOutcome::Candidate(v) => sink(v + BigRational::from(k0 + &t)),
                StepOutcome::Stop(_) => unreachable!("inside the running range"),
            }
            state = state.derived();
            t += 1;
        }
        return;
    }
    let g = stretch_value_poly(stretch, rho0, k0);
    for t in integer_max_candidates(&g, t_hi) {
        sink(value_at(&t));
    }
}

/// Per-level state polynomials of a stretch: entry `k-1` evaluates to
/// `mu_k(t)` for integer `0 <= t <= steps`. Mirrors the closed form of
/// [`Stretch::state_at`] coefficient by coefficient.
fn stretch_state_polys(stretch: &Stretch) -> Vec<QPoly> {
    let d = stretch.level as usize;
    assert!(d >= 2, "level-1 stretches have no polynomial model");
    let v: Vec<BigRational> = (0..d)
        .map(|k| BigRational::from(BigInt::from(stretch.start.get(k as u32 + 1))))
        .collect();
    let mut out = Vec::with_capacity(d);
    for k in 1..=d {
        let mut acc = QPoly::zero();
        for u in 0..=(d - k) {
            if v[k + u - 1].is_zero() {
                continue;
            }
            // C(t - 1 + u, u)
            acc = acc.add(&binomial_poly(u as i64 - 1, u as u64).scale(&v[k + u - 1]));
        }
        if k < d {
            let u1 = (d - 1 - k) as u64;
            acc = acc.sub(&binomial_poly(u1 as i64 - 1, u1 + 1));
            if k == d - 1 {
                acc = acc.sub(&QPoly::constant_int(1));
            }
        }
        let u2 = (d - k) as u64;
        acc = acc.sub(&binomial_poly(u2 as i64 - 1, u2 + 1));
        if k == d {
            acc = acc.sub(&QPoly::constant_int(1));
        }
        out.push(acc);
    }
    out
}

/// The walk value along a stretch as a polynomial in the step offset `t`:
/// `n0(state(t), rho0 - t) + k0 + t`, using that `[C(d + rho, d) - 1]/rho`
/// is itself a polynomial in `rho`.
pub(crate) fn stretch_value_poly(stretch: &Stretch, rho0: &BigInt, k0: &BigInt) -> QPoly {
    let minus_one = BigRational::from(BigInt::from(-1));
    let rho0_q = BigRational::from(rho0.clone());
    // rho(t) = rho0 - t
    let rho = QPoly::new(vec![rho0_q.clone(), minus_one.clone()]);
    let mut g = rho.clone();
    for (k0idx, mu_k) in stretch_state_polys(stretch).into_iter().enumerate() {
        if mu_k.is_zero() {
            continue;
        }
        let k = k0idx as u64 + 1;
        // P_k(rho) = (C(rho + k, k) - 1)/rho, composed with rho(t).
        let p_k = binomial_poly(k as i64, k)
            .sub(&QPoly::constant_int(1))
            .div_exact(&QPoly::var());
        let p_k_of_rho = p_k.compose_affine(&minus_one, &rho0_q);
        g = g.add(&mu_k.mul(&p_k_of_rho));
    }
    // + k0 + t
    g.add(&QPoly::new(vec![
        BigRational::from(k0.clone()),
        BigRational::one(),
    ]))
}

/// Integer points that can maximize `g` over `[0, t_hi]`: the endpoints
/// plus every integer adjacent to a root of the discrete difference.
pub(crate) fn integer_max_candidates(g: &QPoly, t_hi: &BigInt) -> Vec<BigInt> {
    let mut cands: BTreeSet<BigInt> = BTreeSet::new();
    cands.insert(BigInt::zero());
    cands.insert(t_hi.clone());
    let h = g.shift_one().sub(g);
    if !h.is_zero() && t_hi >= &BigInt::one() {
        for root in h.integer_root_neighbors(&BigInt::zero(), &(t_hi - 1)) {
            for delta in [-1, 0, 1] {
                let t = &root + BigInt::from(delta);
                if !t.is_negative() && &t <= t_hi {
                    cands.insert(t);
                }
            }
        }
    }
    cands.into_iter().collect()
}

/// Definitional walk, element by element; test oracle for the
/// stretch-accelerated route. Cost is linear in the chain length.
#[cfg(test)]
fn n_walk_literal(mu: &MultiplicitySequence, r: &BigInt) -> BigRational {
    assert!(r >= &BigInt::from(-1));
    if mu.is_empty() {
        return BigRational::from(r.clone());
    }
    let mut best: Option<BigRational> = None;
    let mut state = mu.clone();
    let mut k = BigInt::zero();
    loop {
        let rho = r - &k;
        match classify_element(&state, &rho) {
            StepOutcome::Stop(v) => {
                let v = v + BigRational::from(k.clone());
                if best.as_ref().is_none_or(|b| &v > b) {
                    best = Some(v);
                }
                return best.expect("stop value recorded");
            }
            StepOutcome::Candidate(v) => {
                let v = v + BigRational::from(k.clone());
                if best.as_ref().is_none_or(|b| &v > b) {
                    best = Some(v);
                }
                state = state.derived();
                k += 1;
            }
        }
    }
}

/// Definitional recursion for `r`; test oracle for [`r_bound`].
#[cfg(test)]
fn r_walk_literal(mu: &MultiplicitySequence) -> BigInt {
    let mut best = BigInt::from(-2);
    let mut state = mu.clone();
    let mut k = BigInt::zero();
    loop {
        if state.is_empty() {
            // r of the empty sequence is -2.
            best = best.max(BigInt::from(-2) + &k);
            return best;
        }
        best = best.max(r0(&state) + &k);
        state = state.derived();
        k += 1;
    }
}

/// The coefficient table `m_{i,j}`, built by direct integer recursion.
///
/// Row `i` is stored for `0 <= j <= j_max + (i_max - i)`: computing row
/// `i+1` to width `w` consumes row `i` up to width `w + 1`, so earlier rows
/// carry extra columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MTable {
    j_max: usize,
    rows: Vec<Vec<BigInt>>,
}

impl MTable {
    pub fn new(i_max: usize, j_max: usize) -> Self {
        let width = |i: usize| j_max + (i_max - i) + 1;
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(i_max + 1);
        let mut first = vec![BigInt::zero(); width(0)];
        first[0] = BigInt::one();
        rows.push(first);
        for i in 0..i_max {
            let prev = &rows[i];
            let m = prev[0].clone();
            let mut row = Vec::with_capacity(width(i + 1));
            // m_{i+1} = (m^2 - m)/2 + m_{i,1}
            let head = &m * &m - &m;
            debug_assert!(head.is_even());
            row.push(head / BigInt::from(2) + &prev[1]);
            for j in 1..width(i + 1) {
                let ju = j as u64;
                let lead = binomial(&(&m + BigInt::from(ju) - BigInt::one()), ju)
                    * (&m * &m + (BigInt::from(ju) - BigInt::one()) * &m + BigInt::from(2));
                let den = BigInt::from(ju + 2);
                assert!(
                    (&lead % &den).is_zero(),
                    "row recursion: leading term must divide by {den}"
                );
                let mut entry = lead / den;
                for k in 0..=j {
                    let ku = k as u64;
                    entry += binomial(&(&m + BigInt::from(ju - ku) - BigInt::one()), ju - ku)
                        * &prev[k + 1];
                }
                row.push(entry);
            }
            rows.push(row);
        }
        MTable { j_max, rows }
    }

    /// Same table read off the generating series; the independent route.
    pub fn from_series(i_max: usize, j_max: usize) -> Self {
        let fam = series::generate(i_max, i_max + j_max + 2);
        let rows = (0..=i_max)
            .map(|i| fam.row(i, j_max + (i_max - i)))
            .collect();
        MTable { j_max, rows }
    }

    pub fn i_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    /// Columns stored for row `i`.
    pub fn width(&self, i: usize) -> usize {
        self.rows[i].len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn m(&self, i: usize) -> &BigInt {
        &self.rows[i][0]
    }

    /// `m_0 + ... + m_upto`.
    pub fn m_prefix_sum(&self, upto: usize) -> BigInt {
        (0..=upto).map(|i| self.m(i)).sum()
    }
}

/// `r` of a single degree: `-1`, `0`, then `m_0 + ... + m_{d-2}`.
pub fn r_of_degree(d: u32) -> BigInt {
    assert!(d >= 1, "degrees are positive");
    match d {
        1 => BigInt::from(-1),
        2 => BigInt::zero(),
        _ => MTable::new(d as usize - 2, 1).m_prefix_sum(d as usize - 2),
    }
}

/// `n` of a single degree, exact; the ceiling is the published bound.
pub fn n_of_degree(d: u32) -> BigRational {
    assert!(d >= 1, "degrees are positive");
    let mu = MultiplicitySequence::from_counts(
        &std::iter::repeat_n(0u64, d as usize - 1)
            .chain([1])
            .collect::<Vec<_>>(),
    );
    n_bound(&mu, &r_of_degree(d))
}

/// Full exact report for one multi-degree.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub multidegree: String,
    pub r: String,
    pub chain_length: String,
    /// Exact value of the chain maximum, as `p/q` when not integral.
    pub n_exact: String,
    /// Ceiling of `n_exact`; the integer ambient bound.
    pub n: String,
    /// First walk value `n0(mu, r)`, present when `r >= 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0_at_r: Option<String>,
}

pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn bound_report(md: &MultiDegree) -> BoundReport {
    assert!(!md.is_empty(), "the report needs a nonempty multi-degree");
    let mu = md.multiplicities();
    let r = r_bound(&mu);
    let n = n_bound(&mu, &r);
    let n0_at_r = (r >= BigInt::one()).then(|| format_rational(&n0(&mu, &r)));
    BoundReport {
        multidegree: md.to_string(),
        r: r.to_string(),
        chain_length: chain_length(&mu).to_string(),
        n_exact: format_rational(&n),
        n: ceil_rational(&n).to_string(),
        n0_at_r,
    }
}

/// The two sufficient criteria for one derivation step not to raise the
/// ambient bound, together with the inequality they imply and the ground
/// truth it is equivalent to.
#[derive(Debug, Clone, Serialize)]
pub struct StepCriteria {
    pub multidegree: String,
    pub r: String,
    /// `max mu_d <= r - 2 d_c - 1`.
    pub small_multiplicities: bool,
    /// `d_c <= 4` and the degree-3 polynomial inequality in `r`.
    pub low_degree_polynomial: bool,
    /// `sum mu_d [C(d+r,d) - rd - 1] <= r [C(d_c+r-1,d_c) + C(d_c+r-2,d_c-1) - 2]`.
    pub direct: bool,
    /// `n0(mu', r-1) + 1 <= n0(mu, r)`, the statement the others certify.
    pub step_consistent: bool,
}

pub fn step_criteria(mu: &MultiplicitySequence, r: &BigInt) -> StepCriteria {
    assert!(r >= &BigInt::from(2), "the step inequality needs r >= 2");
    let dc = mu.top_degree().expect("nonempty multiplicity sequence");
    let dcu = dc as u64;

    let max_mu = mu.entries().iter().max().cloned().unwrap_or_default();
    let small_multiplicities = BigInt::from(max_mu) <= r - BigInt::from(2 * dcu) - BigInt::one();

    let low_degree_polynomial = dc <= 4 && {
        let c = BigInt::from;
        let mu2 = BigInt::from(mu.get(2));
        let mu3 = BigInt::from(mu.get(3));
        let mu4 = BigInt::from(mu.get(4));
        let poly = -(c(12) * &mu2 + c(28) * &mu3 + c(46) * &mu4)
            + (c(12) * &mu2 + c(24) * &mu3 + c(35) * &mu4) * r
            + (c(4) * &mu3 + c(10) * &mu4) * r * r
            + &mu4 * r * r * r;
        let fact: BigInt = (1..=dcu).map(BigInt::from).product();
        // (d_c!/24) poly <= r^{d_c}, cleared of the denominator 24.
        fact * poly <= c(24) * r.pow(dc)
    };

    let mut lhs = BigInt::zero();
    for (idx, m) in mu.entries().iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let d = idx as u64 + 1;
        lhs += BigInt::from(m.clone())
            * (binomial(&(r + BigInt::from(d)), d) - r * BigInt::from(d) - 1);
    }
    let rhs = r
        * (binomial(&(BigInt::from(dcu) + r - 1), dcu)
            + binomial(&(BigInt::from(dcu) + r - 2), dcu - 1)
            - 2);
    let direct = lhs <= rhs;

    let step_consistent = {
        let r1 = r - 1;
        n0(&mu.derived(), &r1) + BigRational::one() <= n0(mu, r)
    };

    StepCriteria {
        multidegree: mu
            .to_multidegree(u64::MAX)
            .expect("criteria inputs are small")
            .to_string(),
        r: r.to_string(),
        small_multiplicities,
        low_degree_polynomial,
        direct,
        step_consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn mu(counts: &[u64]) -> MultiplicitySequence {
        MultiplicitySequence::from_counts(counts)
    }

    fn pure(d: u32) -> MultiplicitySequence {
        MultiDegree::hypersurface(d).multiplicities()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(int(n), int(d))
    }

    #[test]
    fn elementary_quantities() {
        assert_eq!(r0(&MultiplicitySequence::empty()), int(-1));
        assert_eq!(r0(&pure(3)), int(1));
        assert_eq!(r0(&pure(7)), int(5));
        assert_eq!(r0(&mu(&[0, 1, 0, 0, 1])), int(4)); // (2,5)
        assert_eq!(n0(&pure(3), &int(1)), rat(4, 1));
        assert_eq!(n0(&pure(4), &int(2)), rat(9, 1));
        assert_eq!(n0(&pure(5), &int(3)), rat(64, 3));
        assert_eq!(n0(&pure(3), &int(2)), rat(13, 2));
        assert_eq!(n0(&MultiplicitySequence::empty(), &int(5)), rat(5, 1));
    }

    #[test]
    fn table_matches_published_rows() {
        let t = MTable::new(8, 3);
        let expected: [&[i64]; 6] = [
            &[1, 3, 4, 5],
            &[3, 8, 13, 19],
            &[11, 48, 127, 275],
            &[103, 1106, 7051, 33955],
            &[6359, 485280, 21029990, 654279500],
            &[20700541, 88819638509, 214404499562520, 368104651084030885],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert_eq!(t.entry(i + 3, j), &int(*want), "entry ({},{})", i + 3, j);
            }
        }
    }

    #[test]
    fn table_routes_agree() {
        // Direct coefficient recursion vs extraction from the series.
        let a = MTable::new(10, 6);
        let b = MTable::from_series(10, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn table_padding_shape() {
        let t = MTable::new(5, 2);
        for i in 0..=5 {
            assert_eq!(t.width(i), 2 + (5 - i) + 1);
        }
    }

    #[test]
    fn r_of_degree_matches_published_values() {
        let expected = [
            (1, -1),
            (2, 0),
            (3, 1),
            (4, 2),
            (5, 3),
            (6, 6),
            (7, 17),
            (8, 120),
            (9, 6479),
            (10, 20707020),
        ];
        for (d, r) in expected {
            assert_eq!(r_of_degree(d), int(r), "r({d})");
        }
    }

    #[test]
    fn r_bound_agrees_with_table_route() {
        // Chain-length closed form vs the coefficient-table sum; the two
        // routes share nothing but the derivation rule.
        for d in 3..=12u32 {
            assert_eq!(r_bound(&pure(d)), r_of_degree(d), "degree {d}");
        }
    }

    #[test]
    fn r_bound_agrees_with_definitional_recursion() {
        let cases: Vec<MultiplicitySequence> = vec![
            mu(&[1]),
            mu(&[4]),
            mu(&[0, 1]),
            mu(&[2, 3]),
            mu(&[0, 0, 1]),
            mu(&[0, 0, 2]),
            mu(&[1, 2, 1]),
            mu(&[0, 0, 0, 1]),
            mu(&[2, 0, 1, 1]),
            mu(&[0, 1, 0, 0, 1]),
            mu(&[1, 1, 1, 1, 1]),
            mu(&[0, 0, 0, 0, 0, 1]),
            mu(&[3, 0, 0, 2, 0, 1]),
        ];
        for m in cases {
            assert_eq!(r_bound(&m), r_walk_literal(&m), "mu = {m}");
        }
        assert_eq!(r_bound(&MultiplicitySequence::empty()), int(-2));
    }

    #[test]
    fn known_small_r_values() {
        assert_eq!(r_bound(&pure(3)), int(1));
        assert_eq!(r_bound(&mu(&[0, 0, 2])), int(3)); // (3,3)
        assert_eq!(r_bound(&mu(&[5])), int(-1)); // five hyperplanes
        assert_eq!(r_bound(&mu(&[0, 4])), int(3)); // four quadrics
                                                   // The two exceptional families of the step lemma.
        assert_eq!(r_bound(&mu(&[2, 3, 1])), int(4)); // mu_2 + 1
        assert_eq!(r_bound(&mu(&[2, 3, 0, 1])), int(5)); // mu_2 + 2
    }

    #[test]
    fn n_walk_routes_agree_on_small_inputs() {
        let cases: Vec<MultiplicitySequence> = vec![
            mu(&[0, 0, 1]),
            mu(&[0, 0, 0, 1]),
            mu(&[0, 0, 0, 0, 1]),
            mu(&[0, 0, 2]),
            mu(&[1, 2, 1]),
            mu(&[2, 0, 1, 1]),
            mu(&[0, 1, 0, 0, 1]),
            mu(&[3, 3]),
            mu(&[0, 5]),
            mu(&[1, 1, 1, 1]),
            mu(&[4, 0, 0, 2]),
        ];
        for m in cases {
            let r = r_bound(&m);
            for extra in [0i64, 1, 2, 5] {
                let r = &r + int(extra);
                if r < int(-1) {
                    continue;
                }
                let literal = n_walk_literal(&m, &r);
                // Limit 0 forces the polynomial route on every stretch.
                assert_eq!(n_walk(&m, &r, 0), literal, "poly route, mu={m} r={r}");
                assert_eq!(
                    n_walk(&m, &r, u64::MAX),
                    literal,
                    "literal route, mu={m} r={r}"
                );
            }
        }
    }

    #[test]
    fn n_walk_base_cases() {
        assert_eq!(n_bound(&mu(&[3]), &int(-1)), rat(2, 1)); // #d - 1
        assert_eq!(n_bound(&mu(&[3]), &int(4)), rat(7, 1)); // r + c
        assert_eq!(n_bound(&mu(&[2, 1]), &int(3)), rat(10, 1)); // 2r + c + 1
        assert_eq!(n_bound(&pure(2), &int(0)), rat(2, 1));
        assert_eq!(n_bound(&pure(3), &int(0)), rat(3, 1)); // degree sum at rho = 0
        assert_eq!(n_bound(&MultiplicitySequence::empty(), &int(7)), rat(7, 1));
    }

    #[test]
    fn stretch_polynomials_match_states() {
        let cases = [
            mu(&[2, 1, 3]),
            mu(&[0, 4]),
            mu(&[1, 0, 0, 2]),
            mu(&[0, 0, 5]),
        ];
        for m in cases {
            for stretch in m.stretches() {
                if stretch.level < 2 {
                    continue;
                }
                let polys = stretch_state_polys(&stretch);
                let t_max = stretch.steps.clone().min(6u32.into());
                let mut t = BigUint::zero();
                while t <= t_max {
                    let state = stretch.state_at(&t);
                    for (k0, p) in polys.iter().enumerate() {
                        let got = p.eval_int(&BigInt::from(t.clone()));
                        let want = BigRational::from(BigInt::from(state.get(k0 as u32 + 1)));
                        assert_eq!(
                            got,
                            want,
                            "mu={m} level={} k={} t={t}",
                            stretch.level,
                            k0 + 1
                        );
                    }
                    t += 1u32;
                }
            }
        }
    }

    #[test]
    fn value_polynomial_matches_pointwise_values() {
        let m = mu(&[1, 2, 4]);
        let r = r_bound(&m) + 3;
        let stretch = m.stretches().next().unwrap();
        let g = stretch_value_poly(&stretch, &r, &BigInt::zero());
        let mut state = m.clone();
        for t in 0..3 {
            let rho = &r - int(t);
            let want = n0(&state, &rho) + BigRational::from(int(t));
            assert_eq!(g.eval_int(&int(t)), want, "t={t}");
            state = state.derived();
        }
    }

    #[test]
    fn published_n_values_for_single_degrees() {
        let expected = [
            (3, "4"),
            (4, "9"),
            (5, "22"),
            (6, "160"),
            (7, "20376"),
            (8, "11914188890"),
            (9, "8616199237736295920955120"),
            (
                10,
                "192884152577980851363553858004926940342106493833715693762179",
            ),
        ];
        for (d, want) in expected {
            let n = n_of_degree(d);
            assert_eq!(ceil_rational(&n).to_string(), want, "n({d})");
        }
        // Exact rational values behind the two non-integral entries.
        assert_eq!(n_of_degree(5), rat(64, 3));
        assert_eq!(n_of_degree(6), rat(959, 6));
    }

    #[test]
    fn first_element_attains_the_maximum_for_single_degrees() {
        for d in 3..=10u32 {
            let m = pure(d);
            let r = r_bound(&m);
            assert_eq!(n_bound(&m, &r), n0(&m, &r), "degree {d}");
        }
    }

    #[test]
    fn report_fields_are_consistent() {
        let md = MultiDegree::new(vec![2, 5]).unwrap();
        let rep = bound_report(&md);
        assert_eq!(rep.multidegree, "(2,5)");
        assert_eq!(rep.r, "4");
        let n_exact: Vec<&str> = rep.n_exact.split('/').collect();
        assert!(n_exact.len() <= 2);
        // r of (2,5): chain length minus two.
        assert_eq!(rep.chain_length, "6");
    }

    #[test]
    fn step_criteria_soundness_sweep() {
        // Both sufficient criteria imply the direct inequality, and the
        // direct inequality is exactly the step comparison.
        let mut checked = 0u32;
        for a in 0..=4u64 {
            for b in 0..=4u64 {
                for c in 0..=4u64 {
                    for d in 0..=4u64 {
                        for e in 0..=4u64 {
                            let m = mu(&[a, b, c, d, e]);
                            if m.is_empty() {
                                continue;
                            }
                            for r in [2i64, 3, 4, 5, 6, 8, 12, 20, 30] {
                                let crit = step_criteria(&m, &int(r));
                                if crit.small_multiplicities {
                                    assert!(crit.direct, "(i) at mu={m} r={r}");
                                }
                                if crit.low_degree_polynomial {
                                    assert!(crit.direct, "(ii) at mu={m} r={r}");
                                }
                                assert_eq!(
                                    crit.direct, crit.step_consistent,
                                    "equivalence at mu={m} r={r}"
                                );
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(checked > 25_000);
    }

    #[test]
    fn ambient_growth_bound_for_single_degrees() {
        // ceil(n(d)) <= 2^((d-1) 2^(d-5)) for 6 <= d <= 14.
        for d in 6..=14u32 {
            let n = ceil_rational(&n_of_degree(d));
            let exponent = (d as u64 - 1) * (1u64 << (d - 5));
            let bound = BigInt::from(2).pow(exponent as u32);
            assert!(n <= bound, "degree {d}");
        }
    }
}
