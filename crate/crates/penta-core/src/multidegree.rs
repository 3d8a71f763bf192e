//! Multi-degrees, multiplicity sequences, and derivation chains.
//!
//! A multi-degree is a weakly increasing tuple `d = (d_1 <= ... <= d_c)` of
//! positive integers; the empty tuple is allowed and written `()`. Its
//! multiplicity sequence `mu` records how many entries equal each degree,
//! `mu[k] = #{ i : d_i = k+1 }`, trimmed of trailing zeros. All chain
//! computations run on multiplicity sequences, whose entries are unbounded
//! (`BigUint`): far down a derivation chain they grow doubly exponentially
//! even when the starting tuple is tiny.
//!
//! The derivation step maps a nonempty `mu` with top degree `D >= 2` to the
//! suffix-sum sequence minus one entry at `D` and one at `D - 1`; a sequence
//! of top degree 1 derives to the empty sequence in a single step. Iterating
//! until the empty sequence yields the derivation chain.
//!
//! A chain splits into at most `D` maximal stretches of constant top degree.
//! Within one stretch the step is an affine map, so the state after `t` steps
//! has a closed form in binomial coefficients ([`Stretch::state_at`]). That
//! closed form is what makes chains of length `10^100` tractable.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::binomial;

/// Errors from multi-degree construction and chain materialization.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultiDegreeError {
    #[error("multi-degree entries must be positive (got {0})")]
    NonPositiveEntry(i64),
    #[error("cannot parse {0:?} as a multi-degree")]
    Parse(String),
    #[error("materialization needs {needed} entries, over the cap of {cap}")]
    TooLarge { needed: BigUint, cap: u64 },
    #[error("chain has {length} elements, over the cap of {cap}")]
    ChainTooLong { length: BigUint, cap: u64 },
}

/// A weakly increasing tuple of positive degrees; possibly empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiDegree {
    parts: Vec<u32>,
}

impl MultiDegree {
    /// Builds a multi-degree from arbitrary order; entries are sorted.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, MultiDegreeError> {
        if parts.contains(&0) {
            return Err(MultiDegreeError::NonPositiveEntry(0));
        }
        parts.sort_unstable();
        Ok(MultiDegree { parts })
    }

    pub fn empty() -> Self {
        MultiDegree { parts: Vec::new() }
    }

    /// The multi-degree of a single hypersurface of degree `d`.
    pub fn hypersurface(d: u32) -> Self {
        MultiDegree::new(vec![d]).expect("positive degree")
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of entries, `#d`.
    pub fn count(&self) -> usize {
        self.parts.len()
    }

    /// Largest degree `d_c`, if any.
    pub fn top_degree(&self) -> Option<u32> {
        self.parts.last().copied()
    }

    /// Sum of all entries.
    pub fn degree_sum(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn multiplicities(&self) -> MultiplicitySequence {
        let top = self.top_degree().unwrap_or(0) as usize;
        let mut mu = vec![BigUint::zero(); top];
        for &p in &self.parts {
            mu[p as usize - 1] += 1u32;
        }
        MultiplicitySequence::new(mu)
    }

    /// The pointed-lines tuple `d_1`; see [`MultiplicitySequence::pointed_lines`].
    pub fn pointed_lines(&self) -> Self {
        self.multiplicities()
            .pointed_lines()
            .to_multidegree(u64::MAX)
            .expect("pointed lines of a materialized tuple stay materializable")
    }

    /// One derivation step.
    pub fn derived(&self) -> Self {
        self.multiplicities()
            .derived()
            .to_multidegree(u64::MAX)
            .expect("derived tuple of a materialized tuple stays materializable")
    }

    /// The full derivation chain from `self` down to `()`, materialized.
    pub fn chain(&self, cap: u64) -> Result<Vec<MultiDegree>, MultiDegreeError> {
        let mut out = Vec::new();
        for mu in self.multiplicities().chain_iter() {
            if out.len() as u64 >= cap {
                return Err(MultiDegreeError::ChainTooLong {
                    length: chain_length(&self.multiplicities()),
                    cap,
                });
            }
            out.push(mu.to_multidegree(cap)?);
        }
        Ok(out)
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for MultiDegree {
    type Err = MultiDegreeError;

    /// Accepts `"7"`, `"2,2,3"`, `"[2,2,3]"`, `"(2,2,3)"`, and `"()"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .trim_start_matches(['[', '('])
            .trim_end_matches([']', ')']);
        if inner.trim().is_empty() {
            return Ok(MultiDegree::empty());
        }
        let mut parts = Vec::new();
        for tok in inner.split(',') {
            let v: u32 = tok
                .trim()
                .parse()
                .map_err(|_| MultiDegreeError::Parse(s.to_string()))?;
            if v == 0 {
                return Err(MultiDegreeError::NonPositiveEntry(0));
            }
            parts.push(v);
        }
        MultiDegree::new(parts)
    }
}

/// Multiplicity sequence of a multi-degree: entry `k` (0-based) counts the
/// tuple entries equal to `k + 1`. Canonical form has no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplicitySequence {
    mu: Vec<BigUint>,
}

/// Base-case shape of a multi-degree, used by the bound recursions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    /// The empty tuple.
    Empty,
    /// `(1, ..., 1)` with `c >= 1` ones.
    Ones { c: BigUint },
    /// `(1, ..., 1, 2)` with `c - 1 >= 0` ones and a single two.
    OnesAndTwo { c: BigUint },
    /// Anything else: top degree at least 3, or at least two 2s.
    General,
}

impl MultiplicitySequence {
    pub fn new(mut mu: Vec<BigUint>) -> Self {
        while mu.last().is_some_and(Zero::is_zero) {
            mu.pop();
        }
        MultiplicitySequence { mu }
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        MultiplicitySequence::new(counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn empty() -> Self {
        MultiplicitySequence { mu: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.mu
    }

    /// Multiplicity of degree `d >= 1`.
    pub fn get(&self, d: u32) -> BigUint {
        if d == 0 {
            return BigUint::zero();
        }
        self.mu
            .get(d as usize - 1)
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Largest degree with nonzero multiplicity.
    pub fn top_degree(&self) -> Option<u32> {
        if self.mu.is_empty() {
            None
        } else {
            Some(self.mu.len() as u32)
        }
    }

    /// Number of tuple entries, `#d`.
    pub fn count(&self) -> BigUint {
        self.mu.iter().sum()
    }

    /// Sum of all tuple entries; also the entry count of the pointed-lines
    /// tuple, `#d_1`.
    pub fn degree_sum(&self) -> BigUint {
        self.mu
            .iter()
            .enumerate()
            .map(|(k, m)| m * BigUint::from(k as u64 + 1))
            .sum()
    }

    /// The pointed-lines sequence: degree `k` appears once for every tuple
    /// entry of degree at least `k`, i.e. the suffix sums of `mu`.
    pub fn pointed_lines(&self) -> Self {
        let mut out = Vec::with_capacity(self.mu.len());
        let mut acc = BigUint::zero();
        let mut suffix = vec![BigUint::zero(); self.mu.len()];
        for (k, m) in self.mu.iter().enumerate().rev() {
            acc += m;
            suffix[k] = acc.clone();
        }
        out.extend(suffix);
        MultiplicitySequence::new(out)
    }

    /// One derivation step: the pointed-lines sequence with one entry of the
    /// top degree and one of the next degree removed. A sequence of top
    /// degree 1 derives to the empty sequence; the empty sequence is a fixed
    /// point.
    pub fn derived(&self) -> Self {
        let Some(d) = self.top_degree() else {
            return MultiplicitySequence::empty();
        };
        if d == 1 {
            return MultiplicitySequence::empty();
        }
        let mut pl = self.pointed_lines().mu;
        debug_assert!(pl.len() == d as usize);
        pl[d as usize - 1] -= 1u32; // top entry: mu_D >= 1
        pl[d as usize - 2] -= 1u32; // next: suffix sum >= mu_D >= 1
        MultiplicitySequence::new(pl)
    }

    /// Materializes the tuple; errors if it has more than `cap` entries.
    pub fn to_multidegree(&self, cap: u64) -> Result<MultiDegree, MultiDegreeError> {
        let needed = self.count();
        if needed > BigUint::from(cap) {
            return Err(MultiDegreeError::TooLarge { needed, cap });
        }
        let mut parts = Vec::new();
        for (k, m) in self.mu.iter().enumerate() {
            let m = m.to_u64().expect("bounded by cap");
            for _ in 0..m {
                parts.push(k as u32 + 1);
            }
        }
        Ok(MultiDegree { parts })
    }

    /// Lazy iterator over the derivation chain: `self`, its derived sequence,
    /// and so on, ending with the empty sequence.
    pub fn chain_iter(&self) -> DerivedChain {
        DerivedChain {
            next: Some(self.clone()),
        }
    }

    /// Splits the chain into maximal constant-top-degree stretches.
    pub fn stretches(&self) -> Stretches {
        Stretches {
            state: self.clone(),
        }
    }

    /// Classifies against the closed-form base shapes.
    pub fn shape(&self) -> Shape {
        match self.top_degree() {
            None => Shape::Empty,
            Some(1) => Shape::Ones {
                c: self.mu[0].clone(),
            },
            Some(2) if self.mu[1].is_one() => Shape::OnesAndTwo {
                c: &self.mu[0] + 1u32,
            },
            _ => Shape::General,
        }
    }
}

impl fmt::Display for MultiplicitySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.mu.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

/// Iterator over a derivation chain, ending after the empty sequence.
pub struct DerivedChain {
    next: Option<MultiplicitySequence>,
}

impl Iterator for DerivedChain {
    type Item = MultiplicitySequence;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        if !current.is_empty() {
            self.next = Some(current.derived());
        }
        Some(current)
    }
}

/// A maximal run of chain elements sharing one top degree.
#[derive(Debug, Clone)]
pub struct Stretch {
    /// State at the first element of the stretch.
    pub start: MultiplicitySequence,
    /// Top degree throughout the stretch.
    pub level: u32,
    /// Number of chain elements covered (equals the number of derivation
    /// steps taken to leave the stretch).
    pub steps: BigUint,
}

impl Stretch {
    /// Closed-form state after `t` derivation steps from the stretch start,
    /// valid for `0 <= t <= steps`. At `t = steps` the result is the start
    /// state of the next stretch (or empty).
    ///
    /// Writing `v = start`, `D = level`, the affine step `v -> Av + b` with
    /// the suffix-sum matrix `A` iterates to
    /// `v(t) = A^t v + (sum of A^s for s < t) b`, and powers of `A` have
    /// binomial entries `C(t - 1 + j - k, j - k)`.
    pub fn state_at(&self, t: &BigUint) -> MultiplicitySequence {
        assert!(t <= &self.steps, "state_at beyond the stretch");
        if self.level == 1 {
            return if t.is_zero() {
                self.start.clone()
            } else {
                MultiplicitySequence::empty()
            };
        }
        let d = self.level as usize;
        let t_int = BigInt::from(t.clone());
        let v: Vec<BigInt> = (0..d)
            .map(|k| BigInt::from(self.start.get(k as u32 + 1)))
            .collect();
        let mut out = Vec::with_capacity(d);
        for k in 1..=d {
            // Propagated start state: sum over u of C(t-1+u, u) v[k+u].
            let mut acc = BigInt::zero();
            for u in 0..=(d - k) {
                let c = binomial(&(&t_int - 1 + BigInt::from(u)), u as u64);
                acc += c * &v[k + u - 1];
            }
            // Accumulated removals at the top two levels.
            if k < d {
                let u1 = (d - 1 - k) as u64;
                acc -= binomial(&(&t_int - 1 + BigInt::from(u1)), u1 + 1);
                if k == d - 1 {
                    acc -= 1;
                }
            }
            let u2 = (d - k) as u64;
            acc -= binomial(&(&t_int - 1 + BigInt::from(u2)), u2 + 1);
            if k == d {
                acc -= 1;
            }
            // At t = 0 the removal terms cancel exactly.
            assert!(!acc.is_negative(), "closed form must stay nonnegative");
            out.push(acc.to_biguint().expect("nonnegative"));
        }
        MultiplicitySequence::new(out)
    }
}

/// Iterator over the maximal stretches of a derivation chain.
pub struct Stretches {
    state: MultiplicitySequence,
}

impl Iterator for Stretches {
    type Item = Stretch;

    fn next(&mut self) -> Option<Self::Item> {
        let d = self.state.top_degree()?;
        if d == 1 {
            let start = std::mem::replace(&mut self.state, MultiplicitySequence::empty());
            return Some(Stretch {
                start,
                level: 1,
                steps: BigUint::one(),
            });
        }
        let steps = self.state.get(d);
        let stretch = Stretch {
            start: self.state.clone(),
            level: d,
            steps: steps.clone(),
        };
        self.state = stretch.state_at(&steps);
        Some(stretch)
    }
}

/// Number of chain elements from `mu` down to and including the empty
/// sequence, computed without walking the chain.
pub fn chain_length(mu: &MultiplicitySequence) -> BigUint {
    let mut total = BigUint::one();
    for stretch in mu.stretches() {
        total += stretch.steps;
    }
    total
}
