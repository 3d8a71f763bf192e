//! Explicit hypersurface geometry over exact fields: graded expansions of a
//! form around a point of its zero locus, restrictions to lines through that
//! point, tangency locus equations, and the residual-intersection map that
//! sends a line meeting the hypersurface to order `d - 1` to its remaining
//! intersection point.
//!
//! Everything here is exact. Coefficients live in the rationals or in a prime
//! field with modulus below `2^31`, polynomials are sparse homogeneous forms,
//! and every derived object records the coordinate change that produced it so
//! results can be mapped back and re-checked against the original form.

pub mod sample;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{BigInt, BigRational};

/// Hard cap on the dense monomial count `C(n + d, d)` of any polynomial this
/// module will construct, to keep substitution blow-ups bounded.
pub const MAX_DENSE_TERMS: u64 = 1_000_000;

/// Errors from geometric constructions and their input validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("expected {expected} coordinates or variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("a projective point needs at least one nonzero coordinate")]
    ZeroPoint,
    #[error("the base point does not lie on the hypersurface")]
    PointOffHypersurface,
    #[error("graded expansion needs degree at least 2 (got {degree})")]
    DegreeTooSmall { degree: u32 },
    #[error("tangency order {k} outside the valid range 1..={max}")]
    OrderOutOfRange { k: u32, max: u32 },
    #[error("direction violates the degree-{degree} tangency equation, so it is not in the penultimate locus")]
    NotPenultimateTangent { degree: u32 },
    #[error("the whole line lies on the hypersurface; no residual point exists")]
    LineOnHypersurface,
    #[error("dense monomial count exceeds the cap of {cap}")]
    TooManyTerms { cap: u64 },
    #[error("malformed term: {0}")]
    MalformedTerm(String),
    #[error("cannot parse {0:?} as a field element")]
    BadElement(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported bound 2^31")]
    ModulusTooLarge(u64),
}

/// An exact field of coefficients, passed by reference to every arithmetic
/// operation. Elements carry no field context of their own, so a prime field
/// can use bare machine integers.
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` exactly for the zero element.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn embed_int(&self, v: i64) -> Self::Elem;
    fn render(&self, a: &Self::Elem) -> String;
    fn parse(&self, text: &str) -> Result<Self::Elem, GeometryError>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn pow(&self, a: &Self::Elem, e: u32) -> Self::Elem {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Index of the coordinate used as the pivot of a coordinate change.
    /// Defaults to the first nonzero coordinate; fields with an archimedean
    /// absolute value can override it to pick a numerically robust pivot.
    fn pivot_index(&self, coords: &[Self::Elem]) -> Option<usize> {
        coords.iter().position(|c| !self.is_zero(c))
    }
}

/// The field of rational numbers with arbitrary-precision arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn embed_int(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn parse(&self, text: &str) -> Result<BigRational, GeometryError> {
        let bad = || GeometryError::BadElement(text.to_string());
        let text = text.trim();
        match text.split_once('/') {
            Some((num, den)) => {
                let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(num, den))
            }
            None => {
                let num = BigInt::from_str(text).map_err(|_| bad())?;
                Ok(BigRational::from_integer(num))
            }
        }
    }

    /// Largest absolute value, so the pivot division stays well scaled.
    fn pivot_index(&self, coords: &[BigRational]) -> Option<usize> {
        let mut best: Option<(usize, BigRational)> = None;
        for (i, c) in coords.iter().enumerate() {
            let mag = c.abs();
            if mag.is_zero() {
                continue;
            }
            match &best {
                Some((_, largest)) if mag <= *largest => {}
                _ => best = Some((i, mag)),
            }
        }
        best.map(|(i, _)| i)
    }
}

/// A prime field `Z/p` with `p <= 2^31`, elements stored as reduced `u64`
/// residues so scanning loops stay allocation free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, GeometryError> {
        if p > 1 << 31 {
            return Err(GeometryError::ModulusTooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(GeometryError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Reduce an arbitrary machine integer into the field.
    pub fn element(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2) inverts a modulo the prime p.
        let mut base = *a;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        Some(acc)
    }

    fn embed_int(&self, v: i64) -> u64 {
        self.element(v)
    }

    fn render(&self, a: &u64) -> String {
        a.to_string()
    }

    fn parse(&self, text: &str) -> Result<u64, GeometryError> {
        let v =
            i128::from_str(text.trim()).map_err(|_| GeometryError::BadElement(text.to_string()))?;
        Ok(v.rem_euclid(self.p as i128) as u64)
    }
}

/// A point of projective space: at least one nonzero coordinate, compared up
/// to a common scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint<F: Field> {
    coords: Vec<F::Elem>,
}

impl<F: Field> ProjectivePoint<F> {
    pub fn new(field: &F, coords: Vec<F::Elem>) -> Result<Self, GeometryError> {
        if coords.iter().all(|c| field.is_zero(c)) {
            return Err(GeometryError::ZeroPoint);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[F::Elem] {
        &self.coords
    }

    pub fn dim_ambient(&self) -> usize {
        self.coords.len()
    }

    /// Equality in projective space: all two-by-two minors of the coordinate
    /// matrix vanish.
    pub fn eq_projective(&self, field: &F, other: &Self) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        for i in 0..self.coords.len() {
            for j in (i + 1)..self.coords.len() {
                let lhs = field.mul(&self.coords[i], &other.coords[j]);
                let rhs = field.mul(&self.coords[j], &other.coords[i]);
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }

    /// Scale so the first nonzero coordinate is one.
    pub fn normalized(&self, field: &F) -> Vec<F::Elem> {
        let lead = self
            .coords
            .iter()
            .find(|c| !field.is_zero(c))
            .expect("invariant: some coordinate is nonzero");
        let scale = field
            .inv(lead)
            .expect("invariant: leading coordinate inverts");
        self.coords.iter().map(|c| field.mul(c, &scale)).collect()
    }

    pub fn render(&self, field: &F) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| field.render(c)).collect();
        format!("({})", parts.join(" : "))
    }
}

/// A sparse homogeneous form: every recorded exponent vector sums to the
/// declared degree and no stored coefficient is zero.
#[derive(Debug, PartialEq, Eq)]
pub struct HomogeneousPoly<F: Field> {
    nvars: usize,
    degree: u32,
    terms: BTreeMap<Vec<u16>, F::Elem>,
}

// Manual impl: the derive would demand `F: Clone`, but only elements are stored.
impl<F: Field> Clone for HomogeneousPoly<F> {
    fn clone(&self) -> Self {
        HomogeneousPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms: self.terms.clone(),
        }
    }
}

fn dense_size_guard(nvars: usize, degree: u32) -> Result<(), GeometryError> {
    // C(nvars - 1 + degree, degree) counts monomials of the given degree.
    let n = nvars.saturating_sub(1) as u128;
    let mut count: u128 = 1;
    for i in 1..=degree as u128 {
        count = count * (n + i) / i;
        if count > MAX_DENSE_TERMS as u128 {
            return Err(GeometryError::TooManyTerms {
                cap: MAX_DENSE_TERMS,
            });
        }
    }
    Ok(())
}

impl<F: Field> HomogeneousPoly<F> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomogeneousPoly {
            nvars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn new(
        field: &F,
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Vec<u16>, F::Elem)>,
    ) -> Result<Self, GeometryError> {
        dense_size_guard(nvars, degree)?;
        let mut map: BTreeMap<Vec<u16>, F::Elem> = BTreeMap::new();
        for (exps, coeff) in terms {
            if exps.len() != nvars {
                return Err(GeometryError::MalformedTerm(format!(
                    "exponent vector {exps:?} needs {nvars} entries"
                )));
            }
            let total: u64 = exps.iter().map(|&e| e as u64).sum();
            if total != degree as u64 {
                return Err(GeometryError::MalformedTerm(format!(
                    "exponents {exps:?} sum to {total}, expected degree {degree}"
                )));
            }
            let entry = match map.remove(&exps) {
                Some(existing) => field.add(&existing, &coeff),
                None => coeff,
            };
            if field.is_zero(&entry) {
                continue;
            }
            map.insert(exps, entry);
        }
        Ok(HomogeneousPoly {
            nvars,
            degree,
            terms: map,
        })
    }

    /// The monomial `c * x_k^degree`.
    pub fn monomial(
        field: &F,
        nvars: usize,
        degree: u32,
        k: usize,
        coeff: F::Elem,
    ) -> Result<Self, GeometryError> {
        let mut exps = vec![0u16; nvars];
        exps[k] = degree as u16;
        HomogeneousPoly::new(field, nvars, degree, [(exps, coeff)])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &F::Elem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u16]) -> Option<&F::Elem> {
        self.terms.get(exps)
    }

    pub fn eval(&self, field: &F, point: &[F::Elem]) -> Result<F::Elem, GeometryError> {
        if point.len() != self.nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut total = field.zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (x, &e) in point.iter().zip(exps) {
                if e > 0 {
                    term = field.mul(&term, &field.pow(x, e as u32));
                }
            }
            total = field.add(&total, &term);
        }
        Ok(total)
    }

    pub fn add(&self, field: &F, other: &Self) -> Result<Self, GeometryError> {
        if self.nvars != other.nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        if self.degree != other.degree {
            return Err(GeometryError::MalformedTerm(format!(
                "cannot add forms of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut terms = self.terms.clone();
        for (exps, coeff) in &other.terms {
            let entry = match terms.remove(exps) {
                Some(existing) => field.add(&existing, coeff),
                None => coeff.clone(),
            };
            if !field.is_zero(&entry) {
                terms.insert(exps.clone(), entry);
            }
        }
        Ok(HomogeneousPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms,
        })
    }

    pub fn scale(&self, field: &F, c: &F::Elem) -> Self {
        if field.is_zero(c) {
            return HomogeneousPoly::zero(self.nvars, self.degree);
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| (e.clone(), field.mul(v, c)))
            .filter(|(_, v)| !field.is_zero(v))
            .collect();
        HomogeneousPoly {
            nvars: self.nvars,
            degree: self.degree,
            terms,
        }
    }

    pub fn mul(&self, field: &F, other: &Self) -> Result<Self, GeometryError> {
        if self.nvars != other.nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        let degree = self.degree + other.degree;
        dense_size_guard(self.nvars, degree)?;
        let mut terms: BTreeMap<Vec<u16>, F::Elem> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let prod = field.mul(ca, cb);
                let entry = match terms.remove(&exps) {
                    Some(existing) => field.add(&existing, &prod),
                    None => prod,
                };
                if !field.is_zero(&entry) {
                    terms.insert(exps, entry);
                }
            }
        }
        Ok(HomogeneousPoly {
            nvars: self.nvars,
            degree,
            terms,
        })
    }

    /// Substitute `x_i = sum_j rows[i][j] * y_j`, a linear change into
    /// `out_vars` new variables. The result is homogeneous of the same degree.
    pub fn substitute_linear(
        &self,
        field: &F,
        rows: &[Vec<F::Elem>],
        out_vars: usize,
    ) -> Result<Self, GeometryError> {
        if rows.len() != self.nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.nvars,
                got: rows.len(),
            });
        }
        for row in rows {
            if row.len() != out_vars {
                return Err(GeometryError::DimensionMismatch {
                    expected: out_vars,
                    got: row.len(),
                });
            }
        }
        dense_size_guard(out_vars, self.degree)?;
        let images: Vec<HomogeneousPoly<F>> = rows
            .iter()
            .map(|row| {
                let terms = row.iter().enumerate().map(|(j, c)| {
                    let mut exps = vec![0u16; out_vars];
                    exps[j] = 1;
                    (exps, c.clone())
                });
                HomogeneousPoly::new(field, out_vars, 1, terms)
            })
            .collect::<Result<_, _>>()?;
        let mut total = HomogeneousPoly::zero(out_vars, self.degree);
        for (exps, coeff) in &self.terms {
            let mut prod =
                HomogeneousPoly::new(field, out_vars, 0, [(vec![0u16; out_vars], coeff.clone())])?;
            for (image, &e) in images.iter().zip(exps) {
                for _ in 0..e {
                    prod = prod.mul(field, image)?;
                }
            }
            total = total.add(field, &prod)?;
        }
        Ok(total)
    }

    /// Collect by the exponent of the last variable: entry `j` of the result
    /// is the coefficient of `x_{n-1}^j`, a form of degree `degree - j` in the
    /// remaining variables.
    pub fn split_last_var(&self) -> Vec<HomogeneousPoly<F>> {
        assert!(self.nvars >= 1, "invariant: split needs a variable");
        let mut parts: Vec<HomogeneousPoly<F>> = (0..=self.degree)
            .map(|j| HomogeneousPoly::zero(self.nvars - 1, self.degree - j))
            .collect();
        for (exps, coeff) in &self.terms {
            let j = exps[self.nvars - 1] as usize;
            let rest = exps[..self.nvars - 1].to_vec();
            parts[j].terms.insert(rest, coeff.clone());
        }
        parts
    }

    /// Multiply by `x_new^e` where `x_new` is a fresh last variable.
    pub fn times_new_last_var(&self, e: u16) -> HomogeneousPoly<F> {
        let terms = self
            .terms
            .iter()
            .map(|(exps, coeff)| {
                let mut exps = exps.clone();
                exps.push(e);
                (exps, coeff.clone())
            })
            .collect();
        HomogeneousPoly {
            nvars: self.nvars + 1,
            degree: self.degree + e as u32,
            terms,
        }
    }

    pub fn render(&self, field: &F, var: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut pieces = Vec::new();
        for (exps, coeff) in &self.terms {
            let mut factors = vec![format!("({})", field.render(coeff))];
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("{var}{i}")),
                    _ => factors.push(format!("{var}{i}^{e}")),
                }
            }
            pieces.push(factors.join("*"));
        }
        pieces.join(" + ")
    }
}

/// The expansion of a degree-`d` form around a point `z` of its zero locus,
/// in coordinates where `z` becomes the last basis point: the list of forms
/// `f_1, ..., f_d` with `f_i` homogeneous of degree `i` in the `n` chart
/// variables, together with the coordinate change that was applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedExpansion<F: Field> {
    chart_vars: usize,
    degree: u32,
    pieces: Vec<HomogeneousPoly<F>>,
    change: Vec<Vec<F::Elem>>,
}

impl<F: Field> GradedExpansion<F> {
    /// Expand `f` around `z`, which must satisfy `f(z) = 0` exactly and have
    /// `deg f >= 2`. The coordinate change sends the last new basis point to
    /// `z` by placing `z` in the pivot column; its matrix is recorded so
    /// results can be mapped back.
    pub fn expand_at_point(
        field: &F,
        f: &HomogeneousPoly<F>,
        z: &ProjectivePoint<F>,
    ) -> Result<Self, GeometryError> {
        let nvars = f.nvars();
        if z.coords().len() != nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: nvars,
                got: z.coords().len(),
            });
        }
        if f.degree() < 2 {
            return Err(GeometryError::DegreeTooSmall { degree: f.degree() });
        }
        if !field.is_zero(&f.eval(field, z.coords())?) {
            return Err(GeometryError::PointOffHypersurface);
        }
        let pivot = field
            .pivot_index(z.coords())
            .expect("invariant: projective point has a nonzero coordinate");
        let n = nvars - 1;
        // Columns: the standard basis vectors away from the pivot, then z
        // itself. Invertible because the pivot coordinate is nonzero.
        let mut change = vec![vec![field.zero(); nvars]; nvars];
        for (j, i) in (0..nvars).filter(|&i| i != pivot).enumerate() {
            change[i][j] = field.one();
        }
        for (i, zi) in z.coords().iter().enumerate() {
            change[i][n] = zi.clone();
        }
        let g = f.substitute_linear(field, &change, nvars)?;
        let mut parts = g.split_last_var();
        debug_assert!(
            parts[f.degree() as usize].is_zero(),
            "invariant: constant part vanishes because f(z) = 0"
        );
        // parts[j] multiplies y_n^j, so the degree-i piece sits at j = d - i.
        let mut pieces = Vec::with_capacity(f.degree() as usize);
        for i in 1..=f.degree() {
            pieces.push(std::mem::replace(
                &mut parts[(f.degree() - i) as usize],
                HomogeneousPoly::zero(n, 0),
            ));
        }
        Ok(GradedExpansion {
            chart_vars: n,
            degree: f.degree(),
            pieces,
            change,
        })
    }

    /// Number of chart variables `n` (one less than the ambient count).
    pub fn chart_vars(&self) -> usize {
        self.chart_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The degree-`i` component, for `1 <= i <= degree`.
    pub fn piece(&self, i: u32) -> &HomogeneousPoly<F> {
        assert!((1..=self.degree).contains(&i), "piece index out of range");
        &self.pieces[(i - 1) as usize]
    }

    pub fn pieces(&self) -> &[HomogeneousPoly<F>] {
        &self.pieces
    }

    pub fn change_matrix(&self) -> &[Vec<F::Elem>] {
        &self.change
    }

    /// Map a point in the expansion coordinates back to the original ones.
    pub fn apply_change(&self, field: &F, y: &[F::Elem]) -> Result<Vec<F::Elem>, GeometryError> {
        let nvars = self.chart_vars + 1;
        if y.len() != nvars {
            return Err(GeometryError::DimensionMismatch {
                expected: nvars,
                got: y.len(),
            });
        }
        Ok(self
            .change
            .iter()
            .map(|row| {
                let mut acc = field.zero();
                for (c, v) in row.iter().zip(y) {
                    acc = field.add(&acc, &field.mul(c, v));
                }
                acc
            })
            .collect())
    }

    /// Rebuild `sum_i f_i * y_n^(d - i)`, which must equal the original form
    /// after the recorded coordinate change.
    pub fn reassembled(&self, field: &F) -> Result<HomogeneousPoly<F>, GeometryError> {
        let mut total = HomogeneousPoly::zero(self.chart_vars + 1, self.degree);
        for (idx, piece) in self.pieces.iter().enumerate() {
            let i = idx as u32 + 1;
            total = total.add(field, &piece.times_new_last_var((self.degree - i) as u16))?;
        }
        Ok(total)
    }

    /// Evaluate each graded piece along the direction `y`: the tuple
    /// `(f_1(y), ..., f_d(y))` of coefficients of the restriction of the form
    /// to the line through the base point with direction `y`.
    pub fn restrict_to_line(
        &self,
        field: &F,
        y: &ProjectivePoint<F>,
    ) -> Result<Vec<F::Elem>, GeometryError> {
        if y.coords().len() != self.chart_vars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.chart_vars,
                got: y.coords().len(),
            });
        }
        self.pieces
            .iter()
            .map(|piece| piece.eval(field, y.coords()))
            .collect()
    }

    /// Coefficients `c_0, ..., c_d` of the binary form `g(s*y, t)` in `s^i
    /// t^(d-i)`, computed by a full symbolic substitution. Independent
    /// cross-check of [`Self::restrict_to_line`]: `c_0 = 0` and `c_i =
    /// f_i(y)`.
    pub fn line_binary_form(
        &self,
        field: &F,
        y: &ProjectivePoint<F>,
    ) -> Result<Vec<F::Elem>, GeometryError> {
        if y.coords().len() != self.chart_vars {
            return Err(GeometryError::DimensionMismatch {
                expected: self.chart_vars,
                got: y.coords().len(),
            });
        }
        let g = self.reassembled(field)?;
        let mut rows: Vec<Vec<F::Elem>> = y
            .coords()
            .iter()
            .map(|c| vec![c.clone(), field.zero()])
            .collect();
        rows.push(vec![field.zero(), field.one()]);
        let binary = g.substitute_linear(field, &rows, 2)?;
        let coeffs = (0..=self.degree)
            .map(|i| {
                let exps = vec![i as u16, (self.degree - i) as u16];
                binary
                    .coefficient(&exps)
                    .cloned()
                    .unwrap_or_else(|| field.zero())
            })
            .collect();
        Ok(coeffs)
    }

    /// Intersection multiplicity of the line through the base point with
    /// direction `y`: the least `i` with `f_i(y)` nonzero, or `None` when the
    /// line lies on the hypersurface.
    pub fn tangency_order(
        &self,
        field: &F,
        y: &ProjectivePoint<F>,
    ) -> Result<Option<u32>, GeometryError> {
        let values = self.restrict_to_line(field, y)?;
        Ok(values
            .iter()
            .position(|v| !field.is_zero(v))
            .map(|idx| idx as u32 + 1))
    }

    /// Equations cutting out the directions whose line meets the hypersurface
    /// to order at least `k` at the base point: the forms `f_1, ..., f_{k-1}`.
    /// Valid for `1 <= k <= degree + 1`; `k = 1` imposes nothing and
    /// `k = degree + 1` cuts out the lines inside the hypersurface.
    pub fn tangency_locus_equations(
        &self,
        k: u32,
    ) -> Result<Vec<HomogeneousPoly<F>>, GeometryError> {
        if k < 1 || k > self.degree + 1 {
            return Err(GeometryError::OrderOutOfRange {
                k,
                max: self.degree + 1,
            });
        }
        Ok(self.pieces[..(k - 1) as usize].to_vec())
    }

    /// The residual intersection point of the line with direction `y`, for a
    /// direction in the penultimate tangency locus: requires `f_i(y) = 0` for
    /// `i <= d - 2`, and errors as indeterminate when `f_{d-1}(y)` and
    /// `f_d(y)` both vanish (the line lies on the hypersurface). Coordinates
    /// are in the expansion chart:
    /// `(y_0 f_{d-1}(y) : ... : y_{n-1} f_{d-1}(y) : -f_d(y))`.
    pub fn residual_point(
        &self,
        field: &F,
        y: &ProjectivePoint<F>,
    ) -> Result<ProjectivePoint<F>, GeometryError> {
        let values = self.restrict_to_line(field, y)?;
        for i in 1..=self.degree.saturating_sub(2) {
            if !field.is_zero(&values[(i - 1) as usize]) {
                return Err(GeometryError::NotPenultimateTangent { degree: i });
            }
        }
        let a = &values[(self.degree - 2) as usize];
        let b = &values[(self.degree - 1) as usize];
        if field.is_zero(a) && field.is_zero(b) {
            return Err(GeometryError::LineOnHypersurface);
        }
        let mut coords: Vec<F::Elem> = y.coords().iter().map(|yi| field.mul(yi, a)).collect();
        coords.push(field.neg(b));
        ProjectivePoint::new(field, coords)
    }
}

/// One monomial of a serialized polynomial: an exponent vector and a
/// coefficient, written either as an integer or as a string such as `"3/4"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u16>,
    pub coefficient: CoeffText,
}

/// Coefficient wire format: integers stay numbers, everything else is text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffText {
    Int(i64),
    Text(String),
}

impl CoeffText {
    fn as_text(&self) -> String {
        match self {
            CoeffText::Int(v) => v.to_string(),
            CoeffText::Text(s) => s.clone(),
        }
    }
}

/// Assemble a polynomial from serialized terms, inferring the variable count
/// and degree, which must be consistent across all records.
pub fn poly_from_records<F: Field>(
    field: &F,
    records: &[TermRecord],
) -> Result<HomogeneousPoly<F>, GeometryError> {
    let first = records
        .first()
        .ok_or_else(|| GeometryError::MalformedTerm("empty term list".to_string()))?;
    let nvars = first.exponents.len();
    let degree: u64 = first.exponents.iter().map(|&e| e as u64).sum();
    if degree > u32::MAX as u64 {
        return Err(GeometryError::MalformedTerm("degree too large".to_string()));
    }
    let mut terms = Vec::with_capacity(records.len());
    for record in records {
        let coeff = field.parse(&record.coefficient.as_text())?;
        terms.push((record.exponents.clone(), coeff));
    }
    HomogeneousPoly::new(field, nvars, degree as u32, terms)
}

/// Serialize a polynomial as a list of term records with text coefficients.
pub fn poly_to_records<F: Field>(field: &F, poly: &HomogeneousPoly<F>) -> Vec<TermRecord> {
    poly.terms()
        .map(|(exps, coeff)| TermRecord {
            exponents: exps.to_vec(),
            coefficient: CoeffText::Text(field.render(coeff)),
        })
        .collect()
}
