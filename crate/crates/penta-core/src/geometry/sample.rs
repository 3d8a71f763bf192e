//! Randomized search for prime-field points on penultimate tangency loci,
//! plus generation of random pointed hypersurfaces for bulk testing.
//!
//! The locus is cut out by the graded pieces `f_1, ..., f_{d-2}`. The search
//! first parametrizes the hyperplane `f_1 = 0`, then scans projective lines
//! in that hyperplane: one quadratic constraint is scanned directly, and a
//! quadratic plus cubic pair is handled by parametrizing the quadric from one
//! of its points and scanning the pulled-back cubic. Every candidate is
//! re-checked against all locus equations before it is returned, so the
//! output is always correct even where a search heuristic does not apply.

use std::collections::HashSet;

use rand::Rng;

use super::{Field, GeometryError, GradedExpansion, HomogeneousPoly, PrimeField, ProjectivePoint};

/// Projective line scans attempted per search stage before giving up.
const SCAN_ATTEMPTS: usize = 24;

/// A polynomial flattened to plain machine words for fast scanning loops.
struct DenseForm {
    terms: Vec<(Vec<u16>, u64)>,
}

impl DenseForm {
    fn new(poly: &HomogeneousPoly<PrimeField>) -> Self {
        DenseForm {
            terms: poly.terms().map(|(e, c)| (e.to_vec(), *c)).collect(),
        }
    }

    fn eval(&self, field: &PrimeField, point: &[u64]) -> u64 {
        let mut total = 0u64;
        for (exps, coeff) in &self.terms {
            let mut term = *coeff;
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    term = field.mul(&term, x);
                }
            }
            total = field.add(&total, &term);
        }
        total
    }
}

/// Linear parametrization of the hyperplane `f_1 = 0` (or of the whole space
/// when `f_1` is the zero form): maps domain coordinates `w` to chart
/// coordinates `y`.
struct HyperplaneChart {
    /// Domain coordinate count; the domain is projective of dimension one less.
    domain_vars: usize,
    /// Chart index solved for, with the scaled coefficients of the others.
    solved: Option<(usize, Vec<u64>)>,
    chart_vars: usize,
}

impl HyperplaneChart {
    fn new(field: &PrimeField, f1: &HomogeneousPoly<PrimeField>) -> Self {
        let chart_vars = f1.nvars();
        let mut coeffs = vec![0u64; chart_vars];
        for (exps, c) in f1.terms() {
            let i = exps
                .iter()
                .position(|&e| e == 1)
                .expect("invariant: linear form has unit exponents");
            coeffs[i] = *c;
        }
        match coeffs.iter().position(|&c| c != 0) {
            None => HyperplaneChart {
                domain_vars: chart_vars,
                solved: None,
                chart_vars,
            },
            Some(pivot) => {
                let inv = field
                    .inv(&coeffs[pivot])
                    .expect("invariant: pivot is nonzero");
                let scaled: Vec<u64> = (0..chart_vars)
                    .filter(|&i| i != pivot)
                    .map(|i| field.mul(&coeffs[i], &inv))
                    .collect();
                HyperplaneChart {
                    domain_vars: chart_vars - 1,
                    solved: Some((pivot, scaled)),
                    chart_vars,
                }
            }
        }
    }

    fn embed(&self, field: &PrimeField, w: &[u64]) -> Vec<u64> {
        match &self.solved {
            None => w.to_vec(),
            Some((pivot, scaled)) => {
                let mut y = vec![0u64; self.chart_vars];
                let mut acc = 0u64;
                let mut slot = 0;
                for (i, yi) in y.iter_mut().enumerate() {
                    if i == *pivot {
                        continue;
                    }
                    *yi = w[slot];
                    acc = field.add(&acc, &field.mul(&scaled[slot], &w[slot]));
                    slot += 1;
                }
                y[*pivot] = field.neg(&acc);
                y
            }
        }
    }
}

fn random_nonzero_vec<R: Rng + ?Sized>(field: &PrimeField, len: usize, rng: &mut R) -> Vec<u64> {
    loop {
        let v: Vec<u64> = (0..len)
            .map(|_| rng.random_range(0..field.modulus()))
            .collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

fn add_scaled(field: &PrimeField, a: &[u64], b: &[u64], t: u64) -> Vec<u64> {
    a.iter()
        .zip(b)
        .map(|(ai, bi)| field.add(ai, &field.mul(&t, bi)))
        .collect()
}

/// Visit every point of the projective line spanned by `a` and `b`.
fn scan_line<F>(field: &PrimeField, a: &[u64], b: &[u64], mut visit: F) -> bool
where
    F: FnMut(Vec<u64>) -> bool,
{
    for t in 0..field.modulus() {
        if visit(add_scaled(field, a, b, t)) {
            return true;
        }
    }
    visit(b.to_vec())
}

/// Collects verified locus points up to a budget, deduplicating projectively.
struct Collector<'f> {
    field: &'f PrimeField,
    equations: Vec<DenseForm>,
    budget: usize,
    seen: HashSet<Vec<u64>>,
    found: Vec<ProjectivePoint<PrimeField>>,
}

impl<'f> Collector<'f> {
    fn full(&self) -> bool {
        self.found.len() >= self.budget
    }

    /// Accept a chart candidate if it is a new projective point on the whole
    /// locus. Returns whether the budget is now full.
    fn offer(&mut self, y: Vec<u64>) -> bool {
        if self.full() || y.iter().all(|&c| c == 0) {
            return self.full();
        }
        if self.equations.iter().any(|eq| eq.eval(self.field, &y) != 0) {
            return false;
        }
        let point =
            ProjectivePoint::new(self.field, y).expect("invariant: candidate was checked nonzero");
        if self.seen.insert(point.normalized(self.field)) {
            self.found.push(point);
        }
        self.full()
    }
}

/// Search for points on the penultimate tangency locus of an expansion over a
/// prime field, scanning with the supplied random source. Returns at most
/// `budget` points, possibly fewer or none: a miss is not an error, and every
/// returned point exactly satisfies all locus equations.
pub fn sample_penta_points<R: Rng + ?Sized>(
    field: &PrimeField,
    exp: &GradedExpansion<PrimeField>,
    budget: usize,
    rng: &mut R,
) -> Vec<ProjectivePoint<PrimeField>> {
    let n = exp.chart_vars();
    let eq_count = exp.degree().saturating_sub(2) as usize;
    let mut collector = Collector {
        field,
        equations: exp.pieces()[..eq_count]
            .iter()
            .map(DenseForm::new)
            .collect(),
        budget,
        seen: HashSet::new(),
        found: Vec::new(),
    };
    if budget == 0 || n == 0 {
        return collector.found;
    }

    if eq_count == 0 {
        for _ in 0..(SCAN_ATTEMPTS * budget.max(1) + 64) {
            if collector.offer(random_nonzero_vec(field, n, rng)) {
                break;
            }
        }
        return collector.found;
    }

    let chart = HyperplaneChart::new(field, &exp.pieces()[0]);
    let m = chart.domain_vars;
    if m == 0 {
        return collector.found;
    }
    // Constraints beyond the hyperplane, in increasing degree; identically
    // zero pieces impose nothing.
    let rest: Vec<DenseForm> = exp.pieces()[1..eq_count]
        .iter()
        .filter(|p| !p.is_zero())
        .map(DenseForm::new)
        .collect();
    let rest_vanish = |field: &PrimeField, y: &[u64]| rest.iter().all(|g| g.eval(field, y) == 0);

    if rest.is_empty() {
        for _ in 0..(SCAN_ATTEMPTS * budget.max(1) + 64) {
            let w = random_nonzero_vec(field, m, rng);
            if collector.offer(chart.embed(field, &w)) {
                break;
            }
        }
        return collector.found;
    }

    if m == 1 {
        collector.offer(chart.embed(field, &[1]));
        return collector.found;
    }

    if m == 2 {
        // The domain is a projective line: enumerate it outright.
        let a = vec![1, 0];
        let b = vec![0, 1];
        scan_line(field, &a, &b, |w| {
            let y = chart.embed(field, &w);
            rest_vanish(field, &y) && collector.offer(y)
        });
        return collector.found;
    }

    if rest.len() == 1 {
        // One constraint on a projective space: scan random lines.
        for _ in 0..SCAN_ATTEMPTS {
            let a = random_nonzero_vec(field, m, rng);
            let b = random_nonzero_vec(field, m, rng);
            let done = scan_line(field, &a, &b, |w| {
                let y = chart.embed(field, &w);
                rest_vanish(field, &y) && collector.offer(y)
            });
            if done {
                break;
            }
        }
        return collector.found;
    }

    if rest.len() == 2
        && rest[0]
            .terms
            .iter()
            .all(|(e, _)| e.iter().sum::<u16>() == 2)
    {
        // Quadratic plus higher constraint: parametrize the quadric
        // stereographically from one of its points, then scan the remaining
        // constraint through that parametrization.
        let q = |w: &[u64]| rest[0].eval(field, &chart.embed(field, w));
        let mut anchor = None;
        'anchor: for _ in 0..SCAN_ATTEMPTS {
            let a = random_nonzero_vec(field, m, rng);
            let b = random_nonzero_vec(field, m, rng);
            let mut hit = None;
            scan_line(field, &a, &b, |w| {
                if q(&w) == 0 && w.iter().any(|&c| c != 0) {
                    hit = Some(w);
                    true
                } else {
                    false
                }
            });
            if let Some(w) = hit {
                anchor = Some(w);
                break 'anchor;
            }
        }
        let Some(q0) = anchor else {
            return collector.found;
        };
        // B(u, v) = q(u + v) - q(u) - q(v) polarizes q, and
        // psi(w) = q(w) q0 - B(q0, w) w lands on the quadric.
        let psi = |w: &[u64]| -> Vec<u64> {
            let sum: Vec<u64> = q0.iter().zip(w).map(|(u, v)| field.add(u, v)).collect();
            let qw = q(w);
            let bw = field.sub(&q(&sum), &qw);
            q0.iter()
                .zip(w)
                .map(|(u, v)| field.sub(&field.mul(&qw, u), &field.mul(&bw, v)))
                .collect()
        };
        for _ in 0..SCAN_ATTEMPTS {
            let a = random_nonzero_vec(field, m, rng);
            let b = random_nonzero_vec(field, m, rng);
            let done = scan_line(field, &a, &b, |w| {
                let v = psi(&w);
                if v.iter().all(|&c| c == 0) {
                    return false;
                }
                let y = chart.embed(field, &v);
                debug_assert_eq!(rest[0].eval(field, &y), 0);
                rest_vanish(field, &y) && collector.offer(y)
            });
            if done {
                break;
            }
        }
        return collector.found;
    }

    // No structured route: scan lines against all constraints at once. This
    // rarely succeeds, which is fine; an empty result is a valid answer.
    for _ in 0..SCAN_ATTEMPTS {
        let a = random_nonzero_vec(field, m, rng);
        let b = random_nonzero_vec(field, m, rng);
        let done = scan_line(field, &a, &b, |w| {
            let y = chart.embed(field, &w);
            rest_vanish(field, &y) && collector.offer(y)
        });
        if done {
            break;
        }
    }
    collector.found
}

fn exponent_vectors(nvars: usize, degree: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(nvars);
    fn go(
        remaining_vars: usize,
        remaining_degree: u16,
        prefix: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if remaining_vars == 1 {
            prefix.push(remaining_degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in 0..=remaining_degree {
            prefix.push(e);
            go(remaining_vars - 1, remaining_degree - e, prefix, out);
            prefix.pop();
        }
    }
    go(nvars, degree, &mut prefix, &mut out);
    out
}

/// Draw a dense random form of the given degree together with a random point
/// of its zero locus: the form is corrected by a monomial at a unit
/// coordinate of the point, so the incidence is exact by construction.
pub fn random_pointed_hypersurface<R: Rng + ?Sized>(
    field: &PrimeField,
    nvars: usize,
    degree: u32,
    rng: &mut R,
) -> Result<(HomogeneousPoly<PrimeField>, ProjectivePoint<PrimeField>), GeometryError> {
    let exps = exponent_vectors(nvars, degree as u16);
    loop {
        let k = rng.random_range(0..nvars);
        let mut coords: Vec<u64> = (0..nvars)
            .map(|_| rng.random_range(0..field.modulus()))
            .collect();
        coords[k] = 1;
        let raw = HomogeneousPoly::new(
            field,
            nvars,
            degree,
            exps.iter()
                .map(|e| (e.clone(), rng.random_range(0..field.modulus()))),
        )?;
        let value = raw.eval(field, &coords)?;
        let fix = HomogeneousPoly::monomial(field, nvars, degree, k, field.neg(&value))?;
        let f = raw.add(field, &fix)?;
        if f.is_zero() {
            continue;
        }
        let z = ProjectivePoint::new(field, coords)?;
        debug_assert!(field.is_zero(&f.eval(field, z.coords())?));
        return Ok((f, z));
    }
}
