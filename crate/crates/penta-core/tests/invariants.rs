//! Randomized invariant checks across the library: structural identities of
//! the derivation, consistency of the closed forms with their defining
//! recursions, series step algebra, exact rounding, and the change-of-
//! variables contract the geometric expansion relies on.

use penta_core::arith::ceil_rational;
use penta_core::bounds;
use penta_core::geometry::{Field, HomogeneousPoly, PrimeField, ProjectivePoint};
use penta_core::multidegree::{chain_length, MultiDegree};
use penta_core::series::TruncatedSeries;
use penta_core::{BigInt, BigRational};
use proptest::prelude::*;

fn tuples(max_entry: u32, max_len: usize) -> impl Strategy<Value = MultiDegree> {
    prop::collection::vec(1..=max_entry, 0..=max_len)
        .prop_map(|parts| MultiDegree::new(parts).unwrap())
}

fn nonempty_tuples(max_entry: u32, max_len: usize) -> impl Strategy<Value = MultiDegree> {
    prop::collection::vec(1..=max_entry, 1..=max_len)
        .prop_map(|parts| MultiDegree::new(parts).unwrap())
}

proptest! {
    /// Rendering and parsing are inverse, and the multiplicity view loses
    /// nothing the tuple view had.
    #[test]
    fn tuple_round_trips(md in tuples(30, 8)) {
        let reparsed: MultiDegree = md.to_string().parse().unwrap();
        prop_assert_eq!(&reparsed, &md);
        let back = md.multiplicities().to_multidegree(100).unwrap();
        prop_assert_eq!(&back, &md);
    }

    /// Taking the derived tuple commutes with passing to multiplicities.
    #[test]
    fn derivation_commutes_with_multiplicities(md in tuples(30, 8)) {
        prop_assert_eq!(
            md.derived().multiplicities(),
            md.multiplicities().derived()
        );
    }

    /// The closed-form chain length counts exactly one element per
    /// derivation step.
    #[test]
    fn chain_length_drops_by_one_per_step(md in nonempty_tuples(14, 8)) {
        let mu = md.multiplicities();
        prop_assert_eq!(
            chain_length(&mu),
            chain_length(&mu.derived()) + 1u32
        );
    }

    /// The closed form for r satisfies its defining recursion
    /// r(D) = max(r0(D), r(D') + 1) on every nonempty tuple.
    #[test]
    fn r_closed_form_satisfies_recursion(md in nonempty_tuples(14, 8)) {
        let mu = md.multiplicities();
        let one_step = std::cmp::max(
            bounds::r0(&mu),
            bounds::r_bound(&mu.derived()) + 1,
        );
        prop_assert_eq!(bounds::r_bound(&mu), one_step);
    }

    /// Rounding a rational up lands on the least integer not below it.
    #[test]
    fn ceil_is_the_least_upper_integer(num in -10_000i64..10_000, den in 1i64..500) {
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        let c = ceil_rational(&q);
        prop_assert!(BigRational::from_integer(c.clone()) >= q);
        prop_assert!(BigRational::from_integer(c - 1) < q);
    }

    /// Nonzero residues invert, and the inverse certificate is exact.
    #[test]
    fn prime_field_inverses(v in 1u64..10_007, pick in 0usize..3) {
        let p = [101u64, 10_007, 2_147_483_647][pick];
        let field = PrimeField::new(p).unwrap();
        let a = v % p;
        prop_assume!(a != 0);
        let inv = field.inv(&a).unwrap();
        prop_assert_eq!(field.mul(&a, &inv), 1);
    }

    /// Projective equality ignores global scale.
    #[test]
    fn projective_points_ignore_scale(
        coords in prop::collection::vec(0u64..10_007, 2..=4),
        scale in 1u64..10_007,
    ) {
        prop_assume!(coords.iter().any(|&c| c != 0));
        let field = PrimeField::new(10_007).unwrap();
        let scaled: Vec<u64> = coords.iter().map(|c| field.mul(c, &scale)).collect();
        let p = ProjectivePoint::new(&field, coords).unwrap();
        let q = ProjectivePoint::new(&field, scaled).unwrap();
        prop_assert!(p.eq_projective(&field, &q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The chain-walk ambient bound never falls below the single-shot bound
    /// at the same plane dimension.
    #[test]
    fn walked_bound_dominates_single_shot(
        md in nonempty_tuples(12, 6),
        r in 1i64..=4,
    ) {
        let mu = md.multiplicities();
        let r = BigInt::from(r);
        prop_assert!(bounds::n_bound(&mu, &r) >= bounds::n0(&mu, &r));
    }

    /// The closed-form multi-step advance agrees with iterating the single
    /// step, for arbitrary series and step counts.
    #[test]
    fn advance_matches_iterated_delta(
        coeffs in prop::collection::vec(-50i64..=50, 8..=14),
        level in 0usize..=4,
        count in 0u8..=6,
    ) {
        let series = TruncatedSeries::from_coeffs(
            coeffs.into_iter().map(BigInt::from).collect(),
        );
        let m = BigInt::from(count);
        let closed = series.advance(level, &m);
        let mut stepped = series;
        for _ in 0..count {
            stepped = stepped.delta(level);
        }
        prop_assert_eq!(closed, stepped);
    }

    /// Substituting a linear change of variables and then evaluating equals
    /// evaluating the original form at the transformed point.
    #[test]
    fn linear_substitution_commutes_with_evaluation(
        picks in prop::collection::vec(
            (prop::collection::vec(0usize..3, 3), 1u64..101),
            1..=5,
        ),
        rows in prop::collection::vec(prop::collection::vec(0u64..101, 3), 3),
        point in prop::collection::vec(0u64..101, 3),
    ) {
        let field = PrimeField::new(101).unwrap();
        let terms: Vec<(Vec<u16>, u64)> = picks
            .into_iter()
            .map(|(vars, coeff)| {
                let mut exps = vec![0u16; 3];
                for v in vars {
                    exps[v] += 1;
                }
                (exps, coeff)
            })
            .collect();
        let f = HomogeneousPoly::new(&field, 3, 3, terms).unwrap();
        let g = f.substitute_linear(&field, &rows, 3).unwrap();
        let image: Vec<u64> = (0..3)
            .map(|i| {
                let mut acc = field.zero();
                for j in 0..3 {
                    acc = field.add(&acc, &field.mul(&rows[i][j], &point[j]));
                }
                acc
            })
            .collect();
        prop_assert_eq!(
            g.eval(&field, &point).unwrap(),
            f.eval(&field, &image).unwrap()
        );
    }
}
