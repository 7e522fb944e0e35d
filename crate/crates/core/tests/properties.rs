use std::sync::OnceLock;

use lmsb::arith::{qr, rational_reconstruct, series_mul, theta_apply, LogSeries, MultiSeries, Poly, RationalFunction, Q};
use lmsb::gkz::ThetaOperator;
use lmsb::jacobian::{
    expected_dimensions, jacobian_dimensions, DOperators, GradedMonomial, GradedRing, RingElement,
};
use lmsb::polytope::{dual_polytope, integral_points, is_reflexive, normalized_volume, reflexive_polygons, relation_holds};
use lmsb::registry::builtin;
use proptest::prelude::*;

const ORDER: u32 = 4;

fn projective_plane_route() -> &'static lmsb::jacobian::AlgebraicRoute {
    static ROUTE: OnceLock<lmsb::jacobian::AlgebraicRoute> = OnceLock::new();
    ROUTE.get_or_init(|| lmsb::jacobian::algebraic_route(&builtin("p2").unwrap()).unwrap())
}

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| qr(n, d))
}

/// Two-variable series with at most one power of log z₁ and one of log z₂.
fn log_series() -> impl Strategy<Value = LogSeries> {
    let comp = proptest::collection::vec(((0u32..=2, 0u32..=2), small_q()), 0..6);
    proptest::collection::vec(comp, 3).prop_map(|parts| {
        let keys = [vec![0, 0], vec![1, 0], vec![0, 1]];
        let mut out = LogSeries::zero(2, ORDER);
        for (key, terms) in keys.iter().zip(parts) {
            let mut s = MultiSeries::zero(2, ORDER);
            for ((a, b), c) in terms {
                s.add_term(vec![a, b], c);
            }
            out.set_component(key.clone(), s);
        }
        out
    })
}

fn poly2() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(((0u32..=2, 0u32..=2), small_q()), 1..5).prop_map(|terms| {
        let mut p = Poly::zero(2);
        for ((a, b), c) in terms {
            p.add_term(vec![a, b], c);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_series_ring_axioms(a in log_series(), b in log_series(), c in log_series()) {
        // Products of three single-log factors may need log-degree 3; keep one factor log-free.
        let c = LogSeries::from_series(c.power_part());
        let ab = series_mul(&a, &b).unwrap();
        let left = series_mul(&ab, &c).unwrap();
        let right = series_mul(&a, &series_mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let dist = series_mul(&a, &b.add(&c)).unwrap();
        prop_assert_eq!(dist, ab.add(&series_mul(&a, &c).unwrap()));
        prop_assert_eq!(series_mul(&a, &b).unwrap(), series_mul(&b, &a).unwrap());
    }

    #[test]
    fn theta_operators_commute(s in log_series()) {
        prop_assert_eq!(theta_apply(0, &theta_apply(1, &s)), theta_apply(1, &theta_apply(0, &s)));
    }

    #[test]
    fn theta_leibniz(a in log_series(), b in log_series()) {
        let b = LogSeries::from_series(b.power_part());
        let lhs = theta_apply(0, &series_mul(&a, &b).unwrap());
        let rhs = series_mul(&theta_apply(0, &a), &b).unwrap().add(&series_mul(&a, &theta_apply(0, &b)).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn operator_composition_matches_application(w1 in small_q(), w2 in small_q(), s1 in small_q(), s in log_series()) {
        let a = ThetaOperator::linear(&[w1, w2.clone()], &s1);
        let b = ThetaOperator::linear(&[w2, qr(1, 1)], &qr(0, 1)).left_mul(&RationalFunction::var(2, 0));
        let composed = a.compose(&b).apply_series(&s).unwrap();
        let nested = a.apply_series(&b.apply_series(&s).unwrap()).unwrap();
        prop_assert_eq!(composed, nested);
    }

    #[test]
    fn reconstruct_round_trip(num in poly2(), c1 in -5i64..=5, c2 in -5i64..=5) {
        let mut den = Poly::one(2);
        den.add_term(vec![1, 0], qr(c1, 1));
        den.add_term(vec![0, 1], qr(c2, 1));
        let want = RationalFunction::new(num, den.clone());
        let series = MultiSeries::from_ratfun(&want, 10).unwrap();
        prop_assert_eq!(rational_reconstruct(&series, &den).unwrap(), want);
    }

    #[test]
    fn relation_combinations_stay_relations(model in 0usize..4, coeffs in proptest::collection::vec(-4i64..=4, 2)) {
        let m = builtin(["p2", "f0", "f1", "f2"][model]).unwrap();
        let mut l = vec![0i64; m.npoints()];
        for (r, c) in m.relations.iter().zip(&coeffs) {
            for (x, y) in l.iter_mut().zip(r) {
                *x += c * y;
            }
        }
        prop_assert!(relation_holds(&m.points, &l));
    }

    #[test]
    fn reflexive_duality(index in 0usize..16) {
        let p = &reflexive_polygons()[index];
        prop_assert!(is_reflexive(p).unwrap());
        let d = dual_polytope(p).unwrap();
        prop_assert!(is_reflexive(&d).unwrap());
        prop_assert_eq!(&dual_polytope(&d).unwrap(), p);
        prop_assert_eq!(normalized_volume(p) as usize, integral_points(p).len() - 1);
        prop_assert_eq!(normalized_volume(p) + normalized_volume(&d), 12);
    }

    #[test]
    fn d_operators_commute_with_parameter_derivatives(
        model in 0usize..2,
        picks in proptest::collection::vec((0usize..64, 0u32..=2, small_q()), 1..4),
        i in 0usize..3,
        m in 0usize..4,
    ) {
        let md = builtin(["p2", "f0"][model]).unwrap();
        let ring = GradedRing::new(&md.points).unwrap();
        let ops = DOperators::symbolic(&md.points);
        let l = md.npoints();
        let monos = ring.up_to(2);
        let mut x = RingElement::zero(l);
        for (k, power, c) in picks {
            let mono: GradedMonomial = monos[k % monos.len()].clone();
            x.add_term(mono, Poly::var(l, k % l).pow(power).scale(&c));
        }
        prop_assert!(ops.commutator(i, m % l, &x).is_zero());
    }

    #[test]
    fn jacobian_dimensions_constant_on_regular_points(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for name in ["p2", "f1"] {
            let m = builtin(name).unwrap();
            let a = lmsb::jacobian::random_regular_point(&m, &mut rng);
            let ring = GradedRing::new(&m.points).unwrap();
            prop_assert_eq!(jacobian_dimensions(&ring, &a), expected_dimensions(m.npoints()));
        }
    }

    #[test]
    fn pairing_is_antisymmetric(x1 in small_q(), x2 in small_q()) {
        let route = projective_plane_route();
        let (a, b) = (RationalFunction::constant(4, x1), RationalFunction::constant(4, x2));
        prop_assert!(route.normalization.pairing((&a, &b), (&a, &b)).is_zero());
    }
}
