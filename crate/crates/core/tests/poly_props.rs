mod common;

use common::{mul, rational};
use dydy::poly::{build_gn, Poly};
use dydy::{q, Rational2, ValExponent};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational2> {
    (-200i64..=200, -4i32..=4, 0i64..20).prop_map(|(n, e, o)| rational(n, e, o))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(small_rational(), 1..=max_deg + 1).prop_map(Poly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn taylor_shift_consistency(p in poly(6), a in small_rational(), x in small_rational()) {
        let shifted = p.taylor_shift(&a);
        prop_assert_eq!(shifted.eval(&(&x - &a)), p.eval(&x));
    }

    #[test]
    fn compose_consistency(p in poly(4), q in poly(3), x in small_rational()) {
        prop_assert_eq!(p.compose(&q).eval(&x), p.eval(&q.eval(&x)));
    }

    #[test]
    fn product_matches_schoolbook(p in poly(5), q in poly(5)) {
        prop_assert_eq!(&p * &q, mul(&p, &q));
    }
}

#[test]
fn gn_recurrence_identity() {
    // g_n = -1/2 + sigma, g_{n+1} = (-3s - 3) g_n^2 (2 - sigma) + 1
    let lin = Poly::from_ints(&[-3, -3]);
    let two = Poly::constant(Rational2::from(2));
    let half = Poly::constant(q(1, 2));
    let one = Poly::constant(Rational2::one());
    for n in 2..=6 {
        let g = build_gn(n).unwrap();
        let sigma = g.clone() + half.clone();
        let rhs = mul(&mul(&lin, &mul(&g, &g)), &(two.clone() - sigma)) + one.clone();
        assert_eq!(build_gn(n + 1).unwrap(), rhs, "n = {n}");
    }
}

#[test]
fn gn_degrees_follow_3d_plus_1() {
    let mut d = build_gn(2).unwrap().degree().unwrap();
    assert_eq!(d, 1);
    for n in 3..=7 {
        let next = build_gn(n).unwrap().degree().unwrap();
        assert_eq!(next, 3 * d + 1, "n = {n}");
        d = next;
    }
}

#[test]
fn gn_coefficient_valuations() {
    for n in 3..=7i64 {
        let g = build_gn(n as usize).unwrap();
        assert_eq!(
            g.coeff(1).val(),
            ValExponent::Finite(3 - 2 * n),
            "a_1 of g_{n}"
        );
        for (i, c) in g.coeffs().iter().enumerate().skip(1) {
            assert!(
                c.val().at_least((4 - 2 * n) * i as i64 - 1),
                "a_{i} of g_{n}: {c}"
            );
        }
    }
}
