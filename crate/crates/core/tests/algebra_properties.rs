use proptest::prelude::*;
use qpsido_core::qsymbolic::{
    act, casimir, coproduct, counit, nabla, twist_theta, twisted_commutator, weight_decompose, CasimirVariant,
    CoordWord, Monomial, TensorElement, UWord,
};
use qpsido_core::{AlgebraElement, QScalar};

fn coord_word() -> impl Strategy<Value = CoordWord> {
    (-2i32..=2, 0u32..=1, 0u32..=1).prop_map(|(ad, b, c)| CoordWord { ad, b, c })
}

fn u_word(max_order: u32) -> impl Strategy<Value = UWord> {
    (0..=max_order, -2i32..=2, 0..=max_order)
        .prop_filter("order bound", move |(f, _, e)| f + e <= max_order)
        .prop_map(|(f, k, e)| UWord { f, k, e })
}

fn coefficient() -> impl Strategy<Value = QScalar> {
    prop_oneof![
        (-3i64..=3).prop_filter("nonzero", |n| *n != 0).prop_map(QScalar::from_int),
        (-2i32..=2).prop_map(QScalar::q_pow),
        (1i64..=3).prop_map(|n| &QScalar::q() + &QScalar::from_int(n)),
    ]
}

fn element(max_terms: usize, max_order: u32) -> impl Strategy<Value = AlgebraElement> {
    proptest::collection::vec((coord_word(), u_word(max_order), coefficient()), 1..=max_terms).prop_map(|ts| {
        ts.into_iter()
            .map(|(coord, u, c)| AlgebraElement::term(Monomial { coord, u }, c))
            .sum()
    })
}

fn u_element(max_terms: usize, max_order: u32) -> impl Strategy<Value = AlgebraElement> {
    proptest::collection::vec((u_word(max_order), coefficient()), 1..=max_terms).prop_map(|ts| {
        ts.into_iter()
            .map(|(u, c)| AlgebraElement::term(Monomial { coord: CoordWord::ONE, u }, c))
            .sum()
    })
}

fn coord_element(max_terms: usize) -> impl Strategy<Value = AlgebraElement> {
    proptest::collection::vec((coord_word(), coefficient()), 1..=max_terms).prop_map(|ts| {
        ts.into_iter()
            .map(|(coord, c)| AlgebraElement::term(Monomial { coord, u: UWord::ONE }, c))
            .sum()
    })
}

fn el(s: &str) -> AlgebraElement {
    AlgebraElement::from_expression(s).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn multiplication_is_associative(x in element(2, 2), y in element(2, 2), z in element(2, 1)) {
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn normal_form_is_idempotent(x in element(3, 2)) {
        let once: AlgebraElement = x.to_string().parse().unwrap();
        prop_assert_eq!(&once, &x);
        prop_assert_eq!(&(&AlgebraElement::one() * &x), &x);
    }

    #[test]
    fn filtration_is_multiplicative(x in element(2, 2), y in element(2, 2)) {
        let bound = x.filtration_order().as_i64().unwrap() + y.filtration_order().as_i64().unwrap();
        prop_assert!((&x * &y).filtration_order().at_most(bound));
    }

    #[test]
    fn coproduct_is_coassociative(u in u_element(2, 2)) {
        let d = coproduct(&u).unwrap();
        prop_assert_eq!(d.coproduct_on_leg(0).unwrap(), d.coproduct_on_leg(1).unwrap());
    }

    #[test]
    fn coproduct_is_multiplicative(u in u_element(2, 1), v in u_element(2, 1)) {
        let lhs = coproduct(&(&u * &v)).unwrap();
        let rhs = coproduct(&u).unwrap().mul(&coproduct(&v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn counit_laws(u in u_element(3, 2)) {
        let d = coproduct(&u).unwrap();
        let mut left = AlgebraElement::zero();
        let mut right = AlgebraElement::zero();
        for (legs, c) in d.terms() {
            let l0 = AlgebraElement::term(legs[0], QScalar::one());
            let l1 = AlgebraElement::term(legs[1], QScalar::one());
            left = &left + &l1.scale(&(c * &counit(&l0).unwrap()));
            right = &right + &l0.scale(&(c * &counit(&l1).unwrap()));
        }
        prop_assert_eq!(&left, &u);
        prop_assert_eq!(&right, &u);
    }

    #[test]
    fn module_algebra_law(h in u_element(1, 2), x in coord_element(2), y in coord_element(2)) {
        let lhs = act(&h, &(&x * &y)).unwrap();
        let mut rhs = AlgebraElement::zero();
        for (legs, c) in coproduct(&h).unwrap().terms() {
            let h1 = AlgebraElement::term(legs[0], QScalar::one());
            let h2 = AlgebraElement::term(legs[1], QScalar::one());
            rhs = &rhs + &(&act(&h1, &x).unwrap() * &act(&h2, &y).unwrap()).scale(c);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_is_graded_automorphism(x in element(2, 2), y in element(2, 2)) {
        let lhs = twist_theta(&(&x * &y), 4).unwrap();
        let rhs = &twist_theta(&x, 4).unwrap() * &twist_theta(&y, 4).unwrap();
        let bound = x.filtration_order().as_i64().unwrap() + y.filtration_order().as_i64().unwrap() - 1;
        prop_assert!((&lhs - &rhs).filtration_order().at_most(bound));
    }

    #[test]
    fn weight_components_are_eigenvectors(x in element(4, 2)) {
        let parts = weight_decompose(&x);
        for (w, comp) in &parts {
            prop_assert_eq!(twist_theta(comp, 4).unwrap(), comp.scale(&QScalar::q_pow(*w)));
        }
        prop_assert_eq!(parts.into_values().sum::<AlgebraElement>(), x);
    }

    #[test]
    fn star_is_antimultiplicative(x in element(2, 1), y in element(2, 1)) {
        prop_assert_eq!((&x * &y).star(), &y.star() * &x.star());
    }

    #[test]
    fn nabla_raises_order_by_at_most_one(x in element(2, 2)) {
        let bound = x.filtration_order().as_i64().unwrap() + 1;
        prop_assert!(nabla(&x).filtration_order().at_most(bound));
    }
}

#[test]
fn crossed_relation_on_generators() {
    for h in ["E", "F", "K"] {
        let h = el(h);
        for a in ["a", "b", "c", "d"] {
            let a = el(a);
            let mut rhs = AlgebraElement::zero();
            for (legs, c) in coproduct(&h).unwrap().terms() {
                let h1 = AlgebraElement::term(legs[0], QScalar::one());
                let h2 = AlgebraElement::term(legs[1], QScalar::one());
                rhs = &rhs + &(&act(&h1, &a).unwrap() * &h2).scale(c);
            }
            assert_eq!(&h * &a, rhs);
        }
    }
}

#[test]
fn coassociativity_on_generators() {
    for g in ["E", "F", "K", "K^-1"] {
        let d = coproduct(&el(g)).unwrap();
        assert_eq!(d.coproduct_on_leg(0).unwrap(), d.coproduct_on_leg(1).unwrap(), "{g}");
    }
}

#[test]
fn casimir_coproduct_second_leg() {
    let c = casimir(CasimirVariant::Corrected);
    let d = coproduct(&c).unwrap();
    let rest = d.sub(&TensorElement::pure(&[el("K^2"), c.clone()]));
    assert!(rest.leg_order(1).at_most(1));
    assert!(!rest.is_zero());
}

#[test]
fn twisted_commutator_order_bound_on_basis() {
    // [C, x]_{θ²} ⊆ order ord(x) + 1 for a basis of the order ≤ 3 part
    let c = casimir(CasimirVariant::Corrected);
    let coords = [
        CoordWord::ONE,
        CoordWord { ad: 1, b: 0, c: 0 },
        CoordWord { ad: 0, b: 1, c: 0 },
        CoordWord { ad: 0, b: 0, c: 1 },
        CoordWord { ad: -1, b: 0, c: 0 },
        CoordWord { ad: 1, b: 1, c: 0 },
        CoordWord { ad: 0, b: 1, c: 1 },
    ];
    for coord in coords {
        for f in 0..=3u32 {
            for e in 0..=(3 - f) {
                for k in -1..=1 {
                    let x = AlgebraElement::term(Monomial { coord, u: UWord { f, k, e } }, QScalar::one());
                    let t = twisted_commutator(&c, &x, 4).unwrap();
                    assert!(t.filtration_order().at_most((f + e) as i64 + 1), "{x}");
                }
            }
        }
    }
}
