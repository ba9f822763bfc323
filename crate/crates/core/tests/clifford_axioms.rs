use monogen_core::clifford::CliffordError;
use monogen_core::{Blade, Multivector, Signature};
use proptest::prelude::*;

fn signatures() -> impl Strategy<Value = Signature> {
    prop_oneof![
        Just(Signature::new(2, 0).unwrap()),
        Just(Signature::new(3, 0).unwrap()),
        Just(Signature::new(3, 1).unwrap()),
        Just(Signature::new(1, 1).unwrap()),
        Just(Signature::new(0, 3).unwrap()),
    ]
}

fn mv(sig: Signature) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-10.0f64..10.0, sig.blade_count()).prop_map(move |c| {
        Multivector::from_terms(sig, c.into_iter().enumerate().map(|(m, v)| (Blade::from_mask(m as u16), v))).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (Multivector, Multivector, Multivector)> {
    signatures().prop_flat_map(|s| (mv(s), mv(s), mv(s)))
}

fn close(a: &Multivector, b: &Multivector) -> bool {
    let scale = 1.0 + a.magnitude().max(b.magnitude());
    a.max_abs_diff(b) <= 1e-12 * scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn associativity((a, b, c) in triple()) {
        let left = &(&a * &b) * &c;
        let right = &a * &(&b * &c);
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn distributivity((a, b, c) in triple()) {
        prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
        prop_assert!(close(&(&(&a + &b) * &c), &(&(&a * &c) + &(&b * &c))));
    }

    #[test]
    fn reverse_is_an_anti_automorphism((a, b, _) in triple()) {
        prop_assert!(close(&(&a * &b).reverse(), &(&b.reverse() * &a.reverse())));
    }

    #[test]
    fn grades_partition((a, _, _) in triple()) {
        let n = a.signature().dim();
        let mut sum = Multivector::zero(a.signature());
        for k in 0..=n {
            sum = &sum + &a.grade_project(k);
        }
        prop_assert!(close(&sum, &a));
    }

    #[test]
    fn outer_product_is_associative((a, b, c) in triple()) {
        let left = a.outer_product(&b).unwrap().outer_product(&c).unwrap();
        let right = a.outer_product(&b.outer_product(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn vector_product_splits_into_inner_and_outer(sig in signatures(), u in prop::collection::vec(-5.0f64..5.0, 4), v in prop::collection::vec(-5.0f64..5.0, 4)) {
        let n = sig.dim();
        let a = Multivector::vector(sig, &u[..n]).unwrap();
        let b = Multivector::vector(sig, &v[..n]).unwrap();
        let split = &a.inner_product(&b).unwrap() + &a.outer_product(&b).unwrap();
        prop_assert!(close(&(&a * &b), &split));
    }

    #[test]
    fn text_round_trip((a, _, _) in triple()) {
        let back: Multivector = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn generator_squares_and_anticommutation_are_exact() {
    for sig in [Signature::new(2, 0).unwrap(), Signature::new(3, 0).unwrap(), Signature::new(3, 1).unwrap()] {
        for i in 0..sig.dim() {
            let ei = Multivector::generator(sig, i).unwrap();
            assert_eq!(&ei * &ei, Multivector::scalar(sig, sig.square(i)));
            for j in 0..sig.dim() {
                if i != j {
                    let ej = Multivector::generator(sig, j).unwrap();
                    assert_eq!(&(&ei * &ej) + &(&ej * &ei), Multivector::zero(sig));
                }
            }
        }
    }
}

#[test]
fn minkowski_time_generator_squares_negative() {
    let sig = Signature::new(3, 1).unwrap();
    let g0 = Multivector::generator(sig, 3).unwrap();
    assert_eq!((&g0 * &g0).scalar_part(), -1.0);
    let i = Multivector::pseudoscalar(sig);
    assert_eq!((&i * &i).scalar_part(), -1.0);
}

#[test]
fn projection_and_rejection_recompose_a_vector() {
    let sig = Signature::euclidean(3).unwrap();
    let a = Multivector::vector(sig, &[1.0, 2.0, 3.0]).unwrap();
    let plane = Multivector::from_blade(sig, Blade::from_mask(0b011), 2.0).unwrap();
    let p = a.projection(&plane).unwrap();
    let r = a.rejection(&plane).unwrap();
    assert!(close(&(&p + &r), &a));
    assert_eq!(p, Multivector::vector(sig, &[1.0, 2.0, 0.0]).unwrap());
}

#[test]
fn mixing_signatures_is_an_error() {
    let a = Multivector::scalar(Signature::euclidean(2).unwrap(), 1.0);
    let b = Multivector::scalar(Signature::euclidean(3).unwrap(), 1.0);
    assert!(matches!(a.geometric_product(&b), Err(CliffordError::SignatureMismatch { .. })));
}
