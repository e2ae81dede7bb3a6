//! Property tests for the group backends and normal forms.

use proptest::prelude::*;

use admissible_core::groupcore::{BackendSpec, Word};

fn product_backend() -> BackendSpec {
    BackendSpec::product_named(vec!["a".into(), "b".into()], "z".into()).unwrap()
}

fn arb_word() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            Just("a"),
            Just("a^-1"),
            Just("b"),
            Just("b^-1"),
            Just("z"),
            Just("z^-1"),
        ],
        0..16,
    )
    .prop_map(|v| v.join(" "))
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(text in arb_word()) {
        let backend = product_backend();
        let g = backend.canonicalize(&Word::parse(&text).unwrap()).unwrap();
        let again = backend
            .canonicalize(&Word::parse(&backend.render(&g)).unwrap())
            .unwrap();
        prop_assert_eq!(g, again);
    }

    #[test]
    fn multiplication_is_associative(
        x in arb_word(),
        y in arb_word(),
        z in arb_word(),
    ) {
        let backend = product_backend();
        let gx = backend.element_from_str(&x).unwrap();
        let gy = backend.element_from_str(&y).unwrap();
        let gz = backend.element_from_str(&z).unwrap();
        let left = backend
            .multiply(&backend.multiply(&gx, &gy).unwrap(), &gz)
            .unwrap();
        let right = backend
            .multiply(&gx, &backend.multiply(&gy, &gz).unwrap())
            .unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_and_inverse_laws(x in arb_word()) {
        let backend = product_backend();
        let g = backend.element_from_str(&x).unwrap();
        let e = backend.identity();
        prop_assert_eq!(backend.multiply(&g, &e).unwrap(), g.clone());
        prop_assert_eq!(backend.multiply(&e, &g).unwrap(), g.clone());
        let inv = backend.invert(&g).unwrap();
        prop_assert_eq!(backend.multiply(&g, &inv).unwrap(), e.clone());
        prop_assert_eq!(backend.multiply(&inv, &g).unwrap(), e);
    }

    #[test]
    fn word_length_is_subadditive(x in arb_word(), y in arb_word()) {
        let backend = product_backend();
        let gx = backend.element_from_str(&x).unwrap();
        let gy = backend.element_from_str(&y).unwrap();
        let product = backend.multiply(&gx, &gy).unwrap();
        prop_assert!(
            backend.word_length(&product)
                <= backend.word_length(&gx) + backend.word_length(&gy)
        );
    }
}

#[test]
fn subadditivity_exhaustive_on_small_ball() {
    let backend = product_backend();
    let ball = backend.ball(4, 1 << 22).unwrap();
    // exhaustive over a sampled slice of the radius-4 ball
    for (i, a) in ball.iter().enumerate().step_by(7) {
        for b in ball.iter().skip(i % 13).step_by(11) {
            let p = backend.multiply(a, b).unwrap();
            assert!(backend.word_length(&p) <= backend.word_length(a) + backend.word_length(b));
        }
    }
}
