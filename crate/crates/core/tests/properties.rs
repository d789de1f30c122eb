mod common;

use cig_core::{Fe, FieldSpec};
use common::*;
use proptest::prelude::*;

#[test]
fn field_axioms_up_to_81() {
    for q in prime_powers(2, 81) {
        field_axioms(q).unwrap();
    }
}

#[test]
fn refinement_reaches_an_equitable_fixed_point() {
    for q in [5, 7, 8, 9, 11, 13] {
        refinement_idempotent(q).unwrap();
    }
}

#[test]
fn automorphism_order_survives_relabelling() {
    for (q, seed) in [(7, 1), (9, 2), (11, 3)] {
        relabel_invariant(q, seed).unwrap();
    }
}

#[test]
fn seeded_search_agrees_with_unseeded() {
    for q in [7, 9, 11] {
        seeded_unseeded_agree(q).unwrap();
    }
}

#[test]
fn orbit_times_stabilizer() {
    for q in [7, 9, 11, 13] {
        orbit_stabilizer(q).unwrap();
    }
}

#[test]
fn point_counts_match_enumeration() {
    for q in prime_powers(2, 31) {
        counts_match_brute_force(q, 100, 11).unwrap();
    }
}

#[test]
fn perfect_squares() {
    for q in [3, 4, 5, 9, 13, 25, 27] {
        perfect_square_oracle(q, 40, 5).unwrap();
    }
}

fn gf_pair() -> impl Strategy<Value = (u32, u32, u32, u32)> {
    prop::sample::select(vec![49u32, 81, 121, 125, 243, 343, 729, 1024, 2187, 4096, 6561])
        .prop_flat_map(|q| (Just(q), 0..q, 0..q, 0..q))
}

proptest! {
    #[test]
    fn larger_fields_obey_the_axioms((q, a, b, c) in gf_pair()) {
        let k = FieldSpec::from_order(q as u64).unwrap();
        let (a, b, c) = (k.element(a).unwrap(), k.element(b).unwrap(), k.element(c).unwrap());
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.mul(k.mul(a, b), c), k.mul(a, k.mul(b, c)));
        prop_assert_eq!(k.pow(a, q as u64), a);
        if !a.is_zero() {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), Fe::ONE);
            prop_assert_eq!(k.pow(a, (q - 1) as u64), Fe::ONE);
        }
        if k.is_odd() {
            let s = k.square(b);
            let r = k.sqrt(s).unwrap();
            prop_assert_eq!(k.square(r), s);
        }
    }

    #[test]
    fn frobenius_respects_products((q, a, b, _c) in gf_pair()) {
        let k = FieldSpec::from_order(q as u64).unwrap();
        let (a, b) = (k.element(a).unwrap(), k.element(b).unwrap());
        prop_assert_eq!(k.frobenius(k.mul(a, b)), k.mul(k.frobenius(a), k.frobenius(b)));
        prop_assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
    }
}
