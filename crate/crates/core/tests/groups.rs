use orbitrep::group::GroupElement::{Bits, Int, Lattice, Word};
use orbitrep::seed;
use orbitrep::{GroupElement, GroupSpec};
use proptest::prelude::*;

const SPECS: [GroupSpec; 6] = [
    GroupSpec::Integers,
    GroupSpec::Lattice { d: 2 },
    GroupSpec::Lattice { d: 3 },
    GroupSpec::Free { d: 2 },
    GroupSpec::Heisenberg,
    GroupSpec::BitSum,
];

#[test]
fn random_triples_satisfy_group_axioms() {
    for spec in SPECS {
        let mut rng = seed::rng(17, "triples", 0);
        let e = spec.identity();
        for _ in 0..10_000 {
            let a = spec.random_element(&mut rng, 6);
            let b = spec.random_element(&mut rng, 6);
            let c = spec.random_element(&mut rng, 6);
            let ab_c = spec.multiply(&spec.multiply(&a, &b).unwrap(), &c).unwrap();
            let a_bc = spec.multiply(&a, &spec.multiply(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc, "{spec:?}");
            assert_eq!(spec.multiply(&a, &spec.inverse(&a).unwrap()).unwrap(), e);
            assert_eq!(spec.multiply(&e, &a).unwrap(), a);
        }
    }
}

/// Closed-form ball sizes: `2n+1`, `2n²+2n+1`, `2·3ⁿ−1`.
#[test]
fn ball_sizes_match_closed_forms() {
    for n in 0..8usize {
        assert_eq!(GroupSpec::Integers.ball(n).unwrap().len(), 2 * n + 1);
        assert_eq!(GroupSpec::Lattice { d: 2 }.ball(n).unwrap().len(), 2 * n * n + 2 * n + 1);
        assert_eq!(GroupSpec::Free { d: 2 }.ball(n).unwrap().len(), 2 * 3usize.pow(n as u32) - 1);
    }
    // growth of the Heisenberg group: |B_1| = 5, |B_2| = 17
    assert_eq!(GroupSpec::Heisenberg.ball(1).unwrap().len(), 5);
    assert_eq!(GroupSpec::Heisenberg.ball(2).unwrap().len(), 17);
}

#[test]
fn balls_are_canonically_sorted_and_symmetric() {
    for spec in &SPECS[..5] {
        let ball = spec.ball(3).unwrap();
        assert!(ball.windows(2).all(|w| w[0] < w[1]));
        for g in &ball {
            assert!(ball.binary_search(&spec.inverse(g).unwrap()).is_ok());
        }
    }
}

#[test]
fn noncanonical_encodings_are_rejected() {
    let f2 = GroupSpec::Free { d: 2 };
    assert!(f2.validate(&Word(vec![1, -1])).is_err());
    assert!(f2.validate(&Word(vec![3])).is_err());
    assert!(GroupSpec::BitSum.validate(&Bits(vec![4, 4])).is_err());
    assert!(GroupSpec::Lattice { d: 2 }.validate(&Lattice(vec![1])).is_err());
    assert!(GroupSpec::Integers.validate(&Word(vec![])).is_err());
}

fn word() -> impl Strategy<Value = GroupElement> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1), Just(2), Just(-2)], 0..12)
        .prop_map(|w| GroupSpec::Free { d: 2 }.canonicalize(Word(w)).unwrap())
}

proptest! {
    #[test]
    fn free_word_length_is_subadditive(a in word(), b in word()) {
        let f2 = GroupSpec::Free { d: 2 };
        let ab = f2.multiply(&a, &b).unwrap();
        prop_assert!(f2.word_length(&ab).unwrap() <= f2.word_length(&a).unwrap() + f2.word_length(&b).unwrap());
        prop_assert_eq!(f2.word_length(&f2.inverse(&a).unwrap()).unwrap(), f2.word_length(&a).unwrap());
    }

    #[test]
    fn display_parse_round_trip(x in -1000i64..1000, y in -50i64..50, z in -50i64..50) {
        let cases = [
            (GroupSpec::Integers, Int(x)),
            (GroupSpec::Lattice { d: 3 }, Lattice(vec![x, y, z])),
            (GroupSpec::Heisenberg, GroupElement::Heisenberg([x, y, z])),
        ];
        for (spec, g) in cases {
            prop_assert_eq!(spec.parse(&g.to_string()).unwrap(), g);
        }
    }

    #[test]
    fn integer_powers(n in -40i64..40, m in -40i64..40) {
        let spec = GroupSpec::Integers;
        let a = Int(1);
        let lhs = spec.multiply(&spec.pow(&a, n).unwrap(), &spec.pow(&a, m).unwrap()).unwrap();
        prop_assert_eq!(lhs, spec.pow(&a, n + m).unwrap());
    }
}
