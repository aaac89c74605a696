use orbitrep::group::GroupElement::{Int, Word};
use orbitrep::space::{operator_norm_certificate, WeightedVector};
use orbitrep::walk::{build_weight, WeightParams, WeightTable};
use orbitrep::GroupSpec;
use proptest::prelude::*;
use std::sync::OnceLock;

fn z_weight() -> &'static WeightTable {
    static W: OnceLock<WeightTable> = OnceLock::new();
    W.get_or_init(|| build_weight(&GroupSpec::Integers, WeightParams::default_for(&GroupSpec::Integers)).unwrap())
}

fn vector() -> impl Strategy<Value = WeightedVector> {
    prop::collection::vec((-15i64..=15, -5.0f64..5.0), 0..8).prop_map(|atoms| WeightedVector::from_atoms(atoms.into_iter().map(|(g, c)| (Int(g), c))))
}

proptest! {
    #[test]
    fn parallelogram_law(u in vector(), v in vector()) {
        let w = z_weight();
        let lhs = u.axpy(1.0, &v).norm_sq(w) + u.axpy(-1.0, &v).norm_sq(w);
        let rhs = 2.0 * (u.norm_sq(w) + v.norm_sq(w));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn shift_is_a_representation(v in vector(), a in -5i64..=5, b in -5i64..=5) {
        let spec = GroupSpec::Integers;
        let ab = spec.multiply(&Int(a), &Int(b)).unwrap();
        prop_assert_eq!(v.shift(&spec, &Int(b)).shift(&spec, &Int(a)), v.shift(&spec, &ab));
    }

    #[test]
    fn shift_norm_within_bound(v in vector()) {
        let w = z_weight();
        let s = v.shift(&GroupSpec::Integers, &Int(1));
        // ‖S_a ξ‖² ≤ 6 ‖ξ‖² up to the certified tail of the stored weight
        let slack: f64 = v.iter().map(|(_, c)| c * c).sum::<f64>() * w.tail_bound * 6.0;
        prop_assert!(s.norm_sq(w) <= 6.0 * v.norm_sq(w) + slack + 1e-12);
    }

    #[test]
    fn cauchy_schwarz(u in vector(), v in vector()) {
        let w = z_weight();
        prop_assert!(u.inner(&v, w).abs() <= u.norm(w) * v.norm(w) * (1.0 + 1e-12) + 1e-300);
    }
}

#[test]
fn norm_certificates_on_integers_and_free_group() {
    let z = GroupSpec::Integers;
    let cert = operator_norm_certificate(&z, z_weight(), &Int(1), 10_000, 1).unwrap();
    assert!(cert.pass && cert.violations == 0, "{cert:?}");
    assert!((cert.bound - 6f64.sqrt()).abs() < 1e-15);

    let f2 = GroupSpec::Free { d: 2 };
    let w = build_weight(&f2, WeightParams::default_for(&f2)).unwrap();
    let cert = operator_norm_certificate(&f2, &w, &Word(vec![1]), 2_000, 1).unwrap();
    assert!(cert.pass, "{cert:?}");
    assert!((cert.bound - 10f64.sqrt()).abs() < 1e-15);
}

#[test]
fn dirac_norm_is_the_weight() {
    let w = z_weight();
    let d = WeightedVector::dirac(Int(0));
    assert_eq!(d.norm_sq(w), w.get(&Int(0)));
    let e = d.norm_eval(w);
    assert!(e.upper >= e.norm && !e.truncated);
}
