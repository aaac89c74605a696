use orbitrep::dynamics::{rokhlin_tower, DynamicalSystem, SetDescriptor, SetFamily, SystemKind, TowerOptions};
use orbitrep::group::GroupElement::{Int, Lattice};
use orbitrep::stats::{ks_critical_1pct, ks_uniform, Proportion};
use orbitrep::GroupSpec;
use std::collections::BTreeMap;

#[test]
fn shift_preserves_cylinder_measure() {
    // μ(T_g⁻¹ C) = μ(C) for C = {x_e = 1, x_1 = 0}
    let sys = DynamicalSystem::bernoulli(GroupSpec::Integers, 9);
    let c = SetDescriptor::Cylinder(BTreeMap::from([(Int(0), true), (Int(1), false)]));
    let n = 20_000u64;
    for g in [Int(0), Int(5), Int(-17)] {
        let hits = (0..n).filter(|d| c.contains(&sys.sample_point(*d).act(&g).unwrap())).count() as u64;
        let p = Proportion::wilson(hits, n);
        assert!(p.lower <= 0.25 && 0.25 <= p.upper, "{g}: {p:?}");
    }
}

#[test]
fn bernoulli_action_is_free_on_samples() {
    let spec = GroupSpec::Lattice { d: 2 };
    let sys = DynamicalSystem::bernoulli(spec, 4);
    let window = spec.ball(3).unwrap();
    for d in 0..200 {
        let x = sys.sample_point(d);
        for g in spec.ball(2).unwrap().into_iter().filter(|g| !spec.is_identity(g)) {
            assert!(x.act(&g).unwrap().differs_on(&x, &window), "T_g x = x for g = {g}");
        }
    }
}

#[test]
fn rotation_orbit_is_equidistributed() {
    let alpha = vec![2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0];
    let sys = DynamicalSystem::new(GroupSpec::Lattice { d: 2 }, SystemKind::Rotation { alpha }, 2).unwrap();
    let x = sys.sample_point(0);
    let xs: Vec<f64> = (0..5000).map(|n| x.act(&Lattice(vec![n, 0])).unwrap().rotation_coords().unwrap()[0]).collect();
    assert!(ks_uniform(&xs) < ks_critical_1pct(xs.len()));
}

#[test]
fn tower_on_the_square_lattice() {
    let sys = DynamicalSystem::bernoulli(GroupSpec::Lattice { d: 2 }, 3);
    let opts = TowerOptions { marker_len: None, planted_samples: 2000, direct_samples: 20_000, within: None, pattern_seed: None };
    let t = rokhlin_tower(&sys, 2, 0.1, 0, &opts).unwrap();
    assert_eq!(t.ball_size, 13);
    assert!(t.pass && t.collisions == 0, "{t:?}");
    assert!(t.direct.lower <= t.measure_bound);
}

#[test]
fn scrambled_marker_towers_are_disjoint_too() {
    let sys = DynamicalSystem::bernoulli(GroupSpec::Integers, 3);
    let opts = TowerOptions { marker_len: Some(9), planted_samples: 2000, direct_samples: 50_000, within: None, pattern_seed: Some(77) };
    let t = rokhlin_tower(&sys, 3, 0.1, 5, &opts).unwrap();
    assert!(t.pass && t.collisions == 0, "{t:?}");
}

#[test]
fn towers_reject_non_bernoulli_systems() {
    let sys = DynamicalSystem::new(GroupSpec::Integers, SystemKind::Rotation { alpha: vec![0.3] }, 0).unwrap();
    assert!(rokhlin_tower(&sys, 2, 0.1, 0, &TowerOptions::default()).is_err());
}

#[test]
fn set_family_is_dense_along_the_ruler() {
    let fam = SetFamily { group: GroupSpec::Integers, torus_dim: None };
    // each descriptor index recurs with period 2^{k+1}
    for k in 0..5usize {
        let d = fam.descriptor(k).unwrap();
        let hits: Vec<u64> = (1..200u64).filter(|n| fam.set(*n).unwrap() == d && orbitrep::dynamics::ruler(*n) == k).collect();
        assert!(hits.windows(2).all(|w| w[1] - w[0] == 1 << (k + 1)));
    }
}
