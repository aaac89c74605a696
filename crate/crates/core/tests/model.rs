use std::collections::BTreeMap;
use std::sync::OnceLock;

use orbitrep::dynamics::{DynamicalSystem, SetDescriptor};
use orbitrep::group::GroupElement::Int;
use orbitrep::model::build::{alphabet, gap, value_sets};
use orbitrep::model::function::Split;
use orbitrep::model::verify::model_orbit_frequency;
use orbitrep::model::*;
use orbitrep::space::{BallSpec, WeightedVector};
use orbitrep::walk::{build_weight, WeightParams, WeightTable};
use orbitrep::GroupSpec;

const Z: GroupSpec = GroupSpec::Integers;

fn weight() -> &'static WeightTable {
    static W: OnceLock<WeightTable> = OnceLock::new();
    W.get_or_init(|| build_weight(&Z, WeightParams::default_for(&Z)).unwrap())
}

fn built() -> &'static (DynamicalSystem, ModelBuild) {
    static B: OnceLock<(DynamicalSystem, ModelBuild)> = OnceLock::new();
    B.get_or_init(|| {
        let sys = DynamicalSystem::bernoulli(Z, 11);
        let b = build_model(&sys, weight(), &BuildConfig::default(), 11).unwrap();
        (sys, b)
    })
}

#[test]
fn single_stage_smoke() {
    let sys = DynamicalSystem::bernoulli(Z, 1);
    let cfg = BuildConfig { stages: 1, ..BuildConfig::default() };
    let b = build_model(&sys, weight(), &cfg, 1).unwrap();
    assert!(b.pass(), "{:#?}", b.history[0].checks);
    assert_eq!(b.history[0].eta, cfg.eta0);
}

#[test]
fn four_stage_build_passes_every_check() {
    let (_, b) = built();
    assert_eq!(b.history.len(), 4);
    for r in &b.history {
        assert!(r.checks.pass && r.tower.pass, "stage {}: {:#?}", r.stage, r.checks);
        assert!(r.checks.fourth_moment.norm_upper < 1.0);
        assert!(r.tail_contribution < r.ball.radius / 2.0);
        assert!(r.restricted_max < r.ball.radius / 2.0);
    }
    // η follows the budget formula from stage 2 on
    for r in &b.history[1..] {
        let prev = &b.history[r.stage - 2].budgets;
        assert_eq!(r.eta, compute_eta(prev).unwrap());
    }
}

#[test]
fn value_sets_double_per_stage() {
    let (_, b) = built();
    for w in b.history.windows(2) {
        let (a, c) = (&w[0].value_sets[0], &w[1].value_sets[0]);
        assert_eq!(c.zero.len(), 2 * a.zero.len());
        assert_eq!(c.one.len(), 2 * a.one.len());
    }
}

#[test]
fn hitting_events_nest() {
    let (_, b) = built();
    for i in 0..4 {
        let series: Vec<u64> = b.history[i..].iter().map(|r| r.checks.hits[i].measure.estimate.to_bits()).collect();
        let values: Vec<f64> = series.iter().map(|x| f64::from_bits(*x)).collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
        assert!(b.history[i..].iter().all(|r| r.checks.hits[i].nested));
    }
}

#[test]
fn phi_reads_f_at_the_identity() {
    let (sys, b) = built();
    for d in 0..200 {
        let x = sys.sample_point(d);
        let p = phi(&b.model, &x, 3, weight());
        assert_eq!(p.vector.get(&Int(0)), b.model.eval(&x));
        assert!(p.vector.norm(weight()) <= b.model.sup_bound(4));
    }
}

#[test]
fn constant_model_has_constant_phi() {
    let c = 0.75;
    let mut m = ModelFunction::new(Z, 1.0, 0.0);
    m.splits.push(Split { stage: 1, set_index: 4, set: SetDescriptor::full_cylinder(), offset: -c });
    let sys = DynamicalSystem::bernoulli(Z, 0);
    let p = phi(&m, &sys.sample_point(0), 5, weight());
    assert!(p.vector.iter().all(|(_, v)| *v == c) && p.vector.len() == 11);
    let mass = weight().mass_of(&Z.ball(5).unwrap());
    assert!((p.vector.norm_sq(weight()) - c * c * mass).abs() < 1e-15);
}

#[test]
fn equivariance_on_the_built_model() {
    let (sys, b) = built();
    for h in Z.ball(2).unwrap() {
        let r = equivariance_check(&b.model, sys, weight(), 200, &h, 6).unwrap();
        assert!(r.pass && r.compared > 0, "{r:?}");
    }
}

#[test]
fn split_gap_is_twice_the_offset() {
    let mut m = ModelFunction::new(Z, 1.0, 0.0);
    let s = 0.02;
    let set = SetDescriptor::Cylinder(BTreeMap::from([(Int(0), true)]));
    m.splits.push(Split { stage: 1, set_index: 1, set, offset: s });
    let sets = value_sets(&m, 1);
    assert_eq!(sets[0].zero, vec![-s]);
    assert_eq!(sets[0].one, vec![s]);
    assert_eq!(gap(&sets[0].zero, &sets[0].one), 2.0 * s);
    assert_eq!(alphabet(&m, 1).len(), 2);
}

#[test]
fn initial_function_is_zero() {
    let m = ModelFunction::new(Z, 1.0, 0.0);
    let sys = DynamicalSystem::bernoulli(Z, 0);
    assert!((0..100).all(|d| m.eval(&sys.sample_point(d)) == 0.0));
}

#[test]
fn whole_space_surrogate_is_always_visited() {
    let v = WeightedVector::from_atoms([(Int(0), 1.0), (Int(2), -0.5)]);
    let big = BallSpec { center: WeightedVector::zero(), radius: 1e6, n0: 0 };
    let f = orbit_frequency(&Z, &v, &Int(1), &big, 500, weight()).unwrap();
    assert_eq!(f.visits, 500);
    assert!(orbit_frequency(&Z, &v, &Int(0), &big, 10, weight()).is_err());
}

#[test]
fn model_orbit_visits_the_first_ball() {
    let (sys, b) = built();
    let u1 = &b.history[0].ball;
    let x = sys.sample_point(0);
    let f = model_orbit_frequency(&b.model, &x, &Int(1), u1, b.history[0].tower_height, 2000, weight()).unwrap();
    assert!(f.frequency.lower > 0.0);
    assert!((f.half_frequency - f.frequency.estimate).abs() <= f.frequency.upper - f.frequency.lower + 1e-12);
}

#[test]
fn support_and_set_approximation() {
    let (sys, b) = built();
    let r = support_and_iso_check(b, sys, weight(), 2000).unwrap();
    assert!(r.pass, "{r:#?}");
}

#[test]
fn builds_are_deterministic() {
    let sys = DynamicalSystem::bernoulli(Z, 5);
    let cfg = BuildConfig { stages: 2, ..BuildConfig::default() };
    let a = serde_json::to_string(&build_model(&sys, weight(), &cfg, 5).unwrap()).unwrap();
    let b = serde_json::to_string(&build_model(&sys, weight(), &cfg, 5).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_config_fails_with_empty_history() {
    let sys = DynamicalSystem::bernoulli(Z, 5);
    let cfg = BuildConfig { eta0: 1.5, ..BuildConfig::default() };
    let err = build_model(&sys, weight(), &cfg, 5).unwrap_err();
    assert!(err.history.is_empty());
}

#[test]
fn basis_enumeration_round_trips() {
    use orbitrep::model::balls::{ball_index, center, center_index, cantor_pair};
    for k in 0..1000u64 {
        let idx = ball_index(k);
        assert_eq!(cantor_pair(idx.center, idx.radius_exp as u64), k);
    }
    for c in 0..1000u64 {
        let (v, m) = center(&Z, c).unwrap();
        assert_eq!(center_index(&Z, &v).unwrap(), c);
        assert!(v.support().all(|g| Z.word_length(g).unwrap() <= m as usize));
    }
}

#[test]
fn feldman_conjugacy() {
    let r = feldman_baseline(0.5f64.sqrt(), 1000, 30, 3).unwrap();
    assert!(r.pass && r.max_error < 1e-12, "{r:?}");
}
