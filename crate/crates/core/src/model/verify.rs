//! Verification battery for a built model: exact equivariance of `φ_f`, ball
//! hitting and set approximation against the recorded budgets, and orbit
//! visit frequencies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::build::{in_cover, ModelBuild};
use super::function::{ball_membership, phi, Membership, ModelFunction};
use crate::dynamics::{DynamicalSystem, PointHandle};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::space::{BallSpec, WeightedVector};
use crate::stats::Proportion;
use crate::walk::WeightTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub h: String,
    pub samples: usize,
    pub truncation: usize,
    /// Coefficients compared on `B_{N − |h|}`.
    pub compared: u64,
    pub mismatches: u64,
    pub pass: bool,
}

/// Compares `φ_f(T_h x)` with `S_h φ_f(x)` coefficient by coefficient, bit for bit.
pub fn equivariance_check(
    model: &ModelFunction,
    sys: &DynamicalSystem,
    w: &WeightTable,
    samples: usize,
    h: &GroupElement,
    n_trunc: usize,
) -> Result<EquivarianceReport> {
    let spec = &sys.group;
    let len = spec.word_length(h)?;
    if len > n_trunc {
        return Err(Error::Domain(format!("|h| = {len} exceeds the truncation radius {n_trunc}")));
    }
    let common = spec.ball(n_trunc - len)?;
    let (compared, mismatches) = (0..samples as u64)
        .into_par_iter()
        .map(|draw| {
            let x = sys.sample_in_stream("equivariance", draw, Default::default());
            let moved = phi(model, &x.act(h).expect("element of the group"), n_trunc, w).vector;
            let shifted = phi(model, &x, n_trunc, w).vector.shift(spec, h);
            let bad = common.iter().filter(|g| moved.get(g).to_bits() != shifted.get(g).to_bits()).count() as u64;
            (common.len() as u64, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(EquivarianceReport { h: h.to_string(), samples, truncation: n_trunc, compared, mismatches, pass: mismatches == 0 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallHit {
    pub level: usize,
    pub delta: f64,
    /// `μ{φ_f ∈ U_i} ≥ μ(E_i ∩ {φ_f ∈ U_i})`, from fresh planted base samples.
    pub lower_bound: Proportion,
    pub lower_bound_scale: f64,
    /// Unconditional frequency of `φ_f ∈ U_i`.
    pub frequency: Proportion,
    pub indeterminate: u64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetApproximation {
    pub level: usize,
    pub gamma: f64,
    /// `μ(f⁻¹(V̂_{i,0}) △ A_i)`.
    pub symmetric_difference: Proportion,
    /// The final covers `V̂_{i,0}` and `V̂_{i,1}` are disjoint.
    pub covers_disjoint: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub samples: usize,
    pub hits: Vec<BallHit>,
    pub sets: Vec<SetApproximation>,
    pub pass: bool,
}

fn membership(model: &ModelFunction, x: &PointHandle, ball: &BallSpec, n: usize, w: &WeightTable) -> Membership {
    ball_membership(&phi(model, x, n, w), ball, w).0
}

/// Checks `μ{φ_f ∈ U_i} ≥ δ_i` and `μ(f⁻¹(V̂_{i,0}) △ A_i) < γ_i` at 95% confidence.
pub fn support_and_iso_check(build: &ModelBuild, sys: &DynamicalSystem, w: &WeightTable, samples: usize) -> Result<SupportReport> {
    if samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    let model = &build.model;
    let last = build.history.last().ok_or_else(|| Error::Domain("empty build history".into()))?;
    let n = build.history.len();
    let verify = DynamicalSystem { seed: crate::seed::derive(build.seed, "verify", 0), ..sys.clone() };

    let hits: Vec<BallHit> = build
        .history
        .iter()
        .map(|rec| {
            let i = rec.stage;
            let trunc = rec.tower_height;
            let tower = &model.patches[i - 1].tower;
            let planted: Vec<Membership> = (0..samples as u64)
                .into_par_iter()
                .map(|draw| match tower.sample_base(&verify, "support", draw) {
                    Some(x) => membership(model, &x, &rec.ball, trunc, w),
                    None => Membership::Outside,
                })
                .collect();
            let free: Vec<Membership> = (0..samples as u64)
                .into_par_iter()
                .map(|draw| membership(model, &verify.sample_in_stream("support/free", draw, Default::default()), &rec.ball, trunc, w))
                .collect();
            let count = |v: &[Membership], m: Membership| v.iter().filter(|s| **s == m).count() as u64;
            let lower_bound = Proportion::wilson(count(&planted, Membership::Inside), samples as u64);
            let lower_bound_scale = 0.5f64.powi(tower.marker_len as i32);
            let delta = last.budgets.delta[i - 1];
            BallHit {
                level: i,
                delta,
                lower_bound,
                lower_bound_scale,
                frequency: Proportion::wilson(count(&free, Membership::Inside), samples as u64),
                indeterminate: count(&free, Membership::Indeterminate) + count(&planted, Membership::Indeterminate),
                pass: lower_bound.lower * lower_bound_scale >= delta,
            }
        })
        .collect();

    let beta = last.budgets.beta[n - 1];
    let diffs: Vec<Vec<bool>> = (0..samples as u64)
        .into_par_iter()
        .map(|draw| {
            let x = verify.sample_in_stream("support/sets", draw, Default::default());
            let v = model.eval(&x);
            (1..=n)
                .map(|i| model.splits[i - 1].set.contains(&x) != in_cover(&last.value_sets[i - 1].zero, beta, v))
                .collect()
        })
        .collect();
    let sets = (1..=n)
        .map(|i| {
            let vs = &last.value_sets[i - 1];
            let covers_disjoint = super::build::gap(&vs.zero, &vs.one) > beta;
            let symmetric_difference = Proportion::wilson(diffs.iter().filter(|d| d[i - 1]).count() as u64, samples as u64);
            let gamma = last.budgets.gamma[i - 1];
            SetApproximation { level: i, gamma, symmetric_difference, covers_disjoint, pass: covers_disjoint && symmetric_difference.upper < gamma }
        })
        .collect::<Vec<_>>();
    let pass = sets.iter().all(|s| s.pass) && hits.iter().all(|h| h.pass);
    Ok(SupportReport { samples, hits, sets, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitFrequency {
    pub steps: usize,
    pub visits: u64,
    pub indeterminate: u64,
    pub frequency: Proportion,
    /// Frequency over the first half of the steps.
    pub half_frequency: f64,
}

fn tally(status: &[Membership]) -> OrbitFrequency {
    let steps = status.len();
    let visits = status.iter().filter(|m| **m == Membership::Inside).count() as u64;
    let half = steps / 2;
    let half_visits = status[..half].iter().filter(|m| **m == Membership::Inside).count();
    OrbitFrequency {
        steps,
        visits,
        indeterminate: status.iter().filter(|m| **m == Membership::Indeterminate).count() as u64,
        frequency: Proportion::wilson(visits, steps as u64),
        half_frequency: if half > 0 { half_visits as f64 / half as f64 } else { f64::NAN },
    }
}

/// `(1/N) Σ_{n<N} 1_U(S_aⁿ v)` for a finitely supported `v`. Weights off the
/// table are bracketed by `[0, q^{Nmax}]`.
pub fn orbit_frequency(
    spec: &crate::group::GroupSpec,
    v: &WeightedVector,
    a: &GroupElement,
    ball: &BallSpec,
    steps: usize,
    w: &WeightTable,
) -> Result<OrbitFrequency> {
    spec.validate(a)?;
    if spec.is_identity(a) {
        return Err(Error::Domain("the cyclic subgroup of the identity is finite".into()));
    }
    let mut cur = v.clone();
    let mut status = Vec::with_capacity(steps);
    for _ in 0..steps {
        let e = cur.axpy(-1.0, &ball.center).norm_eval(w);
        status.push(if e.upper < ball.radius {
            Membership::Inside
        } else if e.norm >= ball.radius {
            Membership::Outside
        } else {
            Membership::Indeterminate
        });
        cur = cur.shift(spec, a);
    }
    Ok(tally(&status))
}

/// Membership of `S_aⁿ φ_f(x) = φ_f(T_{aⁿ} x)` in `U` for `n < steps`.
pub fn model_orbit_series(
    model: &ModelFunction,
    x: &PointHandle,
    a: &GroupElement,
    ball: &BallSpec,
    n_trunc: usize,
    steps: usize,
    w: &WeightTable,
) -> Result<Vec<Membership>> {
    let spec = &model.group;
    spec.validate(a)?;
    if spec.is_identity(a) {
        return Err(Error::Domain("the cyclic subgroup of the identity is finite".into()));
    }
    let mut y = x.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        out.push(membership(model, &y, ball, n_trunc, w));
        y = y.act(a)?;
    }
    Ok(out)
}

/// Orbit frequency of `v = φ_f(x)`, using `S_aⁿ φ_f(x) = φ_f(T_{aⁿ} x)`.
pub fn model_orbit_frequency(
    model: &ModelFunction,
    x: &PointHandle,
    a: &GroupElement,
    ball: &BallSpec,
    n_trunc: usize,
    steps: usize,
    w: &WeightTable,
) -> Result<OrbitFrequency> {
    Ok(tally(&model_orbit_series(model, x, a, ball, n_trunc, steps, w)?))
}

/// Visit tallies of the first `n` steps of a membership series.
pub fn orbit_tally(series: &[Membership]) -> OrbitFrequency {
    tally(series)
}
