//! The inductive construction of `f`: per stage, hit the next basis ball on a
//! fresh Rokhlin tower, split every value according to the next set `A_k`,
//! and re-check conditions 1ₙ–5ₙ.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::balls::basis_ball;
use super::function::{ball_membership, phi_view, Membership, ModelFunction, Patch, Split, StageView};
use crate::dynamics::{rokhlin_tower, DynamicalSystem, SetFamily, TowerOptions, TowerSpec};
use crate::error::{Error, Result};
use crate::space::BallSpec;
use crate::stats::{Interval, MeanEstimate, Proportion};
use crate::walk::WeightTable;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuildConfig {
    pub stages: usize,
    /// Index of `U_1` in the basis enumeration.
    pub first_ball: u64,
    /// `η` used at stage 1, before any budget exists.
    pub eta0: f64,
    /// Cover width `β_0` preceding stage 1.
    pub beta0: f64,
    pub gamma1: f64,
    /// `δ_i` is this fraction of the 95% lower bound of `μ(E_i ∩ hit)`.
    pub delta_factor: f64,
    /// Ceiling for the certified bound on `‖f_n‖₄`.
    pub fourth_moment_cap: f64,
    /// Samples of each tower base (conditioned on its marker).
    pub planted_samples: usize,
    /// Unconditional samples for conditions 1ₙ, 3ₙ, 5ₙ.
    pub check_samples: usize,
    pub tower_direct_samples: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            stages: 4,
            first_ball: 0,
            eta0: 0.01,
            beta0: 0.02,
            gamma1: 0.05,
            delta_factor: 0.45,
            fourth_moment_cap: 0.5,
            planted_samples: 2000,
            check_samples: 10_000,
            tower_direct_samples: 10_000,
        }
    }
}

impl BuildConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if self.stages == 0 {
            return Err(Error::Domain("at least one stage is required".into()));
        }
        if !(unit(self.eta0) && unit(self.beta0) && unit(self.gamma1) && unit(self.delta_factor) && unit(self.fourth_moment_cap)) {
            return Err(Error::Domain("eta0, beta0, gamma1, delta_factor and fourth_moment_cap must lie in (0, 1)".into()));
        }
        if self.delta_factor >= 0.5 {
            return Err(Error::Domain("delta_factor must be below 1/2 so that 4ₙ holds at n = i".into()));
        }
        if self.planted_samples < 2 || self.check_samples < 2 {
            return Err(Error::Domain("sample counts must be at least 2".into()));
        }
        Ok(())
    }
}

/// Budgets `ε_i, β_i, γ_i, δ_i` for `i = 1..=n` (stored at index `i − 1`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub epsilon: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

impl Budgets {
    pub fn stage(&self) -> usize {
        self.epsilon.len()
    }
}

/// `η = min_{i ≤ n} {ε_i, β_i, δ_i, γ_i} / (2n(n+1))`.
pub fn compute_eta(b: &Budgets) -> Result<f64> {
    let n = b.stage();
    if n == 0 || [&b.beta, &b.gamma, &b.delta].iter().any(|v| v.len() != n) {
        return Err(Error::Domain("η needs complete budgets for stages 1..n".into()));
    }
    let m = b.epsilon.iter().chain(&b.beta).chain(&b.gamma).chain(&b.delta).copied().fold(f64::INFINITY, f64::min);
    if m.is_nan() || m <= 0.0 {
        return Err(Error::Domain("budgets must be positive".into()));
    }
    Ok(m / (2.0 * n as f64 * (n as f64 + 1.0)))
}

/// The level-`i` value sets `V_{i,0}` (on `A_i`) and `V_{i,1}` (off `A_i`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueSets {
    pub level: usize,
    pub zero: Vec<f64>,
    pub one: Vec<f64>,
}

/// Smallest distance between two sorted lists.
pub fn gap(a: &[f64], b: &[f64]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut best = f64::INFINITY;
    while i < a.len() && j < b.len() {
        best = best.min((a[i] - b[j]).abs());
        if a[i] < b[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    best
}

/// Whether `v` is exactly one of the sorted values.
pub fn contains_exact(sorted: &[f64], v: f64) -> bool {
    sorted.binary_search_by(|p| p.total_cmp(&v)).is_ok()
}

/// Whether `v` lies in the cover of `sorted` by closed intervals of length `beta`.
pub fn in_cover(sorted: &[f64], beta: f64, v: f64) -> bool {
    let i = sorted.partition_point(|p| *p < v);
    [i.wrapping_sub(1), i].iter().filter_map(|k| sorted.get(*k)).any(|p| (p - v).abs() <= beta / 2.0)
}

/// Every value the first `n` stages can produce, each with its `A_l`
/// memberships. Sums run in the same order as [`ModelFunction::eval_partial`],
/// so sampled values compare exactly.
pub fn alphabet(model: &ModelFunction, n: usize) -> Vec<(f64, u64)> {
    let j_max = (model.grid_radius / model.grid_step).round() as i64;
    let mut out = Vec::new();
    for j in -j_max..=j_max {
        let b = j as f64 * model.grid_step;
        for mask in 0..(1u64 << n) {
            let mut v = b;
            for (l, s) in model.splits[..n].iter().enumerate() {
                v += if mask >> l & 1 == 1 { -s.offset } else { s.offset };
            }
            out.push((v, mask));
        }
    }
    out
}

pub fn value_sets(model: &ModelFunction, n: usize) -> Vec<ValueSets> {
    let alpha = alphabet(model, n);
    (1..=n)
        .map(|i| {
            let mut zero: Vec<f64> = alpha.iter().filter(|(_, m)| m >> (i - 1) & 1 == 1).map(|(v, _)| *v).collect();
            let mut one: Vec<f64> = alpha.iter().filter(|(_, m)| m >> (i - 1) & 1 == 0).map(|(v, _)| *v).collect();
            zero.sort_by(f64::total_cmp);
            zero.dedup();
            one.sort_by(f64::total_cmp);
            one.dedup();
            ValueSets { level: i, zero, one }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub level: usize,
    pub gap: f64,
    pub required: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub level: usize,
    /// Distance between the `β_n` covers, `gap − β_n`.
    pub separation: f64,
    pub required: f64,
    /// Every new interval sits inside an interval of the previous stage (levels `i < n`).
    pub nested: Option<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionCheck {
    pub level: usize,
    pub exceptions: Proportion,
    pub budget: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitCheck {
    pub level: usize,
    /// `μ(E^{(n)}_i)` from planted samples of the tower base.
    pub measure: Interval,
    pub required: f64,
    pub indeterminate: u64,
    pub nested: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourthMoment {
    /// Monte Carlo `∫ f_n⁴ dμ` and its standard error.
    pub estimate: MeanEstimate,
    /// `(mean + 1.96·SE)^{1/4}`.
    pub norm_upper: f64,
    /// `(Σ_l sup|ξ_l|⁴ |B_{N_l}| 2^{−L_l})^{1/4} + Σ_l s_l`.
    pub certified_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageChecks {
    pub range_samples_in_alphabet: bool,
    pub separation: Vec<SeparationCheck>,
    pub covers: Vec<CoverCheck>,
    pub exceptions: Vec<ExceptionCheck>,
    pub hits: Vec<HitCheck>,
    pub fourth_moment: FourthMoment,
    pub pass: bool,
}

/// Everything recorded at stage `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub eta: f64,
    pub ball_index: u64,
    pub ball: BallSpec,
    pub tower_height: usize,
    pub tower: TowerSpec,
    /// `sup|f̂| · √(1 − w(B_N) + q^{Nmax})`, required below `r/2`.
    pub tail_contribution: f64,
    /// Largest `‖(φ_{f̂}(x) − ξ)|_{B_N}‖` over planted base samples, required below `r/2`.
    pub restricted_max: f64,
    pub hat_hits: Proportion,
    pub split_set_index: u64,
    pub offset: f64,
    pub budgets: Budgets,
    pub value_sets: Vec<ValueSets>,
    pub checks: StageChecks,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelBuild {
    pub config: BuildConfig,
    pub seed: u64,
    pub model: ModelFunction,
    pub history: Vec<StageRecord>,
}

impl ModelBuild {
    pub fn budgets(&self) -> &Budgets {
        &self.history.last().expect("at least one stage").budgets
    }

    pub fn pass(&self) -> bool {
        self.history.iter().all(|r| r.checks.pass && r.tower.pass)
    }
}

/// A failed build with the stages completed so far.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BuildFailure {
    pub error: String,
    pub history: Vec<StageRecord>,
}

impl fmt::Display for BuildFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} completed stages)", self.error, self.history.len())
    }
}

impl std::error::Error for BuildFailure {}

struct Builder<'a> {
    sys: &'a DynamicalSystem,
    w: &'a WeightTable,
    cfg: &'a BuildConfig,
    seed: u64,
    family: SetFamily,
    model: ModelFunction,
    balls: Vec<BallSpec>,
    budgets: Budgets,
    /// Planted draws of tower `i` still in `E^{(n)}_i`.
    alive: Vec<Vec<bool>>,
    /// `Σ_l sup|ξ_l|⁴ |B_{N_l}| 2^{−L_l}`.
    fourth_power_mass: f64,
    history: Vec<StageRecord>,
}

/// Runs `cfg.stages` stages on a Bernoulli shift over `ℤ` or `ℤᵈ`.
pub fn build_model(
    sys: &DynamicalSystem,
    w: &WeightTable,
    cfg: &BuildConfig,
    seed: u64,
) -> std::result::Result<ModelBuild, Box<BuildFailure>> {
    let fail = |e: Error, history: Vec<StageRecord>| Box::new(BuildFailure { error: e.to_string(), history });
    cfg.validate().map_err(|e| fail(e, vec![]))?;
    if w.spec != sys.group {
        return Err(fail(Error::Domain("weight and system live on different groups".into()), vec![]));
    }
    let balls: Vec<BallSpec> = (0..cfg.stages as u64)
        .map(|k| basis_ball(&sys.group, cfg.first_ball + k))
        .collect::<Result<_>>()
        .map_err(|e| fail(e, vec![]))?;
    let level = balls.iter().map(|b| b.n0).max().unwrap_or(0);
    let grid_step = 0.5f64.powi(level as i32);
    let grid_radius = balls.iter().flat_map(|b| b.center.iter().map(|(_, c)| c.abs())).fold(0.0, f64::max);
    let mut b = Builder {
        sys,
        w,
        cfg,
        seed,
        family: SetFamily::for_system(sys),
        model: ModelFunction::new(sys.group, grid_step, grid_radius),
        balls,
        budgets: Budgets::default(),
        alive: Vec::new(),
        fourth_power_mass: 0.0,
        history: Vec::new(),
    };
    for k in 1..=cfg.stages {
        if let Err(e) = b.stage(k) {
            return Err(fail(e, b.history));
        }
    }
    Ok(ModelBuild { config: cfg.clone(), seed, model: b.model, history: b.history })
}

impl Builder<'_> {
    fn stage_err(k: usize, reason: String) -> Error {
        Error::Stage { stage: k, reason }
    }

    fn offsets_sum(&self) -> f64 {
        self.model.splits.iter().map(|s| s.offset).sum()
    }

    fn hit(&self, x: &crate::dynamics::PointHandle, i: usize, view: StageView) -> Membership {
        let p = &self.model.patches[i - 1];
        let phi = phi_view(&self.model, x, p.tower.height, self.w, view);
        ball_membership(&phi, &self.balls[i - 1], self.w).0
    }

    fn stage(&mut self, k: usize) -> Result<()> {
        let cfg = self.cfg;
        let eta = if k == 1 { cfg.eta0 } else { compute_eta(&self.budgets)? };
        let ball = self.balls[k - 1].clone();
        let beta_prev = self.budgets.beta.last().copied().unwrap_or(cfg.beta0);

        // (a) tower height from the tail criterion, by doubling
        let sup_hat = self.model.grid_radius + self.offsets_sum();
        let mut n = ball.n0.max(1);
        let tail = |n: usize| -> Result<f64> {
            let mass = self.w.mass_of(&self.sys.group.ball(n)?);
            Ok(sup_hat * ((1.0 - mass).max(0.0) + self.w.tail_bound).sqrt())
        };
        while tail(n)? >= ball.radius / 2.0 {
            n *= 2;
            if n > self.w.params.n_max {
                return Err(Self::stage_err(
                    k,
                    format!("tail criterion needs a tower height beyond the stored weight depth {}", self.w.params.n_max),
                ));
            }
        }
        let tail_contribution = tail(n)?;

        // marker length: μ(B_N E) < η/2 and the certified ‖f‖₄ bound stays under the cap
        let ball_size = self.sys.group.ball(n)?.len() as f64;
        let xi4 = ball.center.iter().map(|(_, c)| c.abs().powi(4)).fold(0.0, f64::max);
        let offsets_after = self.offsets_sum() + beta_prev / 8.0;
        let marker_len = (2..=1000)
            .find(|l| {
                let m = ball_size * 0.5f64.powi(*l);
                m < eta / 2.0 && (self.fourth_power_mass + xi4 * m).powf(0.25) + offsets_after < cfg.fourth_moment_cap
            })
            .ok_or_else(|| Self::stage_err(k, "no marker length meets the η and ‖f‖₄ budgets".into()))?
            as usize;
        let opts = TowerOptions {
            marker_len: Some(marker_len),
            planted_samples: cfg.planted_samples,
            direct_samples: cfg.tower_direct_samples,
            within: None,
            pattern_seed: Some(crate::seed::derive(self.seed, "marker-pattern", k as u64)),
        };
        let tower_seed = DynamicalSystem { seed: crate::seed::derive(self.seed, "tower", k as u64), ..self.sys.clone() };
        let tower = rokhlin_tower(&tower_seed, n, eta, k as u64, &opts)?;
        if !tower.pass {
            return Err(Self::stage_err(k, format!("tower check failed: {} collisions", tower.collisions)));
        }
        self.fourth_power_mass += xi4 * tower.measure_bound;
        self.model.patches.push(Patch { stage: k, tower: tower.clone(), center: ball.center.clone(), n0: ball.n0 });

        // verify f̂ on the new base
        let hat = StageView { patches: k, splits: k - 1 };
        let samples: Vec<(bool, f64, Membership)> = (0..cfg.planted_samples as u64)
            .into_par_iter()
            .map(|draw| match tower.sample_base(self.sys, "stage", draw) {
                None => (false, 0.0, Membership::Outside),
                Some(x) => {
                    let phi = phi_view(&self.model, &x, n, self.w, hat);
                    let restricted = phi.vector.axpy(-1.0, &ball.center).norm(self.w);
                    (true, restricted, ball_membership(&phi, &ball, self.w).0)
                }
            })
            .collect();
        let restricted_max = samples.iter().filter(|s| s.0).map(|s| s.1).fold(0.0, f64::max);
        if restricted_max >= ball.radius / 2.0 {
            return Err(Self::stage_err(k, format!("restricted distance {restricted_max} is not below r/2")));
        }
        let hat_hits = Proportion::wilson(samples.iter().filter(|s| s.2 == Membership::Inside).count() as u64, cfg.planted_samples as u64);
        self.alive.push(samples.iter().map(|s| s.0).collect());

        // (b) split by A_k
        let offset = (beta_prev / 8.0).min(eta / 2.0);
        let split_set_index = k as u64;
        let set = self.family.set(split_set_index)?;
        self.model.splits.push(Split { stage: k, set_index: split_set_index, set, offset });

        let sets = value_sets(&self.model, k);
        let gaps: Vec<f64> = sets.iter().map(|s| gap(&s.zero, &s.one)).collect();
        let kf = k as f64;
        // the factor keeps `gap ≥ ε(1 + 1/n)` robust to rounding
        let epsilon = gaps[k - 1] / (1.0 + 1.0 / kf) * (1.0 - 1e-9);
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Self::stage_err(k, format!("split values collide: level gaps {gaps:?}")));
        }
        self.budgets.epsilon.push(epsilon);
        let mut beta = gaps[k - 1] / (kf + 1.0).powi(2);
        for i in 1..k {
            beta = beta.min(gaps[i - 1] - self.budgets.epsilon[i - 1] * (1.0 + 1.0 / (kf + 1.0)));
        }
        beta = 0.5 * beta.min(beta_prev - 2.0 * offset);
        if beta.is_nan() || beta <= 0.0 {
            return Err(Self::stage_err(k, format!("no positive cover width: level gaps {gaps:?}")));
        }
        self.budgets.beta.push(beta);
        self.budgets.gamma.push(cfg.gamma1 * 0.5f64.powi(k as i32 - 1));

        // 4ₙ: hitting events under f_k
        let view = StageView::stage(k);
        let mut hits = Vec::with_capacity(k);
        let mut new_delta = 0.0;
        for i in 1..=k {
            let tower_i = &self.model.patches[i - 1].tower;
            let prev = &self.alive[i - 1];
            let status: Vec<Membership> = (0..cfg.planted_samples)
                .into_par_iter()
                .map(|draw| {
                    if !prev[draw] {
                        return Membership::Outside;
                    }
                    let x = tower_i.sample_base(self.sys, "stage", draw as u64).expect("base membership is fixed per draw");
                    self.hit(&x, i, view)
                })
                .collect();
            let next: Vec<bool> = status.iter().map(|m| *m == Membership::Inside).collect();
            let nested = next.iter().zip(prev).all(|(n, p)| !*n || *p);
            let indeterminate = status.iter().filter(|m| **m == Membership::Indeterminate).count() as u64;
            let count = next.iter().filter(|b| **b).count() as u64;
            let measure = Proportion::wilson(count, cfg.planted_samples as u64).scaled(0.5f64.powi(tower_i.marker_len as i32));
            if i == k {
                new_delta = cfg.delta_factor * measure.lower;
                if new_delta.is_nan() || new_delta <= 0.0 {
                    return Err(Self::stage_err(k, "no planted base sample hits the ball".into()));
                }
                self.budgets.delta.push(new_delta);
            }
            let required = self.budgets.delta[i - 1] * (1.0 + 1.0 / kf);
            hits.push(HitCheck { level: i, measure, required, indeterminate, nested, pass: nested && measure.lower >= required });
            self.alive[i - 1] = next;
        }
        debug_assert!(new_delta > 0.0);

        let checks = self.checks(k, &sets, &gaps, hits)?;
        self.history.push(StageRecord {
            stage: k,
            eta,
            ball_index: self.cfg.first_ball + k as u64 - 1,
            ball,
            tower_height: n,
            tower,
            tail_contribution,
            restricted_max,
            hat_hits,
            split_set_index,
            offset,
            budgets: self.budgets.clone(),
            value_sets: sets,
            checks,
        });
        Ok(())
    }

    fn checks(&self, k: usize, sets: &[ValueSets], gaps: &[f64], hits: Vec<HitCheck>) -> Result<StageChecks> {
        let kf = k as f64;
        let b = &self.budgets;
        let beta = b.beta[k - 1];
        let separation: Vec<SeparationCheck> = (1..=k)
            .map(|i| {
                let required = b.epsilon[i - 1] * (1.0 + 1.0 / kf);
                SeparationCheck { level: i, gap: gaps[i - 1], required, pass: gaps[i - 1] >= required }
            })
            .collect();
        let prev_sets = self.history.last().map(|r| (&r.value_sets, r.budgets.beta[k - 2]));
        let covers: Vec<CoverCheck> = (1..=k)
            .map(|i| {
                let required = b.epsilon[i - 1] * (1.0 + 1.0 / (kf + 1.0));
                let separation = gaps[i - 1] - beta;
                let nested = (i < k).then(|| {
                    let (prev, beta_prev) = prev_sets.expect("stage k − 1 recorded");
                    let p = &prev[i - 1];
                    let inside = |new: &[f64], old: &[f64]| {
                        new.iter().all(|v| {
                            let j = old.partition_point(|o| *o < *v);
                            [j.wrapping_sub(1), j]
                                .iter()
                                .filter_map(|t| old.get(*t))
                                .any(|o| v - beta / 2.0 >= o - beta_prev / 2.0 && v + beta / 2.0 <= o + beta_prev / 2.0)
                        })
                    };
                    inside(&sets[i - 1].zero, &p.zero) && inside(&sets[i - 1].one, &p.one)
                });
                CoverCheck { level: i, separation, required, nested, pass: separation >= required && nested.unwrap_or(true) }
            })
            .collect();

        // unconditional samples: range, exceptions, fourth moment
        let check_sys = DynamicalSystem { seed: crate::seed::derive(self.seed, "checks", k as u64), ..self.sys.clone() };
        let alphabet: Vec<f64> = {
            let mut v: Vec<f64> = alphabet(&self.model, k).into_iter().map(|(v, _)| v).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let sets_desc: Vec<_> = self.model.splits.iter().map(|s| s.set.clone()).collect();
        let per_sample: Vec<(bool, Vec<bool>, f64)> = (0..self.cfg.check_samples as u64)
            .into_par_iter()
            .map(|draw| {
                let x = check_sys.sample_point(draw);
                let v = self.model.eval_stage(&x, k);
                let exc = (1..=k)
                    .map(|i| {
                        let s = &sets[i - 1];
                        if sets_desc[i - 1].contains(&x) {
                            !contains_exact(&s.zero, v)
                        } else {
                            !contains_exact(&s.one, v)
                        }
                    })
                    .collect();
                (contains_exact(&alphabet, v), exc, v.powi(4))
            })
            .collect();
        let n = self.cfg.check_samples as u64;
        let range_samples_in_alphabet = per_sample.iter().all(|s| s.0);
        let exceptions = (1..=k)
            .map(|i| {
                let count = per_sample.iter().filter(|s| s.1[i - 1]).count() as u64;
                let p = Proportion::wilson(count, n);
                let budget = b.gamma[i - 1] * (1.0 - 1.0 / kf);
                let pass = if budget == 0.0 { count == 0 } else { p.upper < budget };
                ExceptionCheck { level: i, exceptions: p, budget, pass }
            })
            .collect::<Vec<_>>();
        let fourth: Vec<f64> = per_sample.iter().map(|s| s.2).collect();
        let estimate = MeanEstimate::from_samples(&fourth);
        let norm_upper = estimate.upper95().max(0.0).powf(0.25);
        let certified_bound = self.fourth_power_mass.powf(0.25) + self.offsets_sum();
        let fourth_moment = FourthMoment { estimate, norm_upper, certified_bound, pass: norm_upper < 1.0 && certified_bound < 1.0 };

        let pass = range_samples_in_alphabet
            && separation.iter().all(|c| c.pass)
            && covers.iter().all(|c| c.pass)
            && exceptions.iter().all(|c| c.pass)
            && hits.iter().all(|c| c.pass)
            && fourth_moment.pass;
        Ok(StageChecks { range_samples_in_alphabet, separation, covers, exceptions, hits, fourth_moment, pass })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_example() {
        let b = Budgets { epsilon: vec![0.1], beta: vec![0.1], gamma: vec![0.1], delta: vec![0.1] };
        assert!((compute_eta(&b).unwrap() - 0.025).abs() < 1e-15);
        let smaller = Budgets { delta: vec![0.05], ..b.clone() };
        assert!(compute_eta(&smaller).unwrap() <= compute_eta(&b).unwrap());
        assert!(compute_eta(&Budgets::default()).is_err());
    }

    #[test]
    fn gap_and_covers() {
        assert_eq!(gap(&[0.0, 1.0], &[0.25, 2.0]), 0.25);
        assert!(in_cover(&[0.0, 1.0], 0.1, 1.04) && !in_cover(&[0.0, 1.0], 0.1, 0.5));
    }
}
