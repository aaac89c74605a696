//! The staged finite-valued function `f_n`, the factor map `φ_f` and
//! truncation-aware ball membership.

use serde::{Deserialize, Serialize};

use crate::dynamics::{PointHandle, SetDescriptor, TowerSpec};
use crate::group::GroupSpec;
use crate::space::{BallSpec, WeightedVector};
use crate::walk::WeightTable;

/// A tower patch: on `gE`, `g ∈ B_N`, the base value becomes `ξ(g)` (zero
/// on the annulus `B_N ∖ B_{N₀}`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Patch {
    pub stage: usize,
    pub tower: TowerSpec,
    pub center: WeightedVector,
    pub n0: usize,
}

/// A split: values move by `−offset` on `A` and by `+offset` off `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub stage: usize,
    pub set_index: u64,
    pub set: SetDescriptor,
    pub offset: f64,
}

/// `f_n(x) = base_n(x) + Σ_{l ≤ n} σ_l(x) s_l`, where `base_n` is the value
/// written by the latest tower containing `x` (zero elsewhere) and
/// `σ_l = −1` on `A_l`, `+1` off it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFunction {
    pub group: GroupSpec,
    /// Spacing `D = 2^{−M}` of the base-value grid.
    pub grid_step: f64,
    /// Base values lie in `{jD : |jD| ≤ grid_radius}`.
    pub grid_radius: f64,
    pub patches: Vec<Patch>,
    pub splits: Vec<Split>,
}

impl ModelFunction {
    pub fn new(group: GroupSpec, grid_step: f64, grid_radius: f64) -> Self {
        ModelFunction { group, grid_step, grid_radius, patches: Vec::new(), splits: Vec::new() }
    }

    pub fn stages(&self) -> usize {
        self.splits.len()
    }

    /// Base value from the first `patches` towers.
    pub fn base(&self, x: &PointHandle, patches: usize) -> f64 {
        for p in self.patches[..patches].iter().rev() {
            if let Some(g) = p.tower.level(x) {
                return p.center.get(&g);
            }
        }
        0.0
    }

    /// Base from the first `patches` towers plus the first `splits` offsets.
    pub fn eval_partial(&self, x: &PointHandle, patches: usize, splits: usize) -> f64 {
        let mut v = self.base(x, patches);
        for s in &self.splits[..splits] {
            v += if s.set.contains(x) { -s.offset } else { s.offset };
        }
        v
    }

    /// `f_n`.
    pub fn eval_stage(&self, x: &PointHandle, n: usize) -> f64 {
        self.eval_partial(x, n, n)
    }

    /// The final `f`.
    pub fn eval(&self, x: &PointHandle) -> f64 {
        self.eval_partial(x, self.patches.len(), self.splits.len())
    }

    /// `sup |f|` for the given numbers of patches and splits.
    pub fn sup_bound(&self, splits: usize) -> f64 {
        self.grid_radius + self.splits[..splits].iter().map(|s| s.offset).sum::<f64>()
    }
}

/// `φ_f(x)` on `B_N` with the norm bound of the discarded part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub vector: WeightedVector,
    pub radius: usize,
    /// `sup|f| · √(1 − w(B_N) + q^{Nmax})`.
    pub tail_bound: f64,
    /// `sup|f|` used for the bound.
    pub sup: f64,
    /// `1 − w(B_N) + q^{Nmax}`.
    pub tail_mass: f64,
}

/// Evaluation of `f_n` (or a partial stage) at every `T_g x`, `g ∈ B_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageView {
    pub patches: usize,
    pub splits: usize,
}

impl StageView {
    pub fn full(model: &ModelFunction) -> Self {
        StageView { patches: model.patches.len(), splits: model.splits.len() }
    }

    pub fn stage(n: usize) -> Self {
        StageView { patches: n, splits: n }
    }
}

pub fn phi_view(model: &ModelFunction, x: &PointHandle, n_trunc: usize, w: &WeightTable, view: StageView) -> PhiValue {
    let ball = model.group.ball(n_trunc).expect("truncation ball within cap");
    let vector = WeightedVector::from_atoms(ball.iter().map(|g| {
        let y = x.act(g).expect("element of the acting group");
        (g.clone(), model.eval_partial(&y, view.patches, view.splits))
    }));
    let tail_mass = (1.0 - w.mass_of(&ball)).max(0.0) + w.tail_bound;
    let sup = model.sup_bound(view.splits);
    PhiValue { vector, radius: n_trunc, tail_bound: sup * tail_mass.sqrt(), sup, tail_mass }
}

/// `φ_f(x)` truncated to `B_{n_trunc}` for the final model.
pub fn phi(model: &ModelFunction, x: &PointHandle, n_trunc: usize, w: &WeightTable) -> PhiValue {
    phi_view(model, x, n_trunc, w, StageView::full(model))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    /// The guard band straddles the radius.
    Indeterminate,
}

/// Distance bracket from `φ` to the ball center and the membership verdict.
///
/// On `B_N` the stored weight underestimates the true one by at most `q^{Nmax}`
/// in total, and off `B_N` the true mass is at most `1 − w(B_N)`, so with
/// `c = sup|f| + sup|ξ|` the true distance lies in
/// `[d_N, √(d_N² + c²(1 − w(B_N) + q^{Nmax})))`.
pub fn ball_membership(phi: &PhiValue, ball: &BallSpec, w: &WeightTable) -> (Membership, f64, f64) {
    assert!(ball.n0 <= phi.radius, "the center must be supported inside the truncation ball");
    let diff = phi.vector.axpy(-1.0, &ball.center);
    let lower = diff.norm(w);
    let xi_sup = ball.center.iter().map(|(_, c)| c.abs()).fold(0.0, f64::max);
    let c = phi.sup + xi_sup;
    let upper = (lower * lower + c * c * phi.tail_mass).sqrt();
    let verdict = if upper < ball.radius {
        Membership::Inside
    } else if lower >= ball.radius {
        Membership::Outside
    } else {
        Membership::Indeterminate
    };
    (verdict, lower, upper)
}
