//! Rokhlin towers for Bernoulli shifts over `ℤ` and `ℤᵈ` from rare markers.
//!
//! The marker at `k` is the pattern `1^{L−1} 0` read along `a_1^j k`,
//! `j < L`. The base `E` is "marker at `e`, no marker at any
//! `k ∈ B_{2N} ∖ {e}`", optionally intersected with a cylinder. If
//! `x ∈ gE ∩ hE` for `g ≠ h ∈ B_N` then `T_{g⁻¹}x ∈ E` has a second marker at
//! `h⁻¹g ∈ B_{2N}`, so the translates are disjoint by construction and
//! `μ(B_N E) = |B_N| μ(E) ≤ |B_N| 2^{−L}`.
//!
//! With a pattern seed the marker bits are hashed instead; disjointness does
//! not depend on the pattern, only `μ(E)` does.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DynamicalSystem, PointHandle};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::stats::{Interval, Proportion};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerOptions {
    /// Marker length `L`; the smallest feasible one when absent.
    pub marker_len: Option<usize>,
    /// Samples of μ conditioned on the marker at `e`, used for `μ(E)`.
    pub planted_samples: usize,
    /// Unconditional samples for the collision and direct-measure checks.
    pub direct_samples: usize,
    /// Restrict `E` to this cylinder.
    #[serde(default, with = "crate::pairs::option")]
    pub within: Option<BTreeMap<GroupElement, bool>>,
    /// Hashed marker pattern instead of `1^{L−1} 0`.
    #[serde(default)]
    pub pattern_seed: Option<u64>,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions { marker_len: None, planted_samples: 10_000, direct_samples: 100_000, within: None, pattern_seed: None }
    }
}

#[derive(Clone, Debug)]
struct Geometry {
    ball: Vec<GroupElement>,
    ball_inv: Vec<GroupElement>,
    exclusion: Vec<GroupElement>,
    marker: Vec<GroupElement>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerSpec {
    pub group: GroupSpec,
    pub id: u64,
    pub height: usize,
    pub marker_len: usize,
    pub exclusion_radius: usize,
    #[serde(with = "crate::pairs::option")]
    pub within: Option<BTreeMap<GroupElement, bool>>,
    #[serde(default)]
    pub pattern_seed: Option<u64>,
    pub ball_size: usize,
    pub eta: f64,
    /// `|B_N| 2^{−L}`, a certified upper bound for `μ(B_N E)`.
    pub measure_bound: f64,
    /// `P(x ∈ E | marker at e)` from planted samples.
    pub base_given_marker: Proportion,
    pub mu_e: Interval,
    pub mu_bne: Interval,
    /// Unconditional frequency of `B_N E`, a cross-check of `mu_bne`.
    pub direct: Proportion,
    pub collisions: u64,
    pub pass: bool,
    #[serde(skip)]
    geometry: OnceLock<Geometry>,
}

impl TowerSpec {
    fn geometry(&self) -> &Geometry {
        self.geometry.get_or_init(|| {
            let spec = &self.group;
            let ball = spec.ball(self.height).expect("tower ball fits the cap");
            let ball_inv = ball.iter().map(|g| spec.inverse_unchecked(g)).collect();
            let exclusion = spec
                .ball(self.exclusion_radius)
                .expect("exclusion ball fits the cap")
                .into_iter()
                .filter(|k| !spec.is_identity(k))
                .collect();
            let a = spec.positive_generators().expect("f.g.")[0].clone();
            let marker = (0..self.marker_len as i64).map(|j| spec.pow(&a, j).unwrap()).collect();
            Geometry { ball, ball_inv, exclusion, marker }
        })
    }

    pub fn ball(&self) -> &[GroupElement] {
        &self.geometry().ball
    }

    fn pattern_bit(&self, j: usize) -> bool {
        match self.pattern_seed {
            None => j + 1 < self.marker_len,
            Some(s) => crate::seed::derive(s, "marker", j as u64) & 1 == 1,
        }
    }

    /// Absolute marker coordinates at `e`, with their pattern bits.
    pub fn marker_pattern(&self) -> BTreeMap<GroupElement, bool> {
        self.geometry().marker.iter().enumerate().map(|(j, g)| (g.clone(), self.pattern_bit(j))).collect()
    }

    /// Marker of `T_k x` at `e`.
    fn marker_at(&self, x: &PointHandle, k: &GroupElement) -> bool {
        self.geometry()
            .marker
            .iter()
            .enumerate()
            .all(|(j, a)| x.bit(&self.group.multiply_unchecked(a, k)) == self.pattern_bit(j))
    }

    pub fn in_base(&self, x: &PointHandle) -> bool {
        let e = self.group.identity();
        self.marker_at(x, &e)
            && self.geometry().exclusion.iter().all(|k| !self.marker_at(x, k))
            && self.within.as_ref().is_none_or(|c| c.iter().all(|(g, b)| x.bit(g) == *b))
    }

    /// The unique `g ∈ B_N` with `x ∈ gE`, i.e. `T_{g⁻¹} x ∈ E`.
    pub fn level(&self, x: &PointHandle) -> Option<GroupElement> {
        let geo = self.geometry();
        geo.ball.iter().zip(&geo.ball_inv).find_map(|(g, gi)| {
            let y = x.act_unchecked(gi);
            self.in_base(&y).then(|| g.clone())
        })
    }

    /// Number of `g ∈ B_N` with `x ∈ gE`.
    pub fn memberships(&self, x: &PointHandle) -> usize {
        self.geometry().ball_inv.iter().filter(|gi| self.in_base(&x.act_unchecked(gi))).count()
    }

    /// A point of `E` conditioned on the marker, or `None` when the planted
    /// sample falls outside `E`.
    pub fn sample_base(&self, sys: &DynamicalSystem, label: &str, draw: u64) -> Option<PointHandle> {
        let x = sys.sample_in_stream(&format!("{label}/tower-{}", self.id), draw, self.marker_pattern());
        self.in_base(&x).then_some(x)
    }
}

/// Builds the marker tower of height `n` with `μ(B_N E) < η/2`.
pub fn rokhlin_tower(sys: &DynamicalSystem, n: usize, eta: f64, id: u64, opts: &TowerOptions) -> Result<TowerSpec> {
    if !sys.is_bernoulli() || !matches!(sys.group, GroupSpec::Integers | GroupSpec::Lattice { .. }) {
        return Err(Error::Unsupported("towers are built for Bernoulli shifts over ℤ and ℤᵈ".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("η = {eta} outside (0, 1)")));
    }
    if opts.planted_samples == 0 {
        return Err(Error::Domain("planted sample count must be positive".into()));
    }
    let ball_size = sys.group.ball(n)?.len();
    sys.group.ball(2 * n)?;
    let min_len = (1usize..=1000).find(|l| ball_size as f64 * 0.5f64.powi(*l as i32) < eta / 2.0).ok_or(Error::Tower {
        reason: format!("|B_{n}| = {ball_size} needs a marker longer than 1000"),
        suggested_marker: 1001,
    })?;
    let marker_len = opts.marker_len.unwrap_or(min_len.max(2));
    if marker_len < min_len || marker_len < 2 {
        return Err(Error::Tower {
            reason: format!("|B_{n}|·2^-{marker_len} is not below η/2 = {}", eta / 2.0),
            suggested_marker: min_len.max(2),
        });
    }
    let mut tower = TowerSpec {
        group: sys.group,
        id,
        height: n,
        marker_len,
        exclusion_radius: 2 * n,
        within: opts.within.clone(),
        pattern_seed: opts.pattern_seed,
        ball_size,
        eta,
        measure_bound: ball_size as f64 * 0.5f64.powi(marker_len as i32),
        base_given_marker: Proportion::wilson(0, 1),
        mu_e: Interval { estimate: 0.0, lower: 0.0, upper: 0.0 },
        mu_bne: Interval { estimate: 0.0, lower: 0.0, upper: 0.0 },
        direct: Proportion::wilson(0, 1),
        collisions: 0,
        pass: false,
        geometry: OnceLock::new(),
    };

    // planted samples: x ∈ E given the marker, and T_h x must lie in hE only
    let planted: Vec<(bool, bool)> = (0..opts.planted_samples as u64)
        .into_par_iter()
        .map(|draw| match tower.sample_base(sys, "build", draw) {
            None => (false, false),
            Some(x) => {
                let h = &tower.ball()[draw as usize % ball_size];
                (true, tower.memberships(&x.act_unchecked(h)) != 1)
            }
        })
        .collect();
    let inside = planted.iter().filter(|p| p.0).count() as u64;
    let mut collisions = planted.iter().filter(|p| p.1).count() as u64;
    if inside == 0 {
        return Err(Error::Tower {
            reason: "no planted sample fell in the base; the restriction cylinder may contradict the marker".into(),
            suggested_marker: marker_len,
        });
    }

    let direct: Vec<usize> = (0..opts.direct_samples as u64)
        .into_par_iter()
        .map(|draw| tower.memberships(&sys.sample_in_stream(&format!("direct/tower-{id}"), draw, BTreeMap::new())))
        .collect();
    collisions += direct.iter().filter(|m| **m > 1).count() as u64;
    let direct_hits = direct.iter().filter(|m| **m > 0).count() as u64;

    let p = Proportion::wilson(inside, opts.planted_samples as u64);
    let base = 0.5f64.powi(marker_len as i32);
    tower.base_given_marker = p;
    tower.mu_e = p.scaled(base);
    tower.mu_bne = p.scaled(base * ball_size as f64);
    tower.direct = if opts.direct_samples > 0 {
        Proportion::wilson(direct_hits, opts.direct_samples as u64)
    } else {
        Proportion { hits: 0, trials: 0, estimate: f64::NAN, lower: 0.0, upper: 1.0 }
    };
    tower.collisions = collisions;
    tower.pass = collisions == 0 && tower.mu_e.lower > 0.0 && tower.mu_bne.upper < eta / 2.0;
    Ok(tower)
}
