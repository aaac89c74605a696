//! Concrete free ergodic measure-preserving actions: Bernoulli shifts with
//! lazily realized fair-coin coordinates, and irrational rotations of the
//! torus for `ℤᵈ`.

mod sets;
mod tower;

pub use sets::{ruler, SetDescriptor, SetFamily};
pub use tower::{rokhlin_tower, TowerOptions, TowerSpec};

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::seed::{combine, derive, mix64, unit_f64};

/// Default bound on realized coordinates cached per point.
pub const DEFAULT_CACHE_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemKind {
    /// Fair coins on `{0,1}^G` with `(T_h x)(g) = x(gh)`.
    Bernoulli,
    /// `T_n x = x + (n_1 α_1, …, n_d α_d) mod 1` on `[0,1)^d`, for `ℤᵈ`.
    Rotation { alpha: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicalSystem {
    pub group: GroupSpec,
    pub kind: SystemKind,
    pub seed: u64,
    pub cache_cap: usize,
}

impl DynamicalSystem {
    pub fn new(group: GroupSpec, kind: SystemKind, seed: u64) -> Result<Self> {
        if let SystemKind::Rotation { alpha } = &kind {
            let d = match group {
                GroupSpec::Integers => 1,
                GroupSpec::Lattice { d } => d as usize,
                _ => return Err(Error::Unsupported("rotation systems are defined for ℤ and ℤᵈ".into())),
            };
            if alpha.len() != d {
                return Err(Error::Domain(format!("{} frequencies given for rank {d}", alpha.len())));
            }
            if alpha.iter().any(|a| !a.is_finite() || a.fract() == 0.0) {
                return Err(Error::Domain("rotation frequencies must be finite and non-integer".into()));
            }
        }
        Ok(DynamicalSystem { group, kind, seed, cache_cap: DEFAULT_CACHE_CAP })
    }

    pub fn bernoulli(group: GroupSpec, seed: u64) -> Self {
        DynamicalSystem { group, kind: SystemKind::Bernoulli, seed, cache_cap: DEFAULT_CACHE_CAP }
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self.kind, SystemKind::Bernoulli)
    }

    /// The `draw`-th independent μ-distributed point.
    pub fn sample_point(&self, draw: u64) -> PointHandle {
        self.sample_in_stream("point", draw, BTreeMap::new())
    }

    /// A point from an independent stream with prescribed coordinates. For a
    /// Bernoulli system this samples μ conditioned on the planted cylinder.
    pub fn sample_in_stream(&self, label: &str, draw: u64, planted: BTreeMap<GroupElement, bool>) -> PointHandle {
        let key = derive(self.seed, label, draw);
        let base = match &self.kind {
            SystemKind::Bernoulli => Base::Bernoulli,
            SystemKind::Rotation { alpha } => Base::Rotation {
                x: (0..alpha.len()).map(|i| unit_f64(combine(key, i as u64))).collect(),
                alpha: alpha.clone(),
            },
        };
        PointHandle {
            spec: self.group,
            offset: self.group.identity(),
            state: Rc::new(RefCell::new(PointState {
                key,
                base,
                planted,
                cache: HashMap::new(),
                fifo: VecDeque::new(),
                pinned: HashSet::new(),
                cap: self.cache_cap,
                evictions: 0,
            })),
        }
    }

    /// `T_g x`.
    pub fn act(&self, g: &GroupElement, x: &PointHandle) -> Result<PointHandle> {
        x.act(g)
    }
}

#[derive(Debug)]
enum Base {
    Bernoulli,
    Rotation { x: Vec<f64>, alpha: Vec<f64> },
}

#[derive(Debug)]
struct PointState {
    key: u64,
    base: Base,
    planted: BTreeMap<GroupElement, bool>,
    cache: HashMap<GroupElement, bool>,
    fifo: VecDeque<GroupElement>,
    pinned: HashSet<GroupElement>,
    cap: usize,
    evictions: u64,
}

impl PointState {
    fn bit(&mut self, p: &GroupElement) -> bool {
        if let Some(b) = self.planted.get(p) {
            return *b;
        }
        if let Some(b) = self.cache.get(p) {
            return *b;
        }
        let b = mix64(combine(self.key, element_key(p))) & 1 == 1;
        if self.cache.len() >= self.cap {
            self.evict_one();
        }
        if self.cache.len() < self.cap {
            self.cache.insert(p.clone(), b);
            self.fifo.push_back(p.clone());
        }
        b
    }

    fn evict_one(&mut self) {
        for _ in 0..self.fifo.len() {
            let old = self.fifo.pop_front().expect("non-empty");
            if self.pinned.contains(&old) {
                self.fifo.push_back(old);
            } else {
                self.cache.remove(&old);
                self.evictions += 1;
                return;
            }
        }
    }
}

/// Stable 64-bit key of a group element, independent of the std hasher.
pub fn element_key(g: &GroupElement) -> u64 {
    match g {
        GroupElement::Int(n) => combine(1, *n as u64),
        GroupElement::Lattice(v) => v.iter().fold(2, |h, x| combine(h, *x as u64)),
        GroupElement::Word(w) => w.iter().fold(3, |h, x| combine(h, *x as u8 as u64)),
        GroupElement::Heisenberg(t) => t.iter().fold(4, |h, x| combine(h, *x as u64)),
        GroupElement::Bits(b) => b.iter().fold(5, |h, x| combine(h, *x as u64)),
    }
}

/// A sampled point `T_o x₀`: shared lazily realized coordinates of `x₀` plus
/// the offset `o`, so that acting only composes offsets.
#[derive(Clone, Debug)]
pub struct PointHandle {
    spec: GroupSpec,
    offset: GroupElement,
    state: Rc<RefCell<PointState>>,
}

impl PointHandle {
    pub fn offset(&self) -> &GroupElement {
        &self.offset
    }

    /// `T_h x`; the coordinate of `T_h x` at `g` is the coordinate of `x` at `gh`.
    pub fn act(&self, h: &GroupElement) -> Result<PointHandle> {
        Ok(PointHandle {
            spec: self.spec,
            offset: self.spec.multiply(h, &self.offset)?,
            state: Rc::clone(&self.state),
        })
    }

    fn act_unchecked(&self, h: &GroupElement) -> PointHandle {
        PointHandle {
            spec: self.spec,
            offset: self.spec.multiply_unchecked(h, &self.offset),
            state: Rc::clone(&self.state),
        }
    }

    /// Bernoulli coordinate at `g`.
    pub fn bit(&self, g: &GroupElement) -> bool {
        let p = self.spec.multiply_unchecked(g, &self.offset);
        self.state.borrow_mut().bit(&p)
    }

    /// Marks the coordinate at `g` as never evictable.
    pub fn pin(&self, g: &GroupElement) {
        let p = self.spec.multiply_unchecked(g, &self.offset);
        self.state.borrow_mut().pinned.insert(p);
    }

    pub fn cached_len(&self) -> usize {
        self.state.borrow().cache.len()
    }

    pub fn evictions(&self) -> u64 {
        self.state.borrow().evictions
    }

    /// Torus coordinates of a rotation point.
    pub fn rotation_coords(&self) -> Option<Vec<f64>> {
        let st = self.state.borrow();
        let Base::Rotation { x, alpha } = &st.base else { return None };
        let n: Vec<i64> = match &self.offset {
            GroupElement::Int(n) => vec![*n],
            GroupElement::Lattice(v) => v.clone(),
            _ => return None,
        };
        Some(
            x.iter()
                .zip(alpha)
                .zip(n)
                .map(|((x, a), n)| {
                    // reduce n·α first to keep the sum well conditioned
                    let shift = (n as f64 * a).rem_euclid(1.0);
                    (x + shift).rem_euclid(1.0)
                })
                .collect(),
        )
    }

    /// Whether some coordinate in `window` differs between `self` and `other`.
    pub fn differs_on(&self, other: &PointHandle, window: &[GroupElement]) -> bool {
        window.iter().any(|g| self.bit(g) != other.bit(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement::*;
    use crate::stats::{ks_critical_1pct, ks_uniform, Proportion};

    const Z: GroupSpec = GroupSpec::Integers;

    #[test]
    fn determinism_and_equivariance() {
        let sys = DynamicalSystem::bernoulli(Z, 3);
        let x = sys.sample_point(11);
        let y = sys.sample_point(11);
        for g in -20..20 {
            assert_eq!(x.bit(&Int(g)), y.bit(&Int(g)));
        }
        let tx = x.act(&Int(5)).unwrap();
        for g in -20..20 {
            assert_eq!(tx.bit(&Int(g)), x.bit(&Int(g + 5)));
        }
        let composed = x.act(&Int(5)).unwrap().act(&Int(-2)).unwrap();
        assert_eq!(composed.offset(), x.act(&Int(3)).unwrap().offset());
    }

    #[test]
    fn independent_draws_agree_half_the_time() {
        let sys = DynamicalSystem::bernoulli(Z, 9);
        let (x, y) = (sys.sample_point(1), sys.sample_point(2));
        let n = 20_000;
        let agree = (0..n).filter(|g| x.bit(&Int(*g)) == y.bit(&Int(*g))).count() as u64;
        let p = Proportion::wilson(agree, n as u64);
        assert!(p.lower < 0.5 && 0.5 < p.upper, "{p:?}");
    }

    #[test]
    fn rotation_points() {
        let a = 2f64.sqrt() - 1.0;
        let sys = DynamicalSystem::new(Z, SystemKind::Rotation { alpha: vec![a] }, 4).unwrap();
        let x = sys.sample_point(0);
        let x0 = x.rotation_coords().unwrap()[0];
        let x7 = x.act(&Int(7)).unwrap().rotation_coords().unwrap()[0];
        assert!((x7 - (x0 + 7.0 * a).rem_euclid(1.0)).abs() < 1e-12);
        let xs: Vec<f64> = (0..10_000).map(|i| sys.sample_point(i).rotation_coords().unwrap()[0]).collect();
        assert!(ks_uniform(&xs) < ks_critical_1pct(xs.len()));
    }

    #[test]
    fn cache_evicts_but_keeps_pins() {
        let mut sys = DynamicalSystem::bernoulli(Z, 1);
        sys.cache_cap = 4;
        let x = sys.sample_point(0);
        x.pin(&Int(0));
        let first = x.bit(&Int(0));
        for g in 1..50 {
            x.bit(&Int(g));
        }
        assert!(x.cached_len() <= 4 && x.evictions() > 0);
        assert_eq!(x.bit(&Int(0)), first);
        assert!(x.state.borrow().cache.contains_key(&Int(0)));
    }
}
