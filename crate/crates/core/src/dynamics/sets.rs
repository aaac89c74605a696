//! The dense family of sets `A_n`: cylinders for Bernoulli shifts, dyadic
//! boxes for rotations, repeated along the ruler sequence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DynamicalSystem, PointHandle, SystemKind};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetDescriptor {
    /// `{x : x(g) = b for all (g, b)}`.
    Cylinder(#[serde(with = "crate::pairs")] BTreeMap<GroupElement, bool>),
    /// Product of half-open arcs `[lo, hi)` of the torus.
    Arcs(Vec<(f64, f64)>),
}

impl SetDescriptor {
    pub fn full_cylinder() -> Self {
        SetDescriptor::Cylinder(BTreeMap::new())
    }

    pub fn measure(&self) -> f64 {
        match self {
            SetDescriptor::Cylinder(c) => 0.5f64.powi(c.len() as i32),
            SetDescriptor::Arcs(a) => a.iter().map(|(lo, hi)| hi - lo).product(),
        }
    }

    pub fn contains(&self, x: &PointHandle) -> bool {
        match self {
            SetDescriptor::Cylinder(c) => c.iter().all(|(g, b)| x.bit(g) == *b),
            SetDescriptor::Arcs(a) => {
                let coords = x.rotation_coords().expect("arc sets need a rotation point");
                a.iter().zip(coords).all(|((lo, hi), t)| *lo <= t && t < *hi)
            }
        }
    }
}

/// Position of the lowest set bit of `n ≥ 1`. Every value recurs infinitely often.
pub fn ruler(n: u64) -> usize {
    assert!(n >= 1, "the ruler sequence starts at 1");
    n.trailing_zeros() as usize
}

/// `A_n = D_{r(n)}` for `n ≥ 1`, where `D_0, D_1, …` enumerates cylinders on
/// `B_0, B_1, …` (each coordinate set to 1, 0 or left free, in that digit
/// order) or dyadic boxes of side `2^{−m}`, level by level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetFamily {
    pub group: GroupSpec,
    /// Torus dimension for rotations, `None` for Bernoulli cylinders.
    pub torus_dim: Option<usize>,
}

impl SetFamily {
    pub fn for_system(sys: &DynamicalSystem) -> Self {
        let torus_dim = match &sys.kind {
            SystemKind::Bernoulli => None,
            SystemKind::Rotation { alpha } => Some(alpha.len()),
        };
        SetFamily { group: sys.group, torus_dim }
    }

    /// The `k`-th descriptor of the dense enumeration.
    pub fn descriptor(&self, k: usize) -> Result<SetDescriptor> {
        let mut k = k as u128;
        for m in 0.. {
            match self.torus_dim {
                None => {
                    let ball = self.group.ball(m)?;
                    let size = 3u128.checked_pow(ball.len() as u32).unwrap_or(u128::MAX);
                    if k < size {
                        let mut cyl = BTreeMap::new();
                        let mut rest = k;
                        for g in ball.iter().rev() {
                            match rest % 3 {
                                0 => {
                                    cyl.insert(g.clone(), true);
                                }
                                1 => {
                                    cyl.insert(g.clone(), false);
                                }
                                _ => {}
                            }
                            rest /= 3;
                        }
                        return Ok(SetDescriptor::Cylinder(cyl));
                    }
                    k -= size;
                }
                Some(d) => {
                    let side = 1u128 << m;
                    let size = side.checked_pow(d as u32).unwrap_or(u128::MAX);
                    if k < size {
                        let w = 1.0 / side as f64;
                        let mut rest = k;
                        let mut arcs = vec![(0.0, 1.0); d];
                        for arc in arcs.iter_mut().rev() {
                            let j = (rest % side) as f64;
                            *arc = (j * w, (j + 1.0) * w);
                            rest /= side;
                        }
                        return Ok(SetDescriptor::Arcs(arcs));
                    }
                    k -= size;
                }
            }
        }
        Err(Error::Domain("descriptor index out of range".into()))
    }

    /// `A_n`, `n ≥ 1`.
    pub fn set(&self, n: u64) -> Result<SetDescriptor> {
        self.descriptor(ruler(n))
    }

    /// Membership `x ∈ A_n`.
    pub fn eval_set(&self, n: u64, x: &PointHandle) -> Result<bool> {
        Ok(self.set(n)?.contains(x))
    }
}
