//! A countable basis of open balls with finitely supported dyadic centers.
//!
//! Centers are listed level by level: level `m` holds the vectors supported
//! on `B_m` with coefficients `j/2^m`, `|j| ≤ 4^m`, that are not already
//! present at level `m − 1`. Coefficients are tried in the order
//! `0, 1, −1, 2, −2, …` (in units of `2^{−m}`), positions in canonical order
//! with the first position most significant. Index `k` is split by the
//! inverse Cantor pairing into a center index and a radius exponent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::space::{BallSpec, WeightedVector};

/// `k ↦ (x, y)` with `k = (x + y)(x + y + 1)/2 + y`.
pub fn cantor_unpair(k: u64) -> (u64, u64) {
    let w = ((((8 * k as u128 + 1) as f64).sqrt() as u128).saturating_sub(1) / 2) as u64;
    let mut w = w;
    while (w + 1) * (w + 2) / 2 <= k {
        w += 1;
    }
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    let y = k - w * (w + 1) / 2;
    (w - y, y)
}

pub fn cantor_pair(x: u64, y: u64) -> u64 {
    (x + y) * (x + y + 1) / 2 + y
}

/// The descriptor behind a basis ball: center index and radius `2^{−radius_exp}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallIndex {
    pub center: u64,
    pub radius_exp: u32,
}

fn digit_value(digit: u64) -> i64 {
    // 0, 1, −1, 2, −2, …
    if digit == 0 {
        0
    } else if digit % 2 == 1 {
        digit.div_ceil(2) as i64
    } else {
        -((digit / 2) as i64)
    }
}

fn value_digit(j: i64) -> u64 {
    if j > 0 {
        2 * j as u64 - 1
    } else {
        2 * j.unsigned_abs()
    }
}

/// Level-`m` data: the ball `B_m` and the coefficient bound `4^m`.
struct Level {
    m: u32,
    positions: Vec<GroupElement>,
    bound: i64,
}

impl Level {
    fn new(spec: &GroupSpec, m: u32) -> Result<Self> {
        Ok(Level { m, positions: spec.ball(m as usize)?, bound: 4i64.pow(m) })
    }

    fn radix(&self) -> u64 {
        2 * self.bound as u64 + 1
    }

    fn size(&self) -> Option<u64> {
        self.radix().checked_pow(self.positions.len() as u32)
    }

    fn numerators(&self, mut idx: u64) -> Vec<i64> {
        let r = self.radix();
        let mut out = vec![0; self.positions.len()];
        for slot in out.iter_mut().rev() {
            *slot = digit_value(idx % r);
            idx /= r;
        }
        out
    }

    /// Whether the numerators also describe a level-`m−1` center.
    fn in_previous(&self, nums: &[i64], prev: Option<&Level>) -> bool {
        let Some(prev) = prev else { return false };
        self.positions.iter().zip(nums).all(|(g, j)| {
            *j == 0 || (j % 2 == 0 && (j / 2).abs() <= prev.bound && prev.positions.binary_search(g).is_ok())
        })
    }

    fn vector(&self, nums: &[i64]) -> WeightedVector {
        let scale = 0.5f64.powi(self.m as i32);
        WeightedVector::from_atoms(self.positions.iter().zip(nums).map(|(g, j)| (g.clone(), *j as f64 * scale)))
    }
}

/// The `c`-th center and its level.
pub fn center(spec: &GroupSpec, c: u64) -> Result<(WeightedVector, u32)> {
    let mut c = c;
    let mut prev: Option<Level> = None;
    for m in 0..16 {
        let level = Level::new(spec, m)?;
        let size = level.size().ok_or(Error::Capacity { what: "center level", needed: usize::MAX, cap: usize::MAX })?;
        for idx in 0..size {
            let nums = level.numerators(idx);
            if level.in_previous(&nums, prev.as_ref()) {
                continue;
            }
            if c == 0 {
                return Ok((level.vector(&nums), m));
            }
            c -= 1;
        }
        prev = Some(level);
    }
    Err(Error::Domain("center index beyond the enumerated levels".into()))
}

/// Inverse of [`center`] for vectors of the dyadic family.
pub fn center_index(spec: &GroupSpec, v: &WeightedVector) -> Result<u64> {
    let mut before = 0u64;
    let mut prev: Option<Level> = None;
    for m in 0..16 {
        let level = Level::new(spec, m)?;
        let scale = (1i64 << m) as f64;
        let nums: Option<Vec<i64>> = level
            .positions
            .iter()
            .map(|g| {
                let j = v.get(g) * scale;
                (j.fract() == 0.0 && j.abs() <= level.bound as f64).then_some(j as i64)
            })
            .collect();
        let fits = nums.is_some() && v.support().all(|g| level.positions.binary_search(g).is_ok());
        let size = level.size().ok_or(Error::Capacity { what: "center level", needed: usize::MAX, cap: usize::MAX })?;
        if fits {
            let nums = nums.unwrap();
            let r = level.radix();
            let target = nums.iter().fold(0u64, |acc, j| acc * r + value_digit(*j));
            let skipped = (0..target).filter(|idx| level.in_previous(&level.numerators(*idx), prev.as_ref())).count() as u64;
            return Ok(before + target - skipped);
        }
        let new = (0..size).filter(|idx| !level.in_previous(&level.numerators(*idx), prev.as_ref())).count() as u64;
        before += new;
        prev = Some(level);
    }
    Err(Error::Domain("vector is not in the dyadic center family".into()))
}

pub fn ball_index(k: u64) -> BallIndex {
    let (c, r) = cantor_unpair(k);
    BallIndex { center: c, radius_exp: r as u32 }
}

/// `U_{k+1}`: the `k`-th basis ball, `k ≥ 0`, with `n0` the center level.
pub fn basis_ball(spec: &GroupSpec, k: u64) -> Result<BallSpec> {
    let idx = ball_index(k);
    let (c, m) = center(spec, idx.center)?;
    Ok(BallSpec { center: c, radius: 0.5f64.powi(idx.radius_exp as i32), n0: m as usize })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement::Int;

    const Z: GroupSpec = GroupSpec::Integers;

    #[test]
    fn first_balls() {
        let u = |k| basis_ball(&Z, k).unwrap();
        assert_eq!((u(0).center, u(0).radius), (WeightedVector::zero(), 1.0));
        assert_eq!((u(1).center, u(1).radius), (WeightedVector::dirac(Int(0)), 1.0));
        assert_eq!((u(2).center, u(2).radius), (WeightedVector::zero(), 0.5));
        assert_eq!((u(3).center, u(3).radius), (WeightedVector::dirac(Int(0)).scaled(-1.0), 1.0));
        assert_eq!(u(0).n0, 0);
    }

    #[test]
    fn pairing_round_trip() {
        for k in 0..5000 {
            let (x, y) = cantor_unpair(k);
            assert_eq!(cantor_pair(x, y), k);
        }
    }

    #[test]
    fn level_one_skips_level_zero() {
        // level 0 has 3 centers; the first level-1 center is 1/2 at the largest position
        let (v, m) = center(&Z, 3).unwrap();
        assert_eq!(m, 1);
        assert_eq!(v, WeightedVector::from_atoms([(Int(1), 0.5)]));
        assert_eq!(center_index(&Z, &v).unwrap(), 3);
    }
}
