//! The classical single-transformation model: a circle rotation `f` embedded
//! in `ℓ²(ℕ; ℝ²)` by `φ(z)_n = 2^{−n} φ₀(fⁿ z)`, `n ≥ 1`, which conjugates `f`
//! to the backward shift `(Tu)_n = 2u_{n+1}`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

fn embed(theta: f64) -> [f64; 2] {
    [(TAU * theta).cos(), (TAU * theta).sin()]
}

fn rotate(theta: f64, alpha: f64) -> f64 {
    (theta + alpha).rem_euclid(1.0)
}

/// Blocks `φ(z)_1, …, φ(z)_depth` for `z = e^{2πiθ}`.
pub fn feldman_embedding(theta: f64, alpha: f64, depth: usize) -> Vec<[f64; 2]> {
    let mut t = theta;
    let mut scale = 1.0;
    (1..=depth)
        .map(|_| {
            t = rotate(t, alpha);
            scale *= 0.5;
            let [c, s] = embed(t);
            [scale * c, scale * s]
        })
        .collect()
}

/// `(Tu)_n = 2u_{n+1}`; the last block needs one more coordinate and is dropped.
pub fn backward_shift(u: &[[f64; 2]]) -> Vec<[f64; 2]> {
    u.iter().skip(1).map(|[a, b]| [2.0 * a, 2.0 * b]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeldmanReport {
    pub alpha: f64,
    pub points: usize,
    pub steps: usize,
    pub seed: u64,
    /// Largest coordinate gap between `φ(fz)` and `Tφ(z)`.
    pub max_error: f64,
    /// Largest gap between the truncated `‖φ(z)‖²` and `(1 − 4^{−steps})/3`.
    pub norm_sq_error: f64,
    /// `2^{−steps} sup‖φ₀‖`, the norm of the discarded blocks.
    pub tail_bound: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn feldman_baseline(alpha: f64, points: usize, steps: usize, seed: u64) -> Result<FeldmanReport> {
    if !alpha.is_finite() || steps == 0 || points == 0 {
        return Err(Error::Domain("need a finite angle, steps ≥ 1 and points ≥ 1".into()));
    }
    let expected = (1.0 - 0.25f64.powi(steps as i32)) / 3.0;
    let (max_error, norm_sq_error) = (0..points as u64)
        .into_par_iter()
        .map(|draw| {
            let theta = seed::unit_f64(seed::derive(seed, "feldman", draw));
            let phi = feldman_embedding(theta, alpha, steps + 1);
            let lhs = feldman_embedding(rotate(theta, alpha), alpha, steps);
            let rhs = backward_shift(&phi);
            let err = lhs.iter().zip(&rhs).flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()]).fold(0.0, f64::max);
            let norm_sq: f64 = phi[..steps].iter().map(|[a, b]| a * a + b * b).sum();
            (err, (norm_sq - expected).abs())
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    let tolerance = 1e-12;
    Ok(FeldmanReport {
        alpha,
        points,
        steps,
        seed,
        max_error,
        norm_sq_error,
        tail_bound: 0.5f64.powi(steps as i32),
        tolerance,
        pass: max_error < tolerance && norm_sq_error < tolerance,
    })
}
