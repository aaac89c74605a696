//! The Markov operator `(A_ρⁿ f)(x) = Σ_g f(T_g x) ρ*ⁿ(g)` and a convergence
//! harness for the random ergodic theorem on our ergodic systems, where the
//! limit is the constant `∫ f dμ`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicalSystem, PointHandle, SetDescriptor, SystemKind};
use crate::error::{Error, Result};
use crate::group::DEFAULT_BALL_CAP;
use crate::stats::MeanEstimate;
use crate::walk::{convolution_powers, step_distribution, SparseMeasure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Observable {
    Indicator { set: SetDescriptor },
    /// `cos(2π x_coord)` on a rotation system.
    Cos { coord: usize },
    Constant { value: f64 },
}

impl Observable {
    pub fn sup_bound(&self) -> f64 {
        match self {
            Observable::Indicator { .. } | Observable::Cos { .. } => 1.0,
            Observable::Constant { value } => value.abs(),
        }
    }

    /// `∫ f dμ`.
    pub fn mean(&self) -> f64 {
        match self {
            Observable::Indicator { set } => set.measure(),
            Observable::Cos { .. } => 0.0,
            Observable::Constant { value } => *value,
        }
    }

    pub fn eval(&self, x: &PointHandle) -> f64 {
        match self {
            Observable::Indicator { set } => set.contains(x) as u8 as f64,
            Observable::Cos { coord } => (TAU * x.rotation_coords().expect("rotation point")[*coord]).cos(),
            Observable::Constant { value } => *value,
        }
    }

    fn check(&self, sys: &DynamicalSystem) -> Result<()> {
        let ok = match (self, &sys.kind) {
            (Observable::Cos { coord }, SystemKind::Rotation { alpha }) => *coord < alpha.len(),
            (Observable::Cos { .. }, _) => false,
            (Observable::Indicator { set: SetDescriptor::Arcs(_) }, SystemKind::Bernoulli) => false,
            (Observable::Indicator { set: SetDescriptor::Cylinder(c) }, SystemKind::Rotation { .. }) => c.is_empty(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("observable {self:?} does not live on this system")))
        }
    }
}

/// `(A_ρⁿ f)(x)` as an exact finite sum over `supp ρ*ⁿ`, in canonical order.
pub fn markov_average(f: &Observable, x: &PointHandle, power: &SparseMeasure) -> f64 {
    power.iter().map(|(g, m)| m * f.eval(&x.act(g).expect("element of the acting group"))).sum()
}

/// Eigenvalue of `A_ρ` on `cos(2π x_1)` for the rotation of `ℤᵈ`:
/// `(1 + 2cos 2πα_1 + 2(d−1)) / (2d+1)`.
pub fn rotation_eigenvalue(alpha: &[f64], coord: usize) -> f64 {
    let d = alpha.len() as f64;
    (1.0 + 2.0 * (TAU * alpha[coord]).cos() + 2.0 * (d - 1.0)) / (2.0 * d + 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JrtRow {
    pub n: usize,
    pub sup_deviation: f64,
    pub l2_deviation: f64,
    /// Mean squared deviation and its standard error.
    pub mean_sq: f64,
    pub mean_sq_se: f64,
    /// Exact `E|A_ρⁿf − m|²` where known.
    pub expected_mean_sq: Option<f64>,
    /// `l2(n) / l2(n−1)` and its closed form.
    pub ratio: Option<f64>,
    pub expected_ratio: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JrtReport {
    pub observable: Observable,
    pub mean: f64,
    pub samples: usize,
    pub seed: u64,
    /// `ρ(e) > 0`, so `ρ` is not carried by a coset of a proper subgroup.
    pub aperiodicity_witness: f64,
    pub rows: Vec<JrtRow>,
    /// Largest pointwise gap to `λⁿ cos(2π x_1)` (rotation, cos observable).
    pub closed_form_max_error: Option<f64>,
    pub contraction: bool,
    pub positivity: bool,
    pub monotone: bool,
    pub final_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Relative tolerance on the per-step decay ratio.
pub const RATIO_TOLERANCE: f64 = 0.05;
/// Standard errors allowed between a Monte Carlo and an exact second moment.
pub const SE_TOLERANCE: f64 = 4.0;

/// Samples `A_ρⁿ f` for `n = 0..=n_max` and compares with the ergodic limit.
pub fn jrt_convergence_report(
    sys: &DynamicalSystem,
    f: &Observable,
    n_max: usize,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> Result<JrtReport> {
    f.check(sys)?;
    if samples < 2 {
        return Err(Error::Domain("at least two samples are required".into()));
    }
    let rho = step_distribution(&sys.group)?;
    let powers = convolution_powers(&sys.group, &rho, n_max, DEFAULT_BALL_CAP)?;
    let m = f.mean();
    let stream = DynamicalSystem { seed, ..sys.clone() };

    // values[s][n] = (A_ρⁿ f)(x_s)
    let values: Vec<(Vec<f64>, Option<f64>)> = (0..samples as u64)
        .into_par_iter()
        .map(|draw| {
            let x = stream.sample_in_stream("jrt", draw, Default::default());
            let vals: Vec<f64> = powers.iter().map(|p| markov_average(f, &x, p)).collect();
            let err = match (f, &sys.kind) {
                (Observable::Cos { coord }, SystemKind::Rotation { alpha }) => {
                    let lam = rotation_eigenvalue(alpha, *coord);
                    let c0 = vals[0];
                    Some(vals.iter().enumerate().map(|(n, v)| (v - lam.powi(n as i32) * c0).abs()).fold(0.0, f64::max))
                }
                _ => None,
            };
            (vals, err)
        })
        .collect();

    let expected_ratio = match (f, &sys.kind) {
        (Observable::Cos { coord }, SystemKind::Rotation { alpha }) => Some(rotation_eigenvalue(alpha, *coord).abs()),
        _ => None,
    };
    let bernoulli_indicator = matches!((f, &sys.kind), (Observable::Indicator { set: SetDescriptor::Cylinder(c) }, SystemKind::Bernoulli) if c.len() == 1);

    let mut rows: Vec<JrtRow> = Vec::with_capacity(n_max + 1);
    let mut contraction = true;
    let mut positivity = true;
    for n in 0..=n_max {
        let dev: Vec<f64> = values.iter().map(|(v, _)| v[n] - m).collect();
        let sq: Vec<f64> = dev.iter().map(|d| d * d).collect();
        let est = MeanEstimate::from_samples(&sq);
        let sup = dev.iter().map(|d| d.abs()).fold(0.0, f64::max);
        contraction &= values.iter().all(|(v, _)| v[n].abs() <= f.sup_bound() * (1.0 + 1e-12));
        if matches!(f, Observable::Indicator { .. }) {
            positivity &= values.iter().all(|(v, _)| v[n] >= 0.0);
        }
        // independent fair coins: Var Σ ρ*ⁿ(g) x_g = ¼ Σ ρ*ⁿ(g)²
        let expected_mean_sq = bernoulli_indicator.then(|| 0.25 * powers[n].iter().map(|(_, p)| p * p).sum::<f64>());
        let l2 = est.mean.sqrt();
        let ratio = (n > 0).then(|| l2 / rows[n - 1].l2_deviation);
        let mut ok = true;
        if let Some(e) = expected_mean_sq {
            ok &= (est.mean - e).abs() <= SE_TOLERANCE * est.std_err;
        }
        if let (Some(r), Some(er)) = (ratio, expected_ratio) {
            ok &= (r - er).abs() <= RATIO_TOLERANCE * er;
        }
        rows.push(JrtRow {
            n,
            sup_deviation: sup,
            l2_deviation: l2,
            mean_sq: est.mean,
            mean_sq_se: est.std_err,
            expected_mean_sq,
            ratio,
            expected_ratio: if n > 0 { expected_ratio } else { None },
            ok,
        });
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].mean_sq <= w[0].mean_sq + SE_TOLERANCE * (w[0].mean_sq_se + w[1].mean_sq_se) + 1e-15);
    let closed_form_max_error = values.iter().filter_map(|(_, e)| *e).reduce(f64::max);
    let final_deviation = rows.last().expect("n_max + 1 rows").l2_deviation;
    let aperiodicity_witness = rho.mass(&sys.group.identity());
    let pass = rows.iter().all(|r| r.ok)
        && contraction
        && positivity
        && monotone
        && final_deviation <= tolerance
        && aperiodicity_witness > 0.0
        && closed_form_max_error.is_none_or(|e| e < 1e-10);
    Ok(JrtReport {
        observable: f.clone(),
        mean: m,
        samples,
        seed,
        aperiodicity_witness,
        rows,
        closed_form_max_error,
        contraction,
        positivity,
        monotone,
        final_deviation,
        tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupElement::Int, GroupSpec};
    use std::collections::BTreeMap;

    #[test]
    fn rotation_eigenfunction() {
        let alpha = 2f64.sqrt() - 1.0;
        let sys = DynamicalSystem::new(GroupSpec::Integers, SystemKind::Rotation { alpha: vec![alpha] }, 1).unwrap();
        let r = jrt_convergence_report(&sys, &Observable::Cos { coord: 0 }, 20, 200, 3, 1e-6).unwrap();
        assert!(r.pass, "{r:#?}");
        let lam = (1.0 + 2.0 * (TAU * alpha).cos()) / 3.0;
        assert!((r.rows[1].expected_ratio.unwrap() - lam.abs()).abs() < 1e-15);
    }

    #[test]
    fn constants_are_fixed() {
        let sys = DynamicalSystem::bernoulli(GroupSpec::Integers, 2);
        let r = jrt_convergence_report(&sys, &Observable::Constant { value: 1.0 }, 6, 50, 0, 1e-12).unwrap();
        assert!(r.rows.iter().all(|row| row.sup_deviation < 1e-12) && r.pass);
    }

    #[test]
    fn bernoulli_variance_formula() {
        let sys = DynamicalSystem::bernoulli(GroupSpec::Integers, 2);
        let f = Observable::Indicator { set: SetDescriptor::Cylinder(BTreeMap::from([(Int(0), true)])) };
        let r = jrt_convergence_report(&sys, &f, 12, 4000, 5, 0.25).unwrap();
        assert!(r.pass, "{r:#?}");
        assert_eq!(r.rows[0].expected_mean_sq, Some(0.25));
    }
}
