//! The weighted space `ℓ²(G, w)`: finitely supported vectors, right
//! translations `(S_{g₀}ξ)(g) = ξ(g g₀)` and norm-bound certificates.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::seed;
use crate::walk::{ratio_bound, RestrictedMeasure, WeightTable, BOUND_SLACK};

/// A finitely supported real function on a group. Exact zeros are dropped.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedVector {
    #[serde(with = "crate::pairs")]
    coeffs: BTreeMap<GroupElement, f64>,
}

/// `‖ξ‖` with its truncation bracket. The true norm lies in `[norm, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEval {
    pub norm: f64,
    pub upper: f64,
    /// Some atom lies outside the stored weight support.
    pub truncated: bool,
}

impl WeightedVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_atoms<I: IntoIterator<Item = (GroupElement, f64)>>(atoms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (g, c) in atoms {
            *coeffs.entry(g).or_insert(0.0) += c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        WeightedVector { coeffs }
    }

    pub fn dirac(g: GroupElement) -> Self {
        Self::from_atoms([(g, 1.0)])
    }

    pub fn get(&self, g: &GroupElement) -> f64 {
        self.coeffs.get(g).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &f64)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_atoms(self.coeffs.iter().map(|(g, v)| (g.clone(), c * v)))
    }

    /// `self + c·other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        Self::from_atoms(
            self.coeffs
                .iter()
                .map(|(g, v)| (g.clone(), *v))
                .chain(other.coeffs.iter().map(|(g, v)| (g.clone(), c * v))),
        )
    }

    /// `S_{g₀}`: the atom at `g` moves to `g g₀⁻¹`.
    pub fn shift(&self, spec: &GroupSpec, g0: &GroupElement) -> Self {
        let inv = spec.inverse_unchecked(g0);
        WeightedVector {
            coeffs: self.coeffs.iter().map(|(g, c)| (spec.multiply_unchecked(g, &inv), *c)).collect(),
        }
    }

    /// `Σ ξ(g)² w(g)` over the stored weight.
    pub fn norm_sq(&self, w: &WeightTable) -> f64 {
        self.coeffs.iter().map(|(g, c)| c * c * w.get(g)).sum()
    }

    pub fn norm(&self, w: &WeightTable) -> f64 {
        self.norm_sq(w).sqrt()
    }

    /// Norm with the tail bracket: each true weight lies in
    /// `[w_stored(g), w_stored(g) + q^{n_max}]`.
    pub fn norm_eval(&self, w: &WeightTable) -> NormEval {
        let lo = self.norm_sq(w);
        let sq: f64 = self.coeffs.values().map(|c| c * c).sum();
        NormEval {
            norm: lo.sqrt(),
            upper: (lo + sq * w.tail_bound).sqrt(),
            truncated: self.coeffs.keys().any(|g| !w.contains(g)),
        }
    }

    pub fn inner(&self, other: &Self, w: &WeightTable) -> f64 {
        self.coeffs.iter().map(|(g, c)| c * other.get(g) * w.get(g)).sum()
    }

    pub fn distance(&self, other: &Self, w: &WeightTable) -> f64 {
        self.axpy(-1.0, other).norm(w)
    }

    /// `(element, coefficient)` rows in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.coeffs.iter().map(|(g, c)| (g.to_string(), *c))
    }

    pub fn from_rows<'a, I>(spec: &GroupSpec, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut atoms = Vec::new();
        for (s, c) in rows {
            if !c.is_finite() {
                return Err(Error::Domain(format!("coefficient {c} at {s} is not finite")));
            }
            atoms.push((spec.parse(s)?, c));
        }
        Ok(Self::from_atoms(atoms))
    }
}

/// An open ball `B_r(ξ)` with `supp ξ ⊆ B_{n0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: WeightedVector,
    pub radius: f64,
    pub n0: usize,
}

impl BallSpec {
    pub fn new(spec: &GroupSpec, center: WeightedVector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("ball radius {radius} must be positive")));
        }
        let n0 = center.support().map(|g| spec.word_length(g)).try_fold(0, |m, l| l.map(|l| m.max(l)))?;
        Ok(BallSpec { center, radius, n0 })
    }
}

/// Report for `‖S_a‖ ≤ √((2d+1)C)`.
///
/// Ratios are depth-consistent: `‖S_aξ‖₍ₙ₎ / ‖ξ‖₍ₙ₊₁₎` with `supp ξ ⊆ B_{N−1}`,
/// where the subscript is the truncation depth of the weight. `raw_observed`
/// uses depth `N` on both sides and is reported for reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub generator: String,
    pub bound: f64,
    pub observed: f64,
    pub observed_random: f64,
    pub observed_single_atom: f64,
    pub raw_observed: f64,
    pub domain: String,
    pub domain_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub violations: usize,
    pub pass: bool,
    /// Atom `δ_g` with the largest raw ratio, a lower bound for `‖S_a‖` at this depth.
    pub witness: String,
    pub witness_ratio: f64,
}

/// Maximum support size of the random test vectors.
const MAX_RANDOM_SUPPORT: usize = 8;

struct TrialOutcome {
    ratio: f64,
    raw: f64,
    violated: bool,
}

fn shifted_ratio(spec: &GroupSpec, w: &WeightTable, a_inv: &GroupElement, xi: &[(GroupElement, f64)], bound: f64) -> Result<TrialOutcome> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut den_raw = 0.0;
    for (g, c) in xi {
        let c2 = c * c;
        num += c2 * w.get(&spec.multiply_unchecked(g, a_inv));
        den += c2 * w.get_at_depth(g, 1).ok_or_else(|| Error::Domain(format!("lookahead does not reach {g}")))?;
        den_raw += c2 * w.get(g);
    }
    let ratio = (num / den).sqrt();
    Ok(TrialOutcome { ratio, raw: (num / den_raw).sqrt(), violated: ratio > bound + BOUND_SLACK })
}

/// Random and exhaustive single-atom search for `‖S_aξ‖ / ‖ξ‖` against
/// `√((2d+1)C)`. Trials use independent seeds derived from `(seed, trial)`.
pub fn operator_norm_certificate(
    spec: &GroupSpec,
    w: &WeightTable,
    a: &GroupElement,
    trials: usize,
    seed: u64,
) -> Result<NormCertificate> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    if !spec.generators()?.contains(a) {
        return Err(Error::Domain(format!("{a} is not a generator")));
    }
    let d = spec.rank().expect("generators exist");
    let bound = ratio_bound(d, w.params.ratio_constant(), 1).sqrt();
    let radius = w.params.n_max - 1;
    let domain = spec.ball(radius)?;
    let a_inv = spec.inverse_unchecked(a);

    let random: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed::rng(seed, "operator-norm", t as u64);
            let k = rng.random_range(1..=MAX_RANDOM_SUPPORT);
            let xi: Vec<(GroupElement, f64)> = (0..k)
                .map(|_| {
                    let g = domain[rng.random_range(0..domain.len())].clone();
                    (g, rng.sample::<f64, _>(StandardNormal))
                })
                .collect();
            let xi = WeightedVector::from_atoms(xi);
            let atoms: Vec<_> = xi.iter().map(|(g, c)| (g.clone(), *c)).collect();
            shifted_ratio(spec, w, &a_inv, &atoms, bound)
        })
        .collect::<Result<_>>()?;

    let atoms: Vec<(TrialOutcome, usize)> = domain
        .par_iter()
        .enumerate()
        .map(|(i, g)| shifted_ratio(spec, w, &a_inv, &[(g.clone(), 1.0)], bound).map(|o| (o, i)))
        .collect::<Result<_>>()?;

    let observed_random = random.iter().map(|o| o.ratio).fold(0.0, f64::max);
    let observed_single_atom = atoms.iter().map(|(o, _)| o.ratio).fold(0.0, f64::max);
    let raw_observed = random.iter().chain(atoms.iter().map(|(o, _)| o)).map(|o| o.raw).fold(0.0, f64::max);
    let (witness_ratio, witness_idx) = atoms
        .iter()
        .map(|(o, i)| (o.raw, *i))
        .fold((f64::NEG_INFINITY, 0), |best, cur| if cur.0 > best.0 { cur } else { best });
    let violations = random.iter().filter(|o| o.violated).count() + atoms.iter().filter(|(o, _)| o.violated).count();

    Ok(NormCertificate {
        generator: a.to_string(),
        bound,
        observed: observed_random.max(observed_single_atom),
        observed_random,
        observed_single_atom,
        raw_observed,
        domain: format!("B_{radius}"),
        domain_size: domain.len(),
        trials,
        seed,
        violations,
        pass: violations == 0,
        witness: domain[witness_idx].to_string(),
        witness_ratio,
    })
}

/// Report for `‖S_{g₀}‖ ≤ M_{g₀}` on a subgroup carrying a restricted weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupNormCertificate {
    pub g0: String,
    pub ambient_length: usize,
    pub bound: f64,
    /// `max ρ⁽ᴺ⁾(g g₀⁻¹) / ρ⁽ᴺ⁺ˡ⁾(g)`, `l = |ι(g₀)|`.
    pub observed: f64,
    /// `√observed`, the induced bound on the operator norm.
    pub norm_bound: f64,
    pub raw_observed: f64,
    pub domain: String,
    pub domain_size: usize,
    pub violations: usize,
    pub pass: bool,
}

/// Scans `ρ(g g₀⁻¹)/ρ(g)` over the subgroup atoms whose images lie in
/// `B_{N − |ι(g₀)|}` of the ambient group.
pub fn subgroup_norm_certificate(rm: &RestrictedMeasure, g0: &GroupElement) -> Result<SubgroupNormCertificate> {
    let emb = &rm.embedding;
    let sub = &emb.sub;
    let image = emb.map(g0)?;
    let len = emb.ambient.word_length(&image)?;
    let d = emb.ambient.rank().ok_or_else(|| Error::Unsupported("ambient group must be finitely generated".into()))?;
    let c = 1.0 / rm.q;
    let bound = ratio_bound(d, c, len);
    let depth = rm.ambient_depth;
    if len > depth {
        return Err(Error::Domain(format!("|ι(g₀)| = {len} exceeds the ambient depth {depth}")));
    }
    let radius = depth - len;
    let g0_inv = sub.inverse_unchecked(g0);

    let mut observed: f64 = 0.0;
    let mut raw: f64 = 0.0;
    let mut size = 0;
    let mut violations = 0;
    for (g, lg) in &rm.ambient_length {
        if *lg > radius {
            continue;
        }
        let deep = if len == 0 {
            rm.measure.mass(g)
        } else {
            match rm.deep_mass.get(g).and_then(|l| l.get(len - 1)) {
                Some(v) => *v,
                None => return Err(Error::Domain(format!("lookahead does not reach depth +{len} at {g}"))),
            }
        };
        let num = rm.measure.mass(&sub.multiply_unchecked(g, &g0_inv));
        let r = num / deep;
        observed = observed.max(r);
        raw = raw.max(num / rm.measure.mass(g));
        if r > bound * (1.0 + BOUND_SLACK) {
            violations += 1;
        }
        size += 1;
    }
    if size == 0 {
        return Err(Error::Domain("no subgroup atom lies in the interior domain".into()));
    }
    Ok(SubgroupNormCertificate {
        g0: g0.to_string(),
        ambient_length: len,
        bound,
        observed,
        norm_bound: observed.sqrt(),
        raw_observed: raw,
        domain: format!("ι⁻¹(B_{radius})"),
        domain_size: size,
        violations,
        pass: violations == 0,
    })
}
