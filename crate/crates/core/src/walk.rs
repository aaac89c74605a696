//! Random-walk step laws, convolution powers and the weight `w = Σ pₙ ρ*ⁿ`.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Embedding, GroupElement, GroupSpec, DEFAULT_BALL_CAP};

/// Left atoms per parallel convolution chunk. Fixed so that the floating
/// point summation order does not depend on the worker count.
const CHUNK: usize = 512;

/// A finitely supported non-negative measure on a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseMeasure {
    #[serde(with = "crate::pairs")]
    atoms: BTreeMap<GroupElement, f64>,
    symmetric: bool,
}

impl SparseMeasure {
    /// Builds a measure from `(element, mass)` pairs. Zero masses are dropped,
    /// repeated elements accumulate; negative or non-finite masses are rejected.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, f64)>,
    {
        let mut table = BTreeMap::new();
        for (g, m) in atoms {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::Domain(format!("mass {m} at {g} is not a finite non-negative number")));
            }
            *table.entry(g).or_insert(0.0) += m;
        }
        table.retain(|_, m| *m > 0.0);
        Ok(SparseMeasure { atoms: table, symmetric: false })
    }

    pub fn dirac(g: GroupElement) -> Self {
        SparseMeasure { atoms: BTreeMap::from([(g, 1.0)]), symmetric: false }
    }

    pub fn mass(&self, g: &GroupElement) -> f64 {
        self.atoms.get(g).copied().unwrap_or(0.0)
    }

    /// Sum of all atoms, accumulated in canonical element order.
    pub fn total_mass(&self) -> f64 {
        self.atoms.values().sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &f64)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.atoms.keys()
    }

    pub fn is_flagged_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Checks `mass(g) == mass(g⁻¹)` bit-for-bit over the support.
    pub fn is_exactly_symmetric(&self, spec: &GroupSpec) -> bool {
        self.atoms
            .iter()
            .all(|(g, m)| self.mass(&spec.inverse_unchecked(g)) == *m)
    }

    /// Replaces `m(g)` and `m(g⁻¹)` by their mean and flags the measure symmetric.
    pub fn symmetrize(mut self, spec: &GroupSpec) -> Self {
        let keys: Vec<GroupElement> = self.atoms.keys().cloned().collect();
        let mut out = BTreeMap::new();
        for g in keys {
            if out.contains_key(&g) {
                continue;
            }
            let gi = spec.inverse_unchecked(&g);
            let a = self.mass(&g);
            let b = self.mass(&gi);
            let m = 0.5 * (a + b);
            out.insert(gi, m);
            out.insert(g, m);
        }
        out.retain(|_, m| *m > 0.0);
        self.atoms = out;
        self.symmetric = true;
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut atoms: BTreeMap<_, _> = self.atoms.iter().map(|(g, m)| (g.clone(), m * c)).collect();
        atoms.retain(|_, m| *m > 0.0);
        SparseMeasure { atoms, symmetric: self.symmetric }
    }

    pub fn into_atoms(self) -> BTreeMap<GroupElement, f64> {
        self.atoms
    }
}

/// The uniform measure on `{e} ∪ 𝔞`, mass `1/(2d+1)` per atom.
pub fn step_distribution(spec: &GroupSpec) -> Result<SparseMeasure> {
    let gens = spec.generators()?;
    let m = 1.0 / (gens.len() + 1) as f64;
    let mut atoms = BTreeMap::new();
    atoms.insert(spec.identity(), m);
    for g in gens {
        atoms.insert(g, m);
    }
    Ok(SparseMeasure { atoms, symmetric: true })
}

/// `(μ * ν)(g) = Σ_h μ(g h⁻¹) ν(h)`.
///
/// The result is flagged symmetric only when the group is abelian and both
/// factors are flagged symmetric; use [`convolution_power`] for powers.
pub fn convolve(spec: &GroupSpec, mu: &SparseMeasure, nu: &SparseMeasure, cap: usize) -> Result<SparseMeasure> {
    let left: Vec<(&GroupElement, &f64)> = mu.atoms.iter().collect();
    let right: Vec<(&GroupElement, &f64)> = nu.atoms.iter().collect();

    let partials: Vec<HashMap<GroupElement, f64>> = left
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc: HashMap<GroupElement, f64> = HashMap::new();
            for (x, mx) in chunk {
                for (y, my) in &right {
                    let g = spec.multiply_unchecked(x, y);
                    *acc.entry(g).or_insert(0.0) += *mx * *my;
                }
            }
            acc
        })
        .collect();

    let mut merged: HashMap<GroupElement, f64> = HashMap::new();
    for part in partials {
        for (g, m) in part {
            *merged.entry(g).or_insert(0.0) += m;
        }
        if merged.len() > cap {
            return Err(Error::Capacity { what: "convolution support", needed: merged.len(), cap });
        }
    }
    let mut atoms: BTreeMap<GroupElement, f64> = merged.into_iter().collect();
    atoms.retain(|_, m| *m > 0.0);
    let abelian = matches!(spec, GroupSpec::Integers | GroupSpec::Lattice { .. } | GroupSpec::BitSum);
    Ok(SparseMeasure { atoms, symmetric: abelian && mu.symmetric && nu.symmetric })
}

/// `ρ*ⁿ`; `n = 0` gives `δ_e`.
pub fn convolution_power(spec: &GroupSpec, rho: &SparseMeasure, n: usize, cap: usize) -> Result<SparseMeasure> {
    Ok(convolution_powers(spec, rho, n, cap)?.pop().unwrap())
}

/// `[δ_e, ρ, ρ*², …, ρ*ⁿ]`. Powers of a flagged-symmetric `ρ` are
/// symmetrized so that `ρ*ᵏ(g) = ρ*ᵏ(g⁻¹)` holds bit-for-bit.
pub fn convolution_powers(spec: &GroupSpec, rho: &SparseMeasure, n: usize, cap: usize) -> Result<Vec<SparseMeasure>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut e = SparseMeasure::dirac(spec.identity());
    e.symmetric = true;
    out.push(e);
    for k in 1..=n {
        let next = if k == 1 {
            rho.clone()
        } else {
            convolve(spec, &out[k - 1], rho, cap)?
        };
        let next = if rho.symmetric { next.symmetrize(spec) } else { next };
        out.push(next);
    }
    Ok(out)
}

/// Geometric mixing weights `pₙ = (1 − q) q^{n−1}` truncated at `n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightParams {
    pub q: f64,
    pub n_max: usize,
}

impl WeightParams {
    pub fn new(q: f64, n_max: usize) -> Result<Self> {
        let p = WeightParams { q, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::Domain(format!("q = {} outside (0, 1)", self.q)));
        }
        if self.n_max == 0 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// `pₙ` for `n ≥ 1`.
    pub fn p(&self, n: usize) -> f64 {
        assert!(n >= 1);
        (1.0 - self.q) * self.q.powi(n as i32 - 1)
    }

    /// The ratio constant `C = pₙ / pₙ₊₁ = 1/q`.
    pub fn ratio_constant(&self) -> f64 {
        1.0 / self.q
    }

    /// `Σ_{n > n_max} pₙ = q^{n_max}`.
    pub fn tail_mass(&self) -> f64 {
        self.q.powi(self.n_max as i32)
    }

    /// Defaults: `q = 1/2`; `n_max` 40 for ℤ and ℤ², 10 for F₂ and ℤ³, 8 for
    /// Heisenberg, sized to the ball cap.
    pub fn default_for(spec: &GroupSpec) -> Self {
        let n_max = match spec {
            GroupSpec::Integers | GroupSpec::Lattice { d: 1 | 2 } => 40,
            GroupSpec::Lattice { .. } | GroupSpec::Free { .. } => 10,
            GroupSpec::Heisenberg => 8,
            GroupSpec::BitSum => 10,
        };
        WeightParams { q: 0.5, n_max }
    }
}

/// Extra exact convolution layers kept beyond `n_max`.
pub const LOOKAHEAD: usize = 3;

/// Truncated weight `w⁽ᴺ⁾(g) = Σ_{n ≤ N} pₙ ρ*ⁿ(g)`, `N = n_max`, with the
/// certified tail `Σ_{n > N} pₙ = q^N`.
///
/// `deep[j-1]` holds `ρ*ᴺ⁺ʲ` on the region where it is computed exactly from
/// the stored powers, so that `w⁽ᴺ⁺ʲ⁾` is available there. Ratio certificates
/// compare depth `N` against depth `N + |b|`, the truncated form of
/// `ρ*ⁿ * δ_a ≤ (2d+1) ρ*ⁿ⁺¹`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightTable {
    pub spec: GroupSpec,
    pub params: WeightParams,
    #[serde(with = "crate::pairs")]
    weights: BTreeMap<GroupElement, f64>,
    #[serde(with = "crate::pairs::vec")]
    deep: Vec<BTreeMap<GroupElement, f64>>,
    pub tail_bound: f64,
}

impl WeightTable {
    pub fn get(&self, g: &GroupElement) -> f64 {
        self.weights.get(g).copied().unwrap_or(0.0)
    }

    /// `w⁽ᴺ⁺ᵉˣᵗʳᵃ⁾(g)` if the lookahead layers determine it exactly at `g`.
    pub fn get_at_depth(&self, g: &GroupElement, extra: usize) -> Option<f64> {
        if extra == 0 {
            return Some(self.get(g));
        }
        let mut w = self.get(g);
        for j in 1..=extra {
            let layer = self.deep.get(j - 1)?;
            w += self.params.p(self.params.n_max + j) * layer.get(g)?;
        }
        Some(w)
    }

    pub fn lookahead(&self) -> usize {
        self.deep.len()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.weights.contains_key(g)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &f64)> {
        self.weights.iter()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.values().sum()
    }

    /// Stored mass of a set of elements (summed in the given order).
    pub fn mass_of<'a, I: IntoIterator<Item = &'a GroupElement>>(&self, set: I) -> f64 {
        set.into_iter().map(|g| self.get(g)).sum()
    }

    /// `(element, weight)` rows in canonical order.
    pub fn rows(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.weights.iter().map(|(g, w)| (g.to_string(), *w))
    }
}

/// `w = Σ_{n ≤ n_max} pₙ ρ*ⁿ` for the standard step law of `spec`.
pub fn build_weight(spec: &GroupSpec, params: WeightParams) -> Result<WeightTable> {
    let rho = step_distribution(spec)?;
    build_weight_from(spec, &rho, params, DEFAULT_BALL_CAP)
}

/// `w = Σ_{n ≤ n_max} pₙ ρ*ⁿ` for an arbitrary finitely supported `ρ`.
pub fn build_weight_from(spec: &GroupSpec, rho: &SparseMeasure, params: WeightParams, cap: usize) -> Result<WeightTable> {
    params.validate()?;
    let powers = convolution_powers(spec, rho, params.n_max, cap)?;
    let mut weights: BTreeMap<GroupElement, f64> = BTreeMap::new();
    for (n, pw) in powers.iter().enumerate().skip(1) {
        let pn = params.p(n);
        for (g, m) in pw.iter() {
            *weights.entry(g.clone()).or_insert(0.0) += pn * m;
        }
    }
    let deep = lookahead_layers(spec, rho, powers.last().unwrap(), LOOKAHEAD);
    Ok(WeightTable { spec: *spec, params, weights, deep, tail_bound: params.tail_mass() })
}

/// `ρ*ᴺ⁺ʲ` for `j = 1..=layers`, each on the largest region where it follows
/// exactly from `ρ*ᴺ`: layer 1 lives on `supp ρ*ᴺ`, and layer `j` on the points
/// `g` of region `j−1` with `g·h⁻¹` in region `j−1` for all `h ∈ supp ρ`.
fn lookahead_layers(
    spec: &GroupSpec,
    rho: &SparseMeasure,
    last: &SparseMeasure,
    layers: usize,
) -> Vec<BTreeMap<GroupElement, f64>> {
    let steps: Vec<(GroupElement, f64)> = rho
        .iter()
        .map(|(h, m)| (spec.inverse_unchecked(h), *m))
        .collect();
    let mut out: Vec<BTreeMap<GroupElement, f64>> = Vec::with_capacity(layers);
    for j in 1..=layers {
        let next: BTreeMap<GroupElement, f64> = if j == 1 {
            // ρ*ᴺ is known everywhere (zero off its support)
            last.support()
                .map(|g| {
                    let v = steps.iter().map(|(hi, m)| last.mass(&spec.multiply_unchecked(g, hi)) * m).sum();
                    (g.clone(), v)
                })
                .collect()
        } else {
            let prev = &out[j - 2];
            prev.keys()
                .filter_map(|g| {
                    let mut v = 0.0;
                    for (hi, m) in &steps {
                        v += prev.get(&spec.multiply_unchecked(g, hi))? * m;
                    }
                    Some((g.clone(), v))
                })
                .collect()
        };
        out.push(next);
    }
    out
}

/// Outcome of an exhaustive scan of `w(gb)/w(g)` against `M_b = ((2d+1)C)^{|b|}`.
///
/// `observed_max` is `max_g w⁽ᴺ⁾(gb) / w⁽ᴺ⁺ˡ⁾(g)` and `observed_min` is
/// `min_g w⁽ᴺ⁺ˡ⁾(gb) / w⁽ᴺ⁾(g)`, `l = |b|`, the depth-consistent ratios that
/// the bound controls at every truncation. `raw_max`/`raw_min` are the plain
/// truncated ratios on the same domain, reported for reference only.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RatioReport {
    pub b: String,
    pub word_length: usize,
    pub bound: f64,
    pub lower_bound: f64,
    pub observed_max: f64,
    pub observed_min: f64,
    pub raw_max: f64,
    pub raw_min: f64,
    pub argmax: String,
    pub domain: String,
    pub domain_size: usize,
    pub violations: usize,
    pub pass: bool,
}

/// `M_b` for a word of length `len` in a group of rank `d` with ratio constant `c`.
pub fn ratio_bound(d: usize, c: f64, len: usize) -> f64 {
    ((2 * d + 1) as f64 * c).powi(len as i32)
}

/// Relative slack allowed on bound comparisons for floating-point rounding.
pub const BOUND_SLACK: f64 = 1e-9;

/// Scans the interior domain `B_{N − |b|}`, where `w⁽ᴺ⁾` is stored and
/// `w⁽ᴺ⁺|b|⁾` is exact, for both sides of `1/M_b ≤ w(gb)/w(g) ≤ M_b`.
pub fn weight_ratio(spec: &GroupSpec, w: &WeightTable, b: &GroupElement) -> Result<RatioReport> {
    let len = spec.word_length(b)?;
    let d = spec.rank().expect("word_length requires a f.g. group");
    let n_max = w.params.n_max;
    if len > n_max {
        return Err(Error::Domain(format!(
            "|b| = {len} exceeds the stored depth {n_max}; interior domain is empty"
        )));
    }
    if len > w.lookahead() {
        return Err(Error::Domain(format!(
            "|b| = {len} exceeds the {} lookahead layers",
            w.lookahead()
        )));
    }
    let radius = n_max - len;
    let domain = spec.ball(radius)?;
    let m_b = ratio_bound(d, w.params.ratio_constant(), len);
    let b_inv = spec.inverse_unchecked(b);

    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut raw_max = f64::NEG_INFINITY;
    let mut raw_min = f64::INFINITY;
    let mut argmax = spec.identity();
    let mut violations = 0;
    for g in &domain {
        let deep_g = w
            .get_at_depth(g, len)
            .ok_or_else(|| Error::Domain(format!("lookahead does not reach {g}")))?;
        let wg = w.get(g);
        let gb = spec.multiply_unchecked(g, b);
        let gbi = spec.multiply_unchecked(g, &b_inv);
        if wg <= 0.0 {
            return Err(Error::Domain(format!("weight vanishes at {g} inside B_{radius}")));
        }
        // upper side at the pair (g, gb), lower side at the pair (gb⁻¹, g)
        let upper = w.get(&gb) / deep_g;
        let lower = deep_g / w.get(&gbi);
        if upper > max {
            max = upper;
            argmax = g.clone();
        }
        min = min.min(lower);
        raw_max = raw_max.max(w.get(&gb) / wg);
        raw_min = raw_min.min(w.get(&gb) / wg);
        if upper > m_b * (1.0 + BOUND_SLACK) || lower < (1.0 / m_b) * (1.0 - BOUND_SLACK) {
            violations += 1;
        }
    }
    Ok(RatioReport {
        b: b.to_string(),
        word_length: len,
        bound: m_b,
        lower_bound: 1.0 / m_b,
        observed_max: max,
        observed_min: min,
        raw_max,
        raw_min,
        argmax: argmax.to_string(),
        domain: format!("B_{radius}"),
        domain_size: domain.len(),
        violations,
        pass: violations == 0,
    })
}

/// A probability measure on a subgroup obtained by restricting an ambient
/// weight and renormalizing, `ρ(g) = w_H(ι(g)) / K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictedMeasure {
    pub measure: SparseMeasure,
    /// Truncated normalizer `K = Σ_g w_H(ι(g))` over the evaluated range.
    pub normalizer: f64,
    /// Ambient word length of `ι(g)` for each atom.
    #[serde(with = "crate::pairs")]
    pub ambient_length: BTreeMap<GroupElement, usize>,
    /// `w_H⁽ᴺ⁺ʲ⁾(ι(g)) / K` for `j = 1, 2, …` where the lookahead reaches.
    #[serde(with = "crate::pairs")]
    pub deep_mass: BTreeMap<GroupElement, Vec<f64>>,
    pub ambient_depth: usize,
    /// Geometric ratio of the ambient weight, `C = 1/q`.
    pub q: f64,
    pub embedding: Embedding,
}

/// Restricts `w_amb` to the image of `emb` over the subgroup ball of the given
/// radius and renormalizes.
pub fn restrict_renormalize(w_amb: &WeightTable, emb: &Embedding, radius: usize) -> Result<RestrictedMeasure> {
    if w_amb.spec != emb.ambient {
        return Err(Error::Embedding(format!(
            "weight lives on {:?} but embedding targets {:?}",
            w_amb.spec, emb.ambient
        )));
    }
    let mut atoms = Vec::new();
    let mut lengths = BTreeMap::new();
    let mut deep = BTreeMap::new();
    for g in emb.sub.ball(radius)? {
        let im = emb.map(&g)?;
        let m = w_amb.get(&im);
        if m > 0.0 {
            lengths.insert(g.clone(), emb.ambient.word_length(&im)?);
            let layers: Vec<f64> = (1..=w_amb.lookahead()).map_while(|j| w_amb.get_at_depth(&im, j)).collect();
            deep.insert(g.clone(), layers);
            atoms.push((g, m));
        }
    }
    let k: f64 = atoms.iter().map(|(_, m)| m).sum();
    if k <= 0.0 {
        return Err(Error::DegenerateRestriction);
    }
    for layers in deep.values_mut() {
        for v in layers.iter_mut() {
            *v /= k;
        }
    }
    let measure = SparseMeasure::from_atoms(atoms.into_iter().map(|(g, m)| (g, m / k)))?.symmetrize(&emb.sub);
    Ok(RestrictedMeasure {
        measure,
        normalizer: k,
        ambient_length: lengths,
        deep_mass: deep,
        ambient_depth: w_amb.params.n_max,
        q: w_amb.params.q,
        embedding: emb.clone(),
    })
}
