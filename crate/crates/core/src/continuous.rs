//! Two non-discrete settings with closed forms.
//!
//! On `ℝ` with `K = [−1, 1]`, `L = K² = [−ℓ, ℓ]`, `ℓ = 2`, the overlap density
//! of `m = 𝟙_L λ` is `ψ(t) = max(0, 2ℓ − |t|)` and the domination
//! `ρ * δ_k ≤ D (ρ * ρ)` is checked on a grid. On `⊕ℤ/2 = ∪ K_n` the step law
//! is `ρ = Σ p_n λ_n` with `λ_n` the uniform measure on `K_n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::walk::{SparseMeasure, WeightParams};

/// Lebesgue measure restricted to the symmetric interval `[−ℓ, ℓ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalMeasure {
    pub half_width: f64,
}

impl IntervalMeasure {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Domain(format!("half width {half_width} must be positive")));
        }
        Ok(IntervalMeasure { half_width })
    }

    pub fn contains(&self, t: f64) -> bool {
        t.abs() <= self.half_width
    }
}

/// `ψ(t) = λ(L ∩ (t − L)) = max(0, 2ℓ − |t|)`.
pub fn overlap_density(l: &IntervalMeasure, t: f64) -> f64 {
    (2.0 * l.half_width - t.abs()).max(0.0)
}

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// `∫ 𝟙_L(t − h) 𝟙_L(h) dh` by five-point Gauss–Legendre on each piece
/// between the breakpoints of the integrand.
pub fn overlap_density_quadrature(l: &IntervalMeasure, t: f64) -> f64 {
    let a = l.half_width;
    let mut cuts = [-a, a, t - a, t + a];
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
            GL5.iter()
                .map(|(x, wt)| {
                    let h = mid + half * x;
                    wt * half * (l.contains(t - h) && l.contains(h)) as u8 as f64
                })
                .sum::<f64>()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealDomination {
    pub k_half_width: f64,
    pub l_half_width: f64,
    pub grid_step: f64,
    /// `min ψ` over `KL`.
    pub u: f64,
    /// `2/u`, valid for `ρ̃ = ½(m + m̂)`.
    pub d: f64,
    /// Smallest constant for the probability `ρ = ρ̃/λ(L)`: `λ(L)·max_t (ρ̃*δ_k)/(ρ̃*ρ̃)`.
    pub d_normalized: f64,
    pub shifts: Vec<f64>,
    pub grid_points: usize,
    pub violations: u64,
    /// Largest `|ψ_quadrature − ψ|` on the grid.
    pub quadrature_error: f64,
    /// `C` of the weight and `√(DC)`.
    pub c: f64,
    pub norm_bound: f64,
    pub pass: bool,
}

/// Computes `u`, `D = 2/u` and checks `𝟙_L(t − k) ≤ D ψ(t)` on a grid of
/// `[−(2ℓ+1), 2ℓ+1]` for each shift `k ∈ K`.
pub fn domination_constant_real(k_half: f64, grid_step: f64, shifts: &[f64], c: f64) -> Result<RealDomination> {
    if !(k_half > 0.0 && grid_step > 0.0 && grid_step <= k_half) {
        return Err(Error::Domain("need k_half > 0 and 0 < grid_step ≤ k_half".into()));
    }
    if let Some(k) = shifts.iter().find(|k| k.abs() > k_half) {
        return Err(Error::Domain(format!("shift {k} lies outside K")));
    }
    let l = IntervalMeasure::new(2.0 * k_half)?;
    let kl = l.half_width + k_half;
    let window = 2.0 * l.half_width + k_half;
    let steps = (2.0 * window / grid_step).round() as i64;
    let grid: Vec<f64> = (0..=steps).map(|i| -window + i as f64 * grid_step).collect();

    let kl_points: Vec<f64> = grid.iter().copied().filter(|t| t.abs() <= kl).chain([-kl, kl]).collect();
    let u = kl_points.iter().map(|t| overlap_density(&l, *t)).fold(f64::INFINITY, f64::min);
    let d = 2.0 / u;

    let (violations, ratio, quadrature_error) = grid
        .par_iter()
        .map(|t| {
            let psi = overlap_density(&l, *t);
            let mut bad = 0u64;
            let mut ratio: f64 = 0.0;
            for k in shifts {
                let lhs = l.contains(t - k) as u8 as f64;
                if lhs > d * psi {
                    bad += 1;
                }
                if lhs > 0.0 {
                    ratio = ratio.max(lhs / psi);
                }
            }
            (bad, ratio, (overlap_density_quadrature(&l, *t) - psi).abs())
        })
        .reduce(|| (0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1), a.2.max(b.2)));
    let lambda_l = 2.0 * l.half_width;
    Ok(RealDomination {
        k_half_width: k_half,
        l_half_width: l.half_width,
        grid_step,
        u,
        d,
        d_normalized: lambda_l * ratio,
        shifts: shifts.to_vec(),
        grid_points: grid.len(),
        violations,
        quadrature_error,
        c,
        norm_bound: (d * c).sqrt(),
        pass: violations == 0 && u > 0.0 && quadrature_error < 1e-6,
    })
}

/// `K_1 < K_2 < ⋯ < K_{n_max}` in `⊕ℤ/2` with `K_n` spanned by the first `n`
/// coordinates; elements of `K_{n_max}` are indexed by their bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocallyFiniteChain {
    pub params: WeightParams,
}

impl LocallyFiniteChain {
    pub const MAX_LEVEL: usize = 20;

    pub fn new(params: WeightParams) -> Result<Self> {
        params.validate()?;
        if params.n_max == 0 || params.n_max > Self::MAX_LEVEL {
            return Err(Error::Capacity { what: "⊕ℤ/2 chain level", needed: params.n_max, cap: Self::MAX_LEVEL });
        }
        Ok(LocallyFiniteChain { params })
    }

    pub fn n_max(&self) -> usize {
        self.params.n_max
    }

    pub fn size(&self) -> usize {
        1 << self.n_max()
    }

    /// First `n ≥ 1` with `g ∈ K_n`.
    pub fn level(mask: usize) -> usize {
        ((usize::BITS - mask.leading_zeros()) as usize).max(1)
    }

    pub fn element(mask: usize) -> GroupElement {
        GroupElement::Bits((0..usize::BITS).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn mask(&self, g: &GroupElement) -> Result<usize> {
        match g {
            GroupElement::Bits(b) if b.iter().all(|i| (*i as usize) < self.n_max()) => Ok(b.iter().map(|i| 1usize << i).sum()),
            _ => Err(Error::Domain(format!("{g} is not in K_{}", self.n_max()))),
        }
    }

    /// `λ_n` as a dense vector over `K_{n_max}`.
    pub fn haar(&self, n: usize) -> Vec<f64> {
        (0..self.size()).map(|g| if Self::level(g) <= n { 0.5f64.powi(n as i32) } else { 0.0 }).collect()
    }

    /// `ρ(g) = Σ_{n ≥ m(g)} p_n 2^{−n}`, truncated at `n_max`.
    pub fn rho_dense(&self) -> Vec<f64> {
        (0..self.size())
            .map(|g| (Self::level(g)..=self.n_max()).map(|n| self.params.p(n) * 0.5f64.powi(n as i32)).sum())
            .collect()
    }

    pub fn rho(&self) -> Result<SparseMeasure> {
        SparseMeasure::from_atoms(self.rho_dense().into_iter().enumerate().map(|(g, m)| (Self::element(g), m)))
    }
}

/// `(μ * ν)(g) = Σ_h μ(h) ν(h g)` on `K_{n_max}`, with `h g` the XOR of masks.
pub fn xor_convolve(mu: &[f64], nu: &[f64]) -> Vec<f64> {
    assert_eq!(mu.len(), nu.len());
    (0..mu.len()).into_par_iter().map(|g| mu.iter().enumerate().map(|(h, m)| m * nu[h ^ g]).sum()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainDomination {
    pub g0: String,
    pub m0: usize,
    /// `1/p_1 + [K_{m0} : K_1]`.
    pub c_g0: f64,
    /// Largest `(ρ * δ_{g0})(g) / (ρ * ρ)(g)` over `K_{n_max}`.
    pub max_ratio: f64,
    /// Element attaining `max_ratio`.
    pub argmax: String,
    pub violations: u64,
    pub pass: bool,
    /// See [`corrected_chain_constant`].
    pub corrected_c_g0: f64,
    pub corrected_violations: u64,
    pub corrected_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub n_max: usize,
    pub q: f64,
    /// Mass of `ρ` beyond `K_{n_max}`, `q^{n_max}`.
    pub tail: f64,
    pub total_mass: f64,
    /// `λ_i * λ_j = λ_{max(i,j)}` for all `i, j ≤ n_max`.
    pub haar_identity_max_error: f64,
    /// `ρ * ρ ≥ p_1 Σ p_k λ_k` pointwise.
    pub lower_chain_violations: u64,
    pub checks: Vec<ChainDomination>,
    /// Every check passes with the corrected constant.
    pub corrected_pass: bool,
    pub pass: bool,
}

/// `C_{g0} = 1/p_1 + 2^{m0 − 1}`.
pub fn chain_constant(chain: &LocallyFiniteChain, m0: usize) -> f64 {
    1.0 / chain.params.p(1) + 2f64.powi(m0 as i32 - 1)
}

/// A constant that the argument `λ_n * δ_{g0} ≤ [K_{m0}:K_1] λ_{m0}` does
/// support: `λ_{m0}` is controlled through `ρ*ρ ≥ (Σ_{i≤m0} p_i) p_{m0} λ_{m0}`,
/// giving `1/p_1 + [K_{m0}:K_1] (Σ_{n<m0} p_n) / ((Σ_{i≤m0} p_i) p_{m0})`.
pub fn corrected_chain_constant(chain: &LocallyFiniteChain, m0: usize) -> f64 {
    let p = |n| chain.params.p(n);
    let below: f64 = (1..m0).map(p).sum();
    let upto: f64 = (1..=m0).map(p).sum();
    1.0 / p(1) + 2f64.powi(m0 as i32 - 1) * below / (upto * p(m0))
}

/// Exhaustive check of `ρ * δ_{g0} ≤ C_{g0} (ρ * ρ)` on `K_{n_max}`.
pub fn domination_check_locally_finite(chain: &LocallyFiniteChain, rho: &[f64], rho2: &[f64], g0: &GroupElement) -> Result<ChainDomination> {
    let m = chain.mask(g0)?;
    let m0 = LocallyFiniteChain::level(m);
    let c = chain_constant(chain, m0);
    let cc = corrected_chain_constant(chain, m0);
    let over = |lhs: f64, c: f64, g: usize| (lhs > c * rho2[g] * (1.0 + 1e-12)) as u64;
    let (violations, corrected_violations, max_ratio, argmax) = (0..chain.size())
        .into_par_iter()
        .map(|g| {
            let lhs = rho[g ^ m];
            (over(lhs, c, g), over(lhs, cc, g), lhs / rho2[g], g)
        })
        .reduce(
            || (0, 0, 0.0, 0),
            |a, b| {
                let (r, g) = if b.2 > a.2 || (b.2 == a.2 && b.3 < a.3) { (b.2, b.3) } else { (a.2, a.3) };
                (a.0 + b.0, a.1 + b.1, r, g)
            },
        );
    Ok(ChainDomination {
        g0: g0.to_string(),
        m0,
        c_g0: c,
        max_ratio,
        argmax: LocallyFiniteChain::element(argmax).to_string(),
        violations,
        pass: violations == 0,
        corrected_c_g0: cc,
        corrected_violations,
        corrected_pass: corrected_violations == 0,
    })
}

/// Haar identities, the lower chain and domination for each `g0`.
pub fn chain_report(chain: &LocallyFiniteChain, g0s: &[GroupElement]) -> Result<ChainReport> {
    let n = chain.n_max();
    let haar: Vec<Vec<f64>> = (1..=n).map(|i| chain.haar(i)).collect();
    let mut haar_identity_max_error: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let conv = xor_convolve(&haar[i], &haar[j]);
            let target = &haar[i.max(j)];
            haar_identity_max_error = conv.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(haar_identity_max_error, f64::max);
        }
    }
    let rho = chain.rho_dense();
    let rho2 = xor_convolve(&rho, &rho);
    let p1 = chain.params.p(1);
    let lower_chain_violations = (0..chain.size())
        .filter(|g| {
            let lower: f64 = (1..=n).map(|k| p1 * chain.params.p(k) * haar[k - 1][*g]).sum();
            rho2[*g] < lower * (1.0 - 1e-12)
        })
        .count() as u64;
    let checks = g0s.iter().map(|g| domination_check_locally_finite(chain, &rho, &rho2, g)).collect::<Result<Vec<_>>>()?;
    let exact = haar_identity_max_error == 0.0 && lower_chain_violations == 0;
    let corrected_pass = exact && checks.iter().all(|c| c.corrected_pass);
    let pass = exact && checks.iter().all(|c| c.pass);
    Ok(ChainReport {
        n_max: n,
        q: chain.params.q,
        tail: chain.params.tail_mass(),
        total_mass: rho.iter().sum(),
        haar_identity_max_error,
        lower_chain_violations,
        checks,
        corrected_pass,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        let l = IntervalMeasure::new(2.0).unwrap();
        assert_eq!(overlap_density(&l, 0.0), 4.0);
        assert_eq!(overlap_density(&l, 4.5), 0.0);
        assert_eq!(overlap_density(&l, -3.0), 1.0);
        assert!((overlap_density_quadrature(&l, 1.3) - 2.7).abs() < 1e-12);
    }

    #[test]
    fn real_constants() {
        let r = domination_constant_real(1.0, 1e-3, &[-1.0, 0.0, 1.0], 2.0).unwrap();
        assert_eq!((r.u, r.d), (1.0, 2.0));
        assert!(r.pass && (r.norm_bound - 2.0).abs() < 1e-15);
        assert!((r.d_normalized - 4.0).abs() < 1e-9);
    }

    #[test]
    fn chain_examples() {
        let chain = LocallyFiniteChain::new(WeightParams::new(0.5, 4).unwrap()).unwrap();
        let rho = chain.rho_dense();
        let e_mass: f64 = (1..=4).map(|n| chain.params.p(n) * 0.5f64.powi(n as i32)).sum();
        assert_eq!(rho[0], e_mass);
        assert_eq!(rho[2], e_mass - chain.params.p(1) / 2.0);
        let r = chain_report(&chain, &[GroupElement::Bits(vec![]), GroupElement::Bits(vec![1])]).unwrap();
        assert_eq!((r.checks[0].c_g0, r.checks[1].c_g0), (3.0, 4.0));
        assert!(r.pass, "{r:?}");
    }
}
