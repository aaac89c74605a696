//! Confidence intervals for the Monte Carlo harnesses.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A binomial proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn wilson(hits: u64, trials: u64) -> Self {
        assert!(trials > 0 && hits <= trials);
        let n = trials as f64;
        let p = hits as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Proportion {
            hits,
            trials,
            estimate: p,
            lower: if hits == 0 { 0.0 } else { (center - half).max(0.0) },
            upper: if hits == trials { 1.0 } else { (center + half).min(1.0) },
        }
    }

    /// The interval scaled by a known factor, for measures of the form `c · P(·)`.
    pub fn scaled(&self, c: f64) -> Interval {
        Interval { estimate: c * self.estimate, lower: c * self.lower, upper: c * self.upper }
    }

    pub fn interval(&self) -> Interval {
        self.scaled(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Sample mean with standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 2);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        MeanEstimate { mean, std_err: (var / n as f64).sqrt(), n }
    }

    pub fn upper95(&self) -> f64 {
        self.mean + Z95 * self.std_err
    }
}

/// Kolmogorov–Smirnov distance between the empirical law of `xs` and U(0,1).
pub fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max)
}

/// Asymptotic 1% critical value of the KS distance for `n` samples.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 0 of 100: upper = z²/(n + z²)
        let p = Proportion::wilson(0, 100);
        assert_eq!(p.lower, 0.0);
        assert!((p.upper - Z95 * Z95 / (100.0 + Z95 * Z95)).abs() < 1e-12);
        let h = Proportion::wilson(50, 100);
        assert!((h.lower + h.upper - 1.0).abs() < 1e-12);
        assert!((h.lower - 0.403_831).abs() < 1e-5);
    }

    #[test]
    fn ks_on_grid() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!((ks_uniform(&xs) - 0.0005).abs() < 1e-12);
    }
}
