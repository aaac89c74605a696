//! The experiment configuration: one JSON document, unknown keys rejected.

use std::path::Path;

use orbitrep::dynamics::SystemKind;
use orbitrep::model::BuildConfig;
use orbitrep::walk::WeightParams;
use orbitrep::GroupSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_group")]
    pub group: GroupSpec,
    /// Defaults per group when absent.
    #[serde(default)]
    pub weights: Option<WeightParams>,
    #[serde(default = "default_system")]
    pub system: SystemKind,
    #[serde(default)]
    pub norms: NormsConfig,
    #[serde(default)]
    pub ratios: RatiosConfig,
    #[serde(default)]
    pub jrt: JrtConfig,
    #[serde(default)]
    pub tower: TowerConfig,
    #[serde(default)]
    pub build: BuildConfig,
    #[serde(default)]
    pub support: SupportConfig,
    #[serde(default)]
    pub orbit: OrbitConfig,
    #[serde(default)]
    pub feldman: FeldmanConfig,
    #[serde(default)]
    pub continuous: ContinuousConfig,
}

fn default_group() -> GroupSpec {
    GroupSpec::Integers
}

fn default_system() -> SystemKind {
    SystemKind::Bernoulli
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    /// Random vectors per generator, on top of every single atom.
    pub trials: usize,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig { trials: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatiosConfig {
    /// Check every `b` with `|b| ≤ max_len`.
    pub max_len: usize,
}

impl Default for RatiosConfig {
    fn default() -> Self {
        RatiosConfig { max_len: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JrtConfig {
    /// Rotation vector; one irrational per generator when absent.
    pub alpha: Option<Vec<f64>>,
    pub rotation_steps: usize,
    pub rotation_tolerance: f64,
    pub bernoulli_steps: usize,
    pub bernoulli_tolerance: f64,
    pub samples: usize,
}

impl Default for JrtConfig {
    fn default() -> Self {
        JrtConfig {
            alpha: None,
            rotation_steps: 20,
            rotation_tolerance: 1e-6,
            bernoulli_steps: 12,
            bernoulli_tolerance: 0.25,
            samples: 4000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TowerConfig {
    pub height: usize,
    pub eta: f64,
    pub marker_len: Option<usize>,
    pub planted_samples: usize,
    pub direct_samples: usize,
}

impl Default for TowerConfig {
    fn default() -> Self {
        TowerConfig { height: 3, eta: 0.1, marker_len: Some(11), planted_samples: 10_000, direct_samples: 100_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SupportConfig {
    pub samples: usize,
    pub equivariance_samples: usize,
    /// Check equivariance for every `h` in this ball.
    pub equivariance_radius: usize,
    pub truncation: usize,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig { samples: 4000, equivariance_samples: 1000, equivariance_radius: 2, truncation: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    pub steps: usize,
    /// Samples for the independent estimate of `μ(φ_f ∈ U)`.
    pub samples: usize,
    /// Stage whose ball is visited (1-based).
    pub ball_stage: usize,
    pub checkpoints: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { steps: 10_000, samples: 4000, ball_stage: 1, checkpoints: 20 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeldmanConfig {
    pub alpha: f64,
    pub points: usize,
    pub steps: usize,
}

impl Default for FeldmanConfig {
    fn default() -> Self {
        FeldmanConfig { alpha: std::f64::consts::SQRT_2 - 1.0, points: 1000, steps: 30 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuousConfig {
    pub k_half: f64,
    pub grid_step: f64,
    pub shifts: Vec<f64>,
    pub chain_levels: usize,
    pub chain_q: f64,
    pub g0_samples: usize,
}

impl Default for ContinuousConfig {
    fn default() -> Self {
        ContinuousConfig {
            k_half: 1.0,
            grid_step: 1e-3,
            shifts: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            chain_levels: 10,
            chain_q: 0.5,
            g0_samples: 20,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn weight_params(&self) -> WeightParams {
        self.weights.unwrap_or_else(|| WeightParams::default_for(&self.group))
    }

    pub fn rotation_alpha(&self) -> Vec<f64> {
        let rank = self.group.rank().unwrap_or(1);
        self.jrt.alpha.clone().unwrap_or_else(|| [2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0, 5f64.sqrt() - 2.0][..rank.min(3)].to_vec())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        self.weight_params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if self.norms.trials == 0 {
            return bad("norms.trials must be positive");
        }
        if self.jrt.samples < 2 || self.jrt.rotation_steps == 0 || self.jrt.bernoulli_steps == 0 {
            return bad("jrt needs at least 2 samples and 1 step");
        }
        if !unit(self.tower.eta) || self.tower.height == 0 || self.tower.planted_samples == 0 {
            return bad("tower.eta must lie in (0, 1); height and planted_samples must be positive");
        }
        self.build.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.support.samples < 2 || self.support.equivariance_samples == 0 || self.support.equivariance_radius > self.support.truncation {
            return bad("support needs samples ≥ 2 and equivariance_radius ≤ truncation");
        }
        if self.orbit.steps < 2 || self.orbit.samples < 2 || self.orbit.checkpoints == 0 {
            return bad("orbit needs steps ≥ 2, samples ≥ 2 and checkpoints ≥ 1");
        }
        if self.orbit.ball_stage == 0 || self.orbit.ball_stage > self.build.stages {
            return bad("orbit.ball_stage must name a built stage");
        }
        if !self.feldman.alpha.is_finite() || self.feldman.points == 0 || self.feldman.steps == 0 {
            return bad("feldman needs a finite alpha and positive points and steps");
        }
        let c = &self.continuous;
        if c.k_half.is_nan() || c.k_half <= 0.0 || c.grid_step.is_nan() || c.grid_step <= 0.0 || c.shifts.iter().any(|k| k.abs() > c.k_half) || !unit(c.chain_q) {
            return bad("continuous needs k_half > 0, grid_step > 0, shifts within K and chain_q in (0, 1)");
        }
        if c.chain_levels == 0 || c.chain_levels > 16 {
            return bad("continuous.chain_levels must lie in 1..=16");
        }
        if let SystemKind::Rotation { alpha } = &self.system {
            if Some(alpha.len()) != self.group.rank() {
                return bad("rotation needs one angle per generator");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"seed": 3}"#).unwrap();
        assert_eq!(cfg.group, GroupSpec::Integers);
        assert_eq!(cfg.weight_params().n_max, 40);
        assert_eq!(cfg.tower.marker_len, Some(11));
    }

    #[test]
    fn unknown_keys_and_missing_seed_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"seed": 3, "sead": 4}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"seed": 3, "norms": {"trails": 4}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"group": {"kind": "integers"}}"#).is_err());
    }

    #[test]
    fn group_wire_form() {
        let cfg = ExperimentConfig::from_json(r#"{"seed": 1, "group": {"kind": "free", "d": 2}}"#).unwrap();
        assert_eq!(cfg.group, GroupSpec::Free { d: 2 });
        assert_eq!(cfg.weight_params().n_max, 10);
    }
}
