use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::structure::Ell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Scaling,
    Robustness,
    CoreRemoval,
    Coupling,
    Tiers,
    Concentration,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::Robustness => "robustness",
            ExperimentKind::CoreRemoval => "core_removal",
            ExperimentKind::Coupling => "coupling",
            ExperimentKind::Tiers => "tiers",
            ExperimentKind::Concentration => "concentration",
        }
    }
}

/// Pass thresholds for the checks attached to each experiment family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Largest allowed |empirical − predicted| giant fraction.
    pub giant_tolerance: f64,
    /// Share of sampled distances that must be at most `2k*`.
    pub ultra_small_share: f64,
    /// Smallest allowed giant retention after partial core deletion.
    pub retention_min: f64,
    /// Multiplier on the robust distance bound.
    pub robust_slack: f64,
    /// Share of distances that must fall under `robust_slack × bound`.
    pub robust_share: f64,
    pub core_removal_retention_min: f64,
    /// Minimum ratio of mean distance after full core removal to before.
    pub core_removal_stretch_min: f64,
    /// Multiplier on the core-removed distance scale.
    pub core_removal_scale_slack: f64,
    pub coupling_tv_max: f64,
    /// Allowed |diameter − w(γ)|.
    pub tier_diameter_tolerance: u32,
    pub tier_diameter_rate: f64,
    pub tier_connected_rate: f64,
    pub concentration_rate: f64,
    pub low_tier_median_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            giant_tolerance: 0.03,
            ultra_small_share: 0.9,
            retention_min: 0.95,
            robust_slack: 1.5,
            robust_share: 0.95,
            core_removal_retention_min: 0.9,
            core_removal_stretch_min: 2.0,
            core_removal_scale_slack: 2.0,
            coupling_tv_max: 0.05,
            tier_diameter_tolerance: 1,
            tier_diameter_rate: 0.8,
            tier_connected_rate: 0.9,
            concentration_rate: 0.95,
            low_tier_median_max: 0.5,
        }
    }
}

fn default_tau() -> f64 {
    2.5
}
fn default_replications() -> usize {
    1
}
fn default_pairs() -> usize {
    500
}
fn default_alpha() -> f64 {
    0.3
}
fn default_low_tier_b() -> f64 {
    3.0
}

/// One experiment run. For `coupling`, `replications` is the number of
/// graphs and of processes sampled per `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n_values: Vec<u64>,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub gamma_values: Vec<f64>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_pairs")]
    pub pairs_per_replication: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub ell: Ell,
    /// Output prefix; the run writes `<prefix>.csv` and `<prefix>.json`.
    #[serde(default)]
    pub output_path: Option<String>,
    /// Exponent for the upper-set concentration ratio.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Multiplier `b` of the low-tier ratio.
    #[serde(default = "default_low_tier_b")]
    pub low_tier_b: f64,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, n_values: Vec<u64>) -> Self {
        ExperimentConfig {
            experiment,
            n_values,
            tau: default_tau(),
            gamma_values: Vec::new(),
            replications: default_replications(),
            pairs_per_replication: default_pairs(),
            master_seed: 0,
            ell: Ell::Default,
            output_path: None,
            alpha: default_alpha(),
            low_tier_b: default_low_tier_b(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::check_tau(self.tau)?;
        if self.replications < 1 {
            return Err(invalid("replications", "must be at least 1"));
        }
        if self.n_values.is_empty() {
            return Err(invalid("n_values", "at least one n is required"));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3 || n > u32::MAX as u64) {
            return Err(invalid("n_values", format!("{n} is outside [3, 2^32)")));
        }
        if let Some(&g) = self.gamma_values.iter().find(|&&g| !(g > 0.0 && g < 0.5)) {
            return Err(invalid("gamma_values", format!("{g} is outside (0, 1/2)")));
        }
        let needs_gamma = matches!(self.experiment, ExperimentKind::Robustness | ExperimentKind::Tiers);
        if needs_gamma && self.gamma_values.is_empty() {
            return Err(invalid("gamma_values", format!("{} needs at least one gamma", self.experiment.as_str())));
        }
        let needs_pairs = matches!(
            self.experiment,
            ExperimentKind::Scaling | ExperimentKind::Robustness | ExperimentKind::CoreRemoval
        );
        if needs_pairs && self.pairs_per_replication == 0 {
            return Err(invalid("pairs_per_replication", "must be positive"));
        }
        if self.experiment == ExperimentKind::Coupling && self.replications < 2 {
            return Err(invalid("replications", "coupling needs at least 2 samples per side"));
        }
        Ok(())
    }
}
