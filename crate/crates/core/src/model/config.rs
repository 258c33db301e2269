use serde::{Deserialize, Serialize};

use super::InfluenceFunction;
use crate::error::{Error, Result};

/// Where the delay enters the alignment term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayKind {
    /// Agent `i` compares `x_j(t - tau)` with its own current `x_i(t)`.
    Transmission,
    /// Agent `i` reacts at `t` to the whole configuration at `t - tau`.
    Reaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// `psi(.) / (N - 1)`: row sums at most one.
    ClassicalScaled,
    /// `psi(.)` divided by the row's psi-sum: row sums exactly one.
    Normalized,
}

/// One delayed Hegselmann-Krause system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_agents: usize,
    pub dim: usize,
    pub tau: f64,
    pub delay_kind: DelayKind,
    pub weight_scheme: WeightScheme,
    #[serde(default)]
    pub influence: InfluenceFunction,
}

impl SystemConfig {
    pub fn new(
        n_agents: usize,
        dim: usize,
        tau: f64,
        delay_kind: DelayKind,
        weight_scheme: WeightScheme,
        influence: InfluenceFunction,
    ) -> Result<Self> {
        let cfg = SystemConfig {
            n_agents,
            dim,
            tau,
            delay_kind,
            weight_scheme,
            influence,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_agents must be >= 2, got {}",
                self.n_agents
            )));
        }
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be positive and finite, got {}",
                self.tau
            )));
        }
        self.influence.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Classical weights with reaction delay evaluate every pair at the same
    /// delayed arguments, hence `psi_ij = psi_ji`.
    pub fn has_symmetric_weights(&self) -> bool {
        self.delay_kind == DelayKind::Reaction
            && self.weight_scheme == WeightScheme::ClassicalScaled
    }
}
