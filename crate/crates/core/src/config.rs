//! JSON model descriptions.
//!
//! ```json
//! {
//!   "levels": [{"j": 3.5, "epsilon": 0.0}, {"j": 4.5, "epsilon": 1.2, "seniority": 1}],
//!   "N": 6,
//!   "G": {"rule": "linear-gap", "g": 0.1}
//! }
//! ```
//!
//! `G` is either a full symmetric matrix (list of rows) or a rule object.
//! The only rule is `linear-gap`: `G_pq = (2 - |eps_p - eps_q| / 10) g`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_model, coupling_from_rule, LevelSpec, PairingModel};
use crate::scalar::{lit, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub j: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub seniority: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingRule {
    #[serde(rename = "linear-gap", alias = "paper")]
    LinearGap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingConfig {
    Matrix(Vec<Vec<f64>>),
    Rule { rule: CouplingRule, g: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub levels: Vec<LevelConfig>,
    #[serde(rename = "N")]
    pub pairs: u32,
    #[serde(rename = "G")]
    pub coupling: CouplingConfig,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The rule strength, if the coupling is rule-based.
    pub fn rule_strength(&self) -> Option<f64> {
        match self.coupling {
            CouplingConfig::Rule { g, .. } => Some(g),
            CouplingConfig::Matrix(_) => None,
        }
    }

    /// Same config with the rule strength replaced; fails for explicit matrices.
    pub fn with_strength(&self, g: f64) -> Result<Self> {
        match self.coupling {
            CouplingConfig::Rule { rule, .. } => Ok(Self { coupling: CouplingConfig::Rule { rule, g }, ..self.clone() }),
            CouplingConfig::Matrix(_) => Err(Error::Config("coupling strength override needs a rule-based G".into())),
        }
    }

    /// Validated model. Model-level validation failures are reported as config errors.
    pub fn build<T: Real>(&self) -> Result<PairingModel<T>> {
        let levels = self
            .levels
            .iter()
            .map(|l| LevelSpec::with_seniority(l.j, lit(l.epsilon), l.seniority))
            .collect::<Result<Vec<_>>>()
            .map_err(as_config)?;
        let k = levels.len();
        let coupling = match &self.coupling {
            CouplingConfig::Rule { rule: CouplingRule::LinearGap, g } => {
                if !g.is_finite() {
                    return Err(Error::Config(format!("non-finite coupling strength {g}")));
                }
                let eps: Vec<T> = levels.iter().map(|l| l.epsilon).collect();
                coupling_from_rule(lit(*g), &eps)
            }
            CouplingConfig::Matrix(rows) => {
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::Config(format!("G must be {k}x{k}")));
                }
                DMatrix::from_fn(k, k, |p, q| lit(rows[p][q]))
            }
        };
        build_model(levels, coupling, self.pairs).map_err(as_config)
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
