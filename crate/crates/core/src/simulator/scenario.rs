use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::risk_trust::ModelParams;
use crate::trust_metric::{Banding, SemanticShift, TrustTenths};
use crate::AgentId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("scenario does not parse: {0}")]
    Parse(String),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(AgentId),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.into(), reason: reason.into() }
    }
}

/// How an agent behaves when others interact with it. Jitter is in tenths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BehaviorProfile {
    Consistent {
        center: TrustTenths,
        #[serde(default)]
        jitter: u8,
    },
    /// Like `consistent`, except that with `spike_probability` the outcome is
    /// drawn uniformly from `[spike_floor, center - 0.1]`.
    Erratic {
        center: TrustTenths,
        #[serde(default)]
        jitter: u8,
        spike_probability: f64,
        spike_floor: TrustTenths,
    },
    /// Centered on `before` for rounds `< switch_round`, on `after` from then on.
    Shifting {
        before: TrustTenths,
        after: TrustTenths,
        switch_round: u32,
        #[serde(default)]
        jitter: u8,
    },
}

impl BehaviorProfile {
    pub fn consistent(center: TrustTenths, jitter: u8) -> Self {
        BehaviorProfile::Consistent { center, jitter }
    }

    pub fn switch_round(&self) -> Option<u32> {
        match self {
            BehaviorProfile::Shifting { switch_round, .. } => Some(*switch_round),
            _ => None,
        }
    }

    fn validate(&self, field: &str) -> Result<(), ConfigError> {
        let jitter = match self {
            BehaviorProfile::Consistent { jitter, .. }
            | BehaviorProfile::Erratic { jitter, .. }
            | BehaviorProfile::Shifting { jitter, .. } => *jitter,
        };
        if jitter > 10 {
            return Err(ConfigError::invalid(format!("{field}.jitter"), "must be at most 10 tenths"));
        }
        if let BehaviorProfile::Erratic { center, spike_probability, spike_floor, .. } = self {
            if !(0.0..=1.0).contains(spike_probability) {
                return Err(ConfigError::invalid(
                    format!("{field}.spike_probability"),
                    "must lie in [0, 1]",
                ));
            }
            if spike_floor >= center {
                return Err(ConfigError::invalid(
                    format!("{field}.spike_floor"),
                    "must be below center",
                ));
            }
        }
        Ok(())
    }
}

/// How an agent reports its opinions to others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecommenderProfile {
    #[default]
    Honest,
    /// Reports `1.0 - opinion` and the rank-inverted degree.
    Liar,
    /// Reports its opinion moved by a constant number of steps.
    Offset { shift: SemanticShift },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub id: AgentId,
    pub behavior: BehaviorProfile,
    #[serde(default)]
    pub recommender: RecommenderProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Every ordered pair interacts every round.
    #[default]
    AllPairs,
    /// Each agent meets one partner per round, cycling through everyone.
    RoundRobin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub agents: Vec<AgentSpec>,
    pub rounds: u32,
    pub seed: u64,
    pub params: ModelParams,
    #[serde(default)]
    pub banding: Banding,
    #[serde(default)]
    pub pairing: Pairing,
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds < 1 {
            return Err(ConfigError::invalid("rounds", "must be >= 1"));
        }
        if self.agents.len() < 2 {
            return Err(ConfigError::invalid("agents", "need at least two agents"));
        }
        self.params.validate().map_err(|e| match e {
            crate::risk_trust::RiskError::InvalidParams { field, reason } => {
                ConfigError::invalid(format!("params.{field}"), reason)
            }
            other => ConfigError::invalid("params", other.to_string()),
        })?;
        let mut seen = BTreeSet::new();
        for (i, agent) in self.agents.iter().enumerate() {
            if agent.id.as_str().is_empty() {
                return Err(ConfigError::invalid(format!("agents[{i}].id"), "must not be empty"));
            }
            if !seen.insert(&agent.id) {
                return Err(ConfigError::DuplicateAgent(agent.id.clone()));
            }
            agent.behavior.validate(&format!("agents[{i}].behavior"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "agents": [
            {"id": "a", "behavior": {"kind": "consistent", "center": 0.8}},
            {"id": "b", "behavior": {"kind": "erratic", "center": "0.7", "spike_probability": 0.2, "spike_floor": 0.1},
             "recommender": {"kind": "offset", "shift": -1}}
        ],
        "rounds": 3,
        "seed": 11,
        "params": {"k": 1.0, "n": 2, "td_th": 0.5, "rv_th": 0.3}
    }"#;

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        assert_eq!(s.pairing, Pairing::AllPairs);
        assert_eq!(s.banding, Banding::default());
        assert_eq!(s.agents[0].recommender, RecommenderProfile::Honest);
        assert_eq!(
            s.agents[1].recommender,
            RecommenderProfile::Offset { shift: SemanticShift::new(-1).unwrap() }
        );
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
    }

    fn expect_err(text: &str) -> ConfigError {
        Scenario::from_json(text).unwrap_err()
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let typo = MINIMAL.replace("\"td_th\"", "\"td_threshold\"");
        assert!(expect_err(&typo).to_string().contains("td_threshold"));
        let top = MINIMAL.replace("\"seed\": 11", "\"seed\": 11, \"sede\": 1");
        assert!(expect_err(&top).to_string().contains("sede"));
        let nested = MINIMAL.replace("\"center\": 0.8", "\"center\": 0.8, \"jiter\": 1");
        assert!(expect_err(&nested).to_string().contains("jiter"));
    }

    #[test]
    fn validation_names_the_field() {
        let dup = MINIMAL.replace("\"id\": \"b\"", "\"id\": \"a\"");
        assert_eq!(expect_err(&dup), ConfigError::DuplicateAgent(AgentId::from("a")));
        assert!(expect_err(&dup).to_string().contains("`a`"));

        let k = MINIMAL.replace("\"k\": 1.0", "\"k\": 0");
        assert!(expect_err(&k).to_string().contains("params.k"));

        let rounds = MINIMAL.replace("\"rounds\": 3", "\"rounds\": 0");
        assert!(expect_err(&rounds).to_string().contains("rounds"));

        let floor = MINIMAL.replace("\"spike_floor\": 0.1", "\"spike_floor\": 0.7");
        assert!(expect_err(&floor).to_string().contains("agents[1].behavior.spike_floor"));

        let p = MINIMAL.replace("\"spike_probability\": 0.2", "\"spike_probability\": 1.5");
        assert!(expect_err(&p).to_string().contains("spike_probability"));

        let grid = MINIMAL.replace("\"center\": 0.8", "\"center\": 0.85");
        assert!(matches!(expect_err(&grid), ConfigError::Parse(_)));

        let shift = MINIMAL.replace("\"shift\": -1", "\"shift\": -4");
        assert!(matches!(expect_err(&shift), ConfigError::Parse(_)));

        let banding = MINIMAL.replace("\"seed\": 11", "\"seed\": 11, \"banding\": [0.6, 0.3, 0.9]");
        assert!(expect_err(&banding).to_string().contains("banding"));
    }
}
