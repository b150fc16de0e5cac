//! Scenario configuration files (TOML).
//!
//! ```toml
//! scenario = "hospital"      # or "conacq"
//! seed = 11
//! cycles = 10
//! retry_limit = 3
//!
//! [hospital]
//! M = 3
//! true_weights = [1.0, 2.0, 2.0, 1.0]
//! noise_sigma = 0.0
//! feature_ranges = [[0, 3], [0, 2]]
//! arrivals_per_cycle = 5
//! bootstrap_history = 20
//! resources = [2, 1]
//! max_time = 60
//! task_templates = [{ use = [1, 0] }, { use = [1, 1], prev = 0 }]
//!
//! [conacq]
//! n_vars = 5
//! domain_size = 5
//! target_constraints = ["X1 < X2", "X3 != X4"]
//! relations = ["=", "!=", "<", "<=", ">", ">="]
//! ```
//!
//! Unknown keys are rejected. Only the table named by `scenario` is read.

use icp_core::cp::VarId;
use icp_core::icp::DEFAULT_RETRY_LIMIT;
use icp_core::ml::{Candidate, Relation};
use icp_core::worlds::{ConacqConfig, ConacqError, HospitalConfig, HospitalError, TaskTemplate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Hospital,
    Conacq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateConfig {
    /// Demand per resource.
    #[serde(rename = "use")]
    pub usage: Vec<i64>,
    /// Index of an earlier template that has to finish first.
    #[serde(default)]
    pub prev: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HospitalSection {
    #[serde(rename = "M")]
    pub m: usize,
    pub true_weights: Vec<f64>,
    pub noise_sigma: f64,
    pub feature_ranges: Vec<(i64, i64)>,
    pub arrivals_per_cycle: usize,
    pub bootstrap_history: usize,
    pub resources: Vec<i64>,
    pub task_templates: Vec<TemplateConfig>,
    pub max_time: i64,
    #[serde(default)]
    pub gap: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConacqSection {
    pub n_vars: usize,
    pub domain_size: i64,
    pub target_constraints: Vec<String>,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    pub cycles: u64,
    #[serde(default = "default_retry_limit")]
    pub retry_limit: u32,
    #[serde(default)]
    pub hospital: Option<HospitalSection>,
    #[serde(default)]
    pub conacq: Option<ConacqSection>,
}

fn default_retry_limit() -> u32 {
    DEFAULT_RETRY_LIMIT
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_string(), reason: reason.into() }
}

/// The world configuration a validated scenario resolves to.
#[derive(Debug, Clone, PartialEq)]
pub enum World {
    Hospital(HospitalConfig),
    Conacq(ConacqConfig),
}

/// Parses `X<i> <op> X<j>` with 1-based variable numbers.
pub fn parse_candidate(text: &str) -> Option<Candidate> {
    let var = |t: &str| -> Option<VarId> {
        let i: usize = t.strip_prefix('X')?.parse().ok()?;
        i.checked_sub(1).map(VarId)
    };
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let [a, op, b] = tokens[..] else {
        return None;
    };
    let (a, b) = (var(a)?, var(b)?);
    let relation = Relation::from_symbol(op)?;
    (a != b).then(|| Candidate::new(a, b, relation))
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))
    }

    /// Checks the counts and resolves the section named by `scenario`.
    pub fn validate(&self) -> Result<World, ConfigError> {
        if self.cycles == 0 {
            return Err(invalid("cycles", "must be at least 1"));
        }
        match self.scenario {
            ScenarioKind::Hospital => {
                let h = self.hospital.as_ref().ok_or_else(|| invalid("hospital", "missing section"))?;
                let config = h.to_world();
                if h.bootstrap_history == 0 {
                    return Err(invalid("hospital.bootstrap_history", "must be positive"));
                }
                config.validate().map_err(|HospitalError::Invalid { field, reason }| {
                    let field = match field {
                        "features" => "M",
                        "capacities" => "resources",
                        f => f,
                    };
                    invalid(&format!("hospital.{field}"), reason)
                })?;
                Ok(World::Hospital(config))
            }
            ScenarioKind::Conacq => {
                let c = self.conacq.as_ref().ok_or_else(|| invalid("conacq", "missing section"))?;
                let config = c.to_world()?;
                config
                    .validate()
                    .map_err(|ConacqError::Invalid { field, reason }| invalid(&format!("conacq.{field}"), reason))?;
                Ok(World::Conacq(config))
            }
        }
    }
}

impl HospitalSection {
    pub fn to_world(&self) -> HospitalConfig {
        HospitalConfig {
            features: self.m,
            true_weights: self.true_weights.clone(),
            noise_sigma: self.noise_sigma,
            feature_ranges: self.feature_ranges.clone(),
            arrivals_per_cycle: self.arrivals_per_cycle,
            bootstrap_history: self.bootstrap_history,
            capacities: self.resources.clone(),
            task_templates: self
                .task_templates
                .iter()
                .map(|t| TaskTemplate { usage: t.usage.clone(), prev: t.prev })
                .collect(),
            max_time: self.max_time,
            gap: self.gap,
        }
    }
}

impl ConacqSection {
    pub fn to_world(&self) -> Result<ConacqConfig, ConfigError> {
        let target = self
            .target_constraints
            .iter()
            .map(|t| parse_candidate(t).ok_or_else(|| invalid("conacq.target_constraints", format!("cannot read `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let relations = self
            .relations
            .iter()
            .map(|r| Relation::from_symbol(r).ok_or_else(|| invalid("conacq.relations", format!("unknown relation `{r}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        if target.iter().any(|c| c.second.0 >= self.n_vars) {
            return Err(invalid("conacq.target_constraints", "refers to a variable beyond n_vars"));
        }
        Ok(ConacqConfig { n_vars: self.n_vars, domain_size: self.domain_size, target, relations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HOSPITAL: &str = r#"
scenario = "hospital"
seed = 3
cycles = 4

[hospital]
M = 3
true_weights = [1.0, 2.0, 2.0, 1.0]
noise_sigma = 0.0
feature_ranges = [[0, 3], [0, 2]]
arrivals_per_cycle = 2
bootstrap_history = 10
resources = [2, 1]
max_time = 40
task_templates = [{ use = [1, 0] }, { use = [1, 1], prev = 0 }]
"#;

    #[test]
    fn hospital_section_resolves() {
        let c = ScenarioConfig::from_toml(HOSPITAL).unwrap();
        assert_eq!(c.retry_limit, DEFAULT_RETRY_LIMIT);
        let World::Hospital(h) = c.validate().unwrap() else { panic!("wrong world") };
        assert_eq!(h.capacities, [2, 1]);
        assert_eq!(h.task_templates[1].prev, Some(0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let typo = HOSPITAL.replace("noise_sigma", "noise_sigmma");
        assert!(matches!(ScenarioConfig::from_toml(&typo), Err(ConfigError::Syntax(m)) if m.contains("noise_sigmma")));
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = ScenarioConfig::from_toml(HOSPITAL).unwrap();
        c.hospital.as_mut().unwrap().m = 4;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "hospital.M"));
        c.hospital.as_mut().unwrap().m = 3;
        c.cycles = 0;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "cycles"));
    }

    #[test]
    fn candidates_parse() {
        assert_eq!(parse_candidate("X1 < X2"), Some(Candidate::new(VarId(0), VarId(1), Relation::Lt)));
        assert_eq!(parse_candidate("X3 >= X2"), Some(Candidate::new(VarId(1), VarId(2), Relation::Le)));
        assert_eq!(parse_candidate("X1 < X1"), None);
        assert_eq!(parse_candidate("X0 < X1"), None);
        assert_eq!(parse_candidate("X1 ~ X2"), None);
    }

    #[test]
    fn conacq_target_outside_bias() {
        let c = ScenarioConfig::from_toml(
            r#"
scenario = "conacq"
cycles = 10
[conacq]
n_vars = 3
domain_size = 3
target_constraints = ["X1 < X2"]
relations = ["=", "!="]
"#,
        )
        .unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::Invalid { field, .. }) if field == "conacq.target_constraints"));
    }
}
