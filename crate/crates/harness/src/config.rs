//! Experiment configuration, read from TOML. See the README for the field reference.

use std::path::Path;

use serde::Deserialize;

use crate::error::{HarnessError, Result};

pub const MAX_HORIZON: usize = 1_000_000;
pub const MAX_SEEDS: usize = 1_000;
pub const MAX_PROFILES: usize = 1_000_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentConfig,
    pub adversary: AdversaryConfig,
    pub algorithm: AlgorithmConfig,
    pub horizon: Option<usize>,
    pub horizons: Option<Vec<usize>>,
    pub seeds: Vec<u64>,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default)]
    pub record_runtime: bool,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvironmentKind {
    Vcg,
    ItemPricing,
    Level,
    Multiunit,
    Sispa,
    Contextual,
}

impl EnvironmentKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvironmentKind::Vcg => "vcg",
            EnvironmentKind::ItemPricing => "item_pricing",
            EnvironmentKind::Level => "level",
            EnvironmentKind::Multiunit => "multiunit",
            EnvironmentKind::Sispa => "sispa",
            EnvironmentKind::Contextual => "contextual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitRange {
    #[default]
    Full,
    Mir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unlimited {
    Unlimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum SupplyEntry {
    Units(u32),
    Unlimited(Unlimited),
}

/// OR-of-features policies over a VCG base: `high` and `low` list reserve levels per bidder.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyClassConfig {
    pub features: u32,
    pub high: Vec<Vec<u32>>,
    pub low: Vec<Vec<u32>>,
}

/// Flat parameter table; which fields are required depends on `kind`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub kind: EnvironmentKind,
    pub n: Option<usize>,
    pub m: Option<u32>,
    pub s: Option<usize>,
    pub k: Option<usize>,
    pub supply: Option<Vec<SupplyEntry>>,
    pub max_bidders: Option<usize>,
    #[serde(default)]
    pub range: UnitRange,
    pub levels: Option<Vec<u32>>,
    pub additive: Option<Vec<u32>>,
    pub policy_class: Option<PolicyClassConfig>,
    pub transductive_set: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    Scripted,
    Iid,
    Sticky,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPool {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// Draw bid values from `{0, 1/(2m), …, 1}` instead of `[0, 1]`.
    #[serde(default)]
    pub grid: bool,
}

/// Exactly one of `profiles` and `random` is set. Scripted pools are played in order and cycled.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    pub profiles: Option<Vec<toml::Value>>,
    pub random: Option<RandomPool>,
    pub probs: Option<Vec<f64>>,
    pub rho: Option<f64>,
    /// Seed of the i.i.d. and sticky draws, shared by every learner seed.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    Explicit,
    Oracle,
    Signed,
    ContextualTransductive,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Explicit => "explicit",
            AlgorithmKind::Oracle => "oracle",
            AlgorithmKind::Signed => "signed",
            AlgorithmKind::ContextualTransductive => "contextual_transductive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleChoice {
    Enumerate,
    Integral,
    Dp,
    Mir,
}

/// `eta` sets `U[0, 1/η]` for `explicit` and `oracle`; `nu` sets `U[−ν, ν]` for the signed kinds.
/// Absent values are derived from the admissibility constants and `T`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub kind: AlgorithmKind,
    pub oracle: Option<OracleChoice>,
    pub eta: Option<f64>,
    pub nu: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| HarnessError::config("<root>", e.to_string()))?;
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let parent = e.path().to_string();
            let message = e.into_inner().message().trim().to_string();
            // Missing fields are reported at their parent table.
            let missing = message
                .strip_prefix("missing field `")
                .and_then(|m| m.split('`').next());
            let path = match (parent.as_str(), missing) {
                (".", Some(f)) => f.to_string(),
                (".", None) => "<root>".to_string(),
                (p, Some(f)) => format!("{p}.{f}"),
                (p, None) => p.to_string(),
            };
            HarnessError::config(path, message)
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// The horizons to run, in order. Scripted pools default to their own length.
    pub fn horizons(&self) -> Result<Vec<usize>> {
        match (self.horizon, &self.horizons) {
            (Some(_), Some(_)) => Err(HarnessError::config(
                "horizons",
                "set either horizon or horizons, not both",
            )),
            (Some(t), None) => Ok(vec![t]),
            (None, Some(ts)) => Ok(ts.clone()),
            (None, None) => match (
                &self.adversary.kind,
                &self.adversary.profiles,
                &self.adversary.random,
            ) {
                (AdversaryKind::Scripted, Some(p), _) => Ok(vec![p.len()]),
                (AdversaryKind::Scripted, None, Some(r)) => Ok(vec![r.count]),
                _ => Err(HarnessError::config(
                    "horizon",
                    "required for i.i.d. and sticky adversaries",
                )),
            },
        }
    }

    /// Checks everything that does not need the environment built.
    pub fn validate(&self) -> Result<()> {
        let horizons = self.horizons()?;
        let field = if self.horizons.is_some() {
            "horizons"
        } else {
            "horizon"
        };
        if horizons.is_empty() {
            return Err(HarnessError::config(field, "needs at least one horizon"));
        }
        for (i, &t) in horizons.iter().enumerate() {
            let path = if self.horizons.is_some() {
                format!("horizons[{i}]")
            } else {
                field.to_string()
            };
            if t == 0 || t > MAX_HORIZON {
                return Err(HarnessError::config(
                    path,
                    format!("must lie in 1..={MAX_HORIZON}, got {t}"),
                ));
            }
        }
        if self.seeds.is_empty() || self.seeds.len() > MAX_SEEDS {
            return Err(HarnessError::config(
                "seeds",
                format!("needs 1..={MAX_SEEDS} seeds"),
            ));
        }
        for (i, s) in self.seeds.iter().enumerate() {
            if self.seeds[..i].contains(s) {
                return Err(HarnessError::config(
                    format!("seeds[{i}]"),
                    format!("duplicate seed {s}"),
                ));
            }
        }
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(HarnessError::config(
                "c",
                format!("must lie in (0, 1], got {}", self.c),
            ));
        }
        self.validate_adversary()?;
        self.validate_algorithm()
    }

    fn validate_adversary(&self) -> Result<()> {
        let a = &self.adversary;
        let count = match (&a.profiles, &a.random) {
            (Some(_), Some(_)) => {
                return Err(HarnessError::config(
                    "adversary.random",
                    "set either profiles or random",
                ))
            }
            (None, None) => {
                return Err(HarnessError::config(
                    "adversary.profiles",
                    "missing profiles or random pool",
                ))
            }
            (Some(p), None) => p.len(),
            (None, Some(r)) => r.count,
        };
        if count == 0 || count > MAX_PROFILES {
            let path = if a.profiles.is_some() {
                "adversary.profiles"
            } else {
                "adversary.random.count"
            };
            return Err(HarnessError::config(
                path,
                format!("pool size must lie in 1..={MAX_PROFILES}"),
            ));
        }
        if let Some(probs) = &a.probs {
            if a.kind == AdversaryKind::Scripted {
                return Err(HarnessError::config(
                    "adversary.probs",
                    "scripted adversaries take no probabilities",
                ));
            }
            if probs.len() != count {
                return Err(HarnessError::config(
                    "adversary.probs",
                    format!("{} probabilities for {count} profiles", probs.len()),
                ));
            }
        }
        match (a.kind, a.rho) {
            (AdversaryKind::Sticky, None) => Err(HarnessError::config(
                "adversary.rho",
                "required for sticky adversaries",
            )),
            (AdversaryKind::Sticky, Some(rho)) if !(0.5..1.0).contains(&rho) => Err(
                HarnessError::config("adversary.rho", format!("must lie in [0.5, 1), got {rho}")),
            ),
            (AdversaryKind::Scripted | AdversaryKind::Iid, Some(_)) => Err(HarnessError::config(
                "adversary.rho",
                "only sticky adversaries take rho",
            )),
            _ => Ok(()),
        }
    }

    fn validate_algorithm(&self) -> Result<()> {
        let alg = &self.algorithm;
        let contextual = self.environment.kind == EnvironmentKind::Contextual;
        if contextual != (alg.kind == AlgorithmKind::ContextualTransductive) {
            return Err(HarnessError::config(
                "algorithm.kind",
                "contextual environments run exactly the contextual_transductive algorithm",
            ));
        }
        if let Some(eta) = alg.eta {
            if matches!(
                alg.kind,
                AlgorithmKind::Signed | AlgorithmKind::ContextualTransductive
            ) {
                return Err(HarnessError::config(
                    "algorithm.eta",
                    "signed algorithms take nu",
                ));
            }
            if !(eta.is_finite() && eta > 0.0) {
                return Err(HarnessError::config(
                    "algorithm.eta",
                    format!("must be positive, got {eta}"),
                ));
            }
        }
        if let Some(nu) = alg.nu {
            if matches!(alg.kind, AlgorithmKind::Explicit | AlgorithmKind::Oracle) {
                return Err(HarnessError::config(
                    "algorithm.nu",
                    "positive-perturbation algorithms take eta",
                ));
            }
            if !(nu.is_finite() && nu > 0.0) {
                return Err(HarnessError::config(
                    "algorithm.nu",
                    format!("must be positive, got {nu}"),
                ));
            }
        }
        if alg.oracle.is_some()
            && matches!(
                alg.kind,
                AlgorithmKind::Explicit | AlgorithmKind::ContextualTransductive
            )
        {
            return Err(HarnessError::config(
                "algorithm.oracle",
                format!("not used by {}", alg.kind.name()),
            ));
        }
        Ok(())
    }
}

/// Reads a required environment parameter.
pub(crate) fn require<T: Copy>(value: Option<T>, field: &str, kind: EnvironmentKind) -> Result<T> {
    value.ok_or_else(|| {
        HarnessError::config(
            format!("environment.{field}"),
            format!("required for {}", kind.name()),
        )
    })
}
