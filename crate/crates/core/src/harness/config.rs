use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hs::{DeltaRule, HsMode};
use crate::instance::DensitySpec;
use crate::jv::WitnessStrategy;

use super::method::{Criterion, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    #[default]
    Rates,
    Growth,
    Soundness,
}

/// Edges evaluated per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCount {
    All,
    Sample(usize),
}

impl Serialize for EdgeCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EdgeCount::All => s.serialize_str("all"),
            EdgeCount::Sample(k) => s.serialize_u64(*k as u64),
        }
    }
}

impl<'de> Deserialize<'de> for EdgeCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(k) => Ok(EdgeCount::Sample(k)),
            Raw::Word(w) if w == "all" => Ok(EdgeCount::All),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "edges must be a count or \"all\", got \"{w}\""
            ))),
        }
    }
}

/// A density given either by preset name or as a full specification.
fn density_field<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DensitySpec, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Name(String),
        Spec(DensitySpec),
    }
    match Raw::deserialize(d)? {
        Raw::Name(name) => DensitySpec::from_name(&name).map_err(serde::de::Error::custom),
        Raw::Spec(spec) => Ok(spec),
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    pub criterion: Criterion,
    /// HS only. Soundness runs check every mode when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<HsMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_rule: Option<DeltaRule>,
    /// JV only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessStrategy>,
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub edges: EdgeCount,
    #[serde(default, deserialize_with = "density_field")]
    pub density: DensitySpec,
    pub seed: u64,
    /// When false the `wall_ms` column is written as 0, so output depends
    /// only on the configuration.
    #[serde(default = "yes")]
    pub timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn method(&self) -> Method {
        Method {
            criterion: self.criterion,
            hs_mode: self.mode.unwrap_or_default(),
            delta_rule: self.delta_rule.unwrap_or_default(),
            witness: self.witness,
        }
    }

    /// Every method the configuration asks for.
    pub fn methods(&self) -> Vec<Method> {
        match (self.criterion, self.mode, self.experiment) {
            (Criterion::Hs, None, ExperimentKind::Soundness) => {
                let rule = self.delta_rule.unwrap_or_default();
                let mut all = vec![
                    Method::hs(HsMode::PairSearch, DeltaRule::Fixed),
                    Method::hs(HsMode::PairSearch, DeltaRule::PairAdaptive),
                    Method::hs(HsMode::CanonicalRegion, DeltaRule::Fixed),
                ];
                if self.delta_rule.is_some() {
                    all.retain(|m| m.hs_mode == HsMode::CanonicalRegion || m.delta_rule == rule);
                }
                all
            }
            _ => vec![self.method()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::InvalidConfig("n_values must not be empty".into()));
        }
        let min = self.criterion.min_n();
        if let Some(&n) = self.n_values.iter().find(|&&n| n < min) {
            return Err(Error::InvalidConfig(format!(
                "{} needs n >= {min}, got {n}",
                self.criterion.name()
            )));
        }
        if self.edges == EdgeCount::Sample(0) {
            return Err(Error::InvalidConfig("edges must be positive".into()));
        }
        if self.criterion == Criterion::Jv && (self.mode.is_some() || self.delta_rule.is_some()) {
            return Err(Error::InvalidConfig("mode and delta_rule apply to hs only".into()));
        }
        if self.criterion == Criterion::Hs && self.witness.is_some() {
            return Err(Error::InvalidConfig("witness applies to jv only".into()));
        }
        if let Some(w) = self.witness {
            if w == WitnessStrategy::NearestK(0) {
                return Err(Error::InvalidConfig("nearest-k needs k >= 1".into()));
            }
        }
        self.density.sampler()?;
        match self.experiment {
            ExperimentKind::Rates | ExperimentKind::Growth if self.trials == 0 => {
                Err(Error::InvalidConfig("trials must be positive".into()))
            }
            ExperimentKind::Growth => {
                let mut distinct = self.n_values.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 {
                    return Err(Error::InvalidConfig(
                        "growth needs at least 3 distinct n values".into(),
                    ));
                }
                Ok(())
            }
            ExperimentKind::Soundness => {
                if let Some(&n) = self.n_values.iter().find(|&&n| !(5..=15).contains(&n)) {
                    return Err(Error::InvalidConfig(format!(
                        "soundness sizes must lie in [5, 15], got {n}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
