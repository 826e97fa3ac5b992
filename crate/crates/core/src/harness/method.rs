use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hs::{hs_edge_useless, DeltaRule, HsMode, HsParams, HsWitness, WitnessSource};
use crate::instance::Instance;
use crate::jv::{hyperbola_contains, jv_edge_useless, jv_witness_eliminates, JvParams, WitnessStrategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[serde(alias = "HS")]
    Hs,
    #[serde(alias = "JV")]
    Jv,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Hs => "hs",
            Criterion::Jv => "jv",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            Criterion::Hs => 5,
            Criterion::Jv => 4,
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hs" => Ok(Criterion::Hs),
            "jv" => Ok(Criterion::Jv),
            _ => Err(Error::InvalidConfig(format!("unknown criterion '{s}' (expected hs or jv)"))),
        }
    }
}

/// A fully specified elimination procedure; parameters that scale with the
/// instance size are resolved per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Method {
    pub criterion: Criterion,
    #[serde(default)]
    pub hs_mode: HsMode,
    #[serde(default)]
    pub delta_rule: DeltaRule,
    /// JV witness strategy; `None` picks the size-dependent default.
    #[serde(default)]
    pub witness: Option<WitnessStrategy>,
}

impl Method {
    pub fn jv() -> Self {
        Method {
            criterion: Criterion::Jv,
            hs_mode: HsMode::default(),
            delta_rule: DeltaRule::default(),
            witness: None,
        }
    }

    pub fn hs(mode: HsMode, delta_rule: DeltaRule) -> Self {
        Method {
            criterion: Criterion::Hs,
            hs_mode: mode,
            delta_rule,
            witness: None,
        }
    }

    pub fn hs_params(&self, n: usize) -> HsParams {
        HsParams {
            delta_rule: self.delta_rule,
            ..HsParams::for_n(n)
        }
    }

    pub fn jv_params(&self, n: usize) -> JvParams {
        let mut params = JvParams::for_n(n);
        if let Some(w) = self.witness {
            params.witness_strategy = w;
        }
        params
    }

    /// Label for the `mode` column of result tables.
    pub fn label(&self, n: usize) -> String {
        match self.criterion {
            Criterion::Jv => match self.jv_params(n).witness_strategy {
                WitnessStrategy::AllVertices => "all-vertices".into(),
                WitnessStrategy::NearestK(k) => format!("nearest-{k}"),
            },
            Criterion::Hs => match (self.hs_mode, self.delta_rule) {
                (HsMode::PairSearch, DeltaRule::PairAdaptive) => "pair-search/adaptive".into(),
                (mode, _) => mode.name().into(),
            },
        }
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        let min = self.criterion.min_n();
        if n < min {
            return Err(Error::SizeOutOfRange { n, min, max: usize::MAX });
        }
        Ok(())
    }

    pub fn evaluate(&self, inst: &Instance, p: usize, q: usize) -> Result<Option<Witness>> {
        match self.criterion {
            Criterion::Jv => {
                let params = self.jv_params(inst.n());
                let found = jv_edge_useless(inst, p, q, &params)?;
                if let Some(w) = found {
                    debug_assert!(hyperbolas_empty(inst, p, q, w.r));
                }
                Ok(found.map(|w| Witness::Jv { r: w.r }))
            }
            Criterion::Hs => {
                let params = self.hs_params(inst.n());
                Ok(hs_edge_useless(inst, p, q, &params, self.hs_mode)?.map(Witness::from_hs))
            }
        }
    }
}

/// No vertex other than `p`, `q`, `r` lies in either detour hyperbola.
pub fn hyperbolas_empty(inst: &Instance, p: usize, q: usize, r: usize) -> bool {
    let (pp, qp, rp) = (inst.point(p), inst.point(q), inst.point(r));
    inst.points().iter().enumerate().all(|(z, &zp)| {
        z == p
            || z == q
            || z == r
            || !(hyperbola_contains(pp, qp, rp, zp) || hyperbola_contains(qp, pp, rp, zp))
    })
}

/// A replayable certificate, printed as `jv:<r>`, `hs-pair:<r>;<s>;<delta>` or
/// `hs-canonical:<k>:<r>;<s>;<delta>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Jv { r: usize },
    HsPair { r: usize, s: usize, delta: f64 },
    HsCanonical { region: usize, r: usize, s: usize, delta: f64 },
}

impl Witness {
    pub fn from_hs(w: HsWitness) -> Self {
        match w.source {
            WitnessSource::PairSearch => Witness::HsPair { r: w.r, s: w.s, delta: w.delta },
            WitnessSource::CanonicalRegion { index } => Witness::HsCanonical {
                region: index,
                r: w.r,
                s: w.s,
                delta: w.delta,
            },
        }
    }

    pub fn criterion(&self) -> Criterion {
        match self {
            Witness::Jv { .. } => Criterion::Jv,
            _ => Criterion::Hs,
        }
    }

    /// Re-checks the certificate from scratch on `inst`.
    pub fn replay(&self, inst: &Instance, p: usize, q: usize) -> Result<bool> {
        match *self {
            Witness::Jv { r } => jv_witness_eliminates(inst, p, q, r, &JvParams::for_n(inst.n())),
            Witness::HsPair { r, s, delta } | Witness::HsCanonical { r, s, delta, .. } => {
                inst.check_index(r)?;
                inst.check_index(s)?;
                Ok(crate::hs::pair_eliminates_at(inst, p, q, r, s, delta, 1e-12).is_some())
            }
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Jv { r } => write!(f, "jv:{r}"),
            Witness::HsPair { r, s, delta } => write!(f, "hs-pair:{r};{s};{delta}"),
            Witness::HsCanonical { region, r, s, delta } => {
                write!(f, "hs-canonical:{region}:{r};{s};{delta}")
            }
        }
    }
}

impl FromStr for Witness {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("malformed witness '{text}'"));
        let idx = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let pair = |s: &str| -> Result<(usize, usize, f64)> {
            let parts: Vec<&str> = s.split(';').collect();
            let [r, s, d] = parts[..] else {
                return Err(bad());
            };
            let delta: f64 = d.parse().map_err(|_| bad())?;
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(bad());
            }
            Ok((idx(r)?, idx(s)?, delta))
        };
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        match kind {
            "jv" => Ok(Witness::Jv { r: idx(rest)? }),
            "hs-pair" => {
                let (r, s, delta) = pair(rest)?;
                Ok(Witness::HsPair { r, s, delta })
            }
            "hs-canonical" => {
                let (k, rest) = rest.split_once(':').ok_or_else(bad)?;
                let (r, s, delta) = pair(rest)?;
                Ok(Witness::HsCanonical { region: idx(k)?, r, s, delta })
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn witness_text_round_trip() {
        for w in [
            Witness::Jv { r: 7 },
            Witness::HsPair { r: 1, s: 2, delta: 1.0 / 1000f64.sqrt() },
            Witness::HsCanonical { region: 3, r: 4, s: 5, delta: 0.01 },
        ] {
            assert_eq!(w.to_string().parse::<Witness>().unwrap(), w);
        }
        for bad in ["", "jv", "jv:x", "hs-pair:1;2", "hs-pair:1;2;-1", "hs-canonical:1;2;0.1", "xx:1"] {
            assert!(bad.parse::<Witness>().is_err(), "{bad}");
        }
    }

    #[test]
    fn criterion_parsing() {
        assert_eq!("HS".parse::<Criterion>().unwrap(), Criterion::Hs);
        assert_eq!("jv".parse::<Criterion>().unwrap(), Criterion::Jv);
        assert!("tsp".parse::<Criterion>().is_err());
    }
}
