use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::{read_tsplib, Instance, Provenance};

pub const INSTANCE_FORMAT: &str = "edge-elim-instance";

/// JSON instance dump; records seed and density of generated instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub points: Vec<[f64; 2]>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            format: INSTANCE_FORMAT.into(),
            version: 1,
            n: inst.n(),
            provenance: inst.provenance().cloned(),
            points: inst.points().iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if self.format != INSTANCE_FORMAT {
            return Err(Error::InvalidInstance(format!(
                "unknown format '{}'",
                self.format
            )));
        }
        if self.n != self.points.len() {
            return Err(Error::InvalidInstance(format!(
                "header says n = {} but {} points follow",
                self.n,
                self.points.len()
            )));
        }
        let inst = Instance::new(self.points.iter().map(|&[x, y]| Point::new(x, y)).collect())?;
        Ok(match self.provenance {
            Some(p) => inst.with_provenance(p),
            None => inst,
        })
    }
}

impl Instance {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from_instance(self))
            .expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<InstanceFile>(text)?.into_instance()
    }
}

/// Reads either the JSON dump or a TSPLIB file, detected from the content.
pub fn load_instance(text: &str) -> Result<Instance> {
    if text.trim_start().starts_with('{') {
        Instance::from_json(text)
    } else {
        read_tsplib(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DensitySpec;

    #[test]
    fn json_round_trip_keeps_provenance() {
        let inst = Instance::generate(20, &DensitySpec::gaussian_preset(), 11).unwrap();
        let back = load_instance(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
        assert_eq!(back.provenance().unwrap().seed, 11);
    }

    #[test]
    fn rejects_count_mismatch() {
        let text = r#"{"format":"edge-elim-instance","version":1,"n":2,"points":[[0.1,0.2]]}"#;
        assert!(load_instance(text).is_err());
    }
}
