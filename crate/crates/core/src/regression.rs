//! Frozen regression constants: measured max ratio per estimate id, with 2×
//! headroom. The file ships in `data/` and is embedded into the binary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EMBEDDED: &str = include_str!("../data/regression_constants.toml");

/// Headroom applied to a measured maximum when freezing.
pub const HEADROOM: f64 = 2.0;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionConstants {
    pub constants: BTreeMap<String, f64>,
}

impl RegressionConstants {
    pub fn parse(text: &str) -> Result<Self> {
        let c: RegressionConstants = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some((k, v)) = c.constants.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parse(format!("constant {k} = {v} is not a positive number")));
        }
        Ok(c)
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded constants parse")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The copy in the source tree, read at run time.
    pub fn from_source_tree() -> Result<Self> {
        Self::load(concat!(env!("CARGO_MANIFEST_DIR"), "/data/regression_constants.toml"))
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.constants.get(id).copied()
    }

    /// Store `measured · HEADROOM` for `id`.
    pub fn freeze(&mut self, id: &str, measured: f64) {
        self.constants.insert(id.to_string(), measured * HEADROOM);
    }

    pub fn to_toml(&self) -> String {
        let mut out = String::from("# measured max ratio × 2, per estimate id\n[constants]\n");
        for (k, v) in &self.constants {
            out.push_str(&format!("\"{k}\" = {v:.6e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_embedded_copy() {
        let mut c = RegressionConstants::default();
        c.freeze("ge", 1.5);
        let back = RegressionConstants::parse(&c.to_toml()).unwrap();
        assert_eq!(back.get("ge"), Some(3.0));
        assert_eq!(RegressionConstants::embedded(), RegressionConstants::from_source_tree().unwrap());
        assert!(RegressionConstants::parse("[constants]\nx = -1.0\n").is_err());
    }
}
