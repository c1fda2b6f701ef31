//! Rows emitted by estimate checks and sweeps.

use serde::{Deserialize, Serialize};

/// Dyadic configuration of a check. Unused indices stay `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    pub i: Option<u32>,
    pub j: Option<u32>,
    pub k: Option<u32>,
    pub d1: Option<u64>,
    pub d2: Option<u64>,
    pub d3: Option<u64>,
    /// Paraboloid signs of the inputs, e.g. "P,Pbar".
    pub signs: String,
    /// Anything else that distinguishes the configuration.
    pub note: String,
}

impl EstimateConfig {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        for (name, v) in [("i", self.i), ("j", self.j), ("k", self.k)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        for (name, v) in [("d1", self.d1), ("d2", self.d2), ("d3", self.d3)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if !self.signs.is_empty() {
            parts.push(format!("signs={}", self.signs));
        }
        if !self.note.is_empty() {
            parts.push(self.note.clone());
        }
        parts.join(";")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub id: String,
    pub config: EstimateConfig,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Which random family produced the sample.
    pub sample: String,
    pub seed: u64,
}

impl EstimateReport {
    pub fn new(id: &str, config: EstimateConfig, lhs: f64, rhs: f64, sample: &str, seed: u64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        EstimateReport { id: id.to_string(), config, lhs, rhs, ratio, sample: sample.to_string(), seed }
    }
}

/// Largest ratio in a set of reports (0 when empty).
pub fn max_ratio(reports: &[EstimateReport]) -> f64 {
    reports.iter().map(|r| r.ratio).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_label() {
        let c = EstimateConfig { i: Some(1), j: Some(2), signs: "P,P".into(), ..Default::default() };
        assert_eq!(c.label(), "i=1;j=2;signs=P,P");
        let r = EstimateReport::new("ge", c, 1.0, 4.0, "cap", 7);
        assert_eq!(r.ratio, 0.25);
        assert_eq!(EstimateReport::new("x", Default::default(), 0.0, 0.0, "", 0).ratio, 0.0);
    }
}
