//! JSON instance files.
//!
//! ```json
//! {
//!   "agents": [
//!     { "alpha": 1.0, "cost": 0.0, "quality": { "kind": "only-min", "cap": 1.0 } }
//!   ],
//!   "prominences": [1.0],
//!   "price_grid": [0.5, 1.0],
//!   "tie_break": "lowest-index"
//! }
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgentSpec, AuctionInstance, SlotProfile, TieBreak};
use crate::quality::{audit_on_grid, QualityModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub agents: Vec<AgentSpec>,
    pub prominences: Vec<f64>,
    pub price_grid: Vec<f64>,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl From<&AuctionInstance> for InstanceFile {
    fn from(inst: &AuctionInstance) -> Self {
        InstanceFile {
            agents: inst.agents().to_vec(),
            prominences: inst.slots().as_slice().to_vec(),
            price_grid: inst.price_grid().to_vec(),
            tie_break: inst.tie_break().clone(),
        }
    }
}

impl Serialize for AuctionInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceFile::from(self).serialize(s)
    }
}

impl InstanceFile {
    /// Validates the structure without auditing tabulated models.
    pub fn into_instance(self) -> Result<AuctionInstance> {
        let slots = SlotProfile::new(self.prominences)?;
        AuctionInstance::new(self.agents, slots, self.price_grid, self.tie_break)
    }
}

/// Parses a document, reporting the JSON path of the first bad field.
pub fn parse_instance_file(text: &str) -> Result<InstanceFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Load { path, reason: e.into_inner().to_string() }
    })
}

/// Reads and validates an instance. Tabulated quality models are audited on
/// their own sample grid; any violation refuses the load and names the cell.
pub fn load_instance(path: impl AsRef<Path>) -> Result<AuctionInstance> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Load { path: path.as_ref().display().to_string(), reason: e.to_string() })?;
    instance_from_str(&text)
}

pub fn instance_from_str(text: &str) -> Result<AuctionInstance> {
    let file = parse_instance_file(text)?;
    for (i, a) in file.agents.iter().enumerate() {
        if let QualityModel::Tabulated { prices, .. } = &a.quality {
            let report = audit_on_grid(&a.quality, prices);
            if let Some(v) = report.violations.first() {
                return Err(Error::Load {
                    path: format!("agents[{i}].quality"),
                    reason: format!("monotonicity audit failed ({} violations): {v}", report.violations.len()),
                });
            }
        }
    }
    file.into_instance()
}

pub fn instance_to_string(instance: &AuctionInstance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(instance)).expect("instances serialize")
}

pub fn save_instance(instance: &AuctionInstance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path.as_ref(), instance_to_string(instance) + "\n")
        .map_err(|e| Error::Load { path: path.as_ref().display().to_string(), reason: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_the_instance() {
        let text = r#"{"agents":[{"alpha":0.5,"cost":0.1,"quality":{"kind":"smooth-decay","intercept":1.0,"slope":0.5,"decay":2.0}}],
                       "prominences":[1.0,0.4],"price_grid":[0.2,0.8]}"#;
        let inst = instance_from_str(text).unwrap();
        let again = instance_from_str(&instance_to_string(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn bad_field_is_named_by_path() {
        let text = r#"{"agents":[{"alpha":"x","cost":0.1,"quality":{"kind":"only-min"}}],"prominences":[1.0],"price_grid":[1.0]}"#;
        let err = instance_from_str(text).unwrap_err();
        match err {
            Error::Load { path, .. } => assert!(path.starts_with("agents[0]"), "{path}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn increasing_prominences_name_the_slot_pair() {
        let text = r#"{"agents":[{"alpha":1,"cost":0,"quality":{"kind":"only-min"}}],"prominences":[0.5,0.9],"price_grid":[1.0]}"#;
        let err = instance_from_str(text).unwrap_err().to_string();
        assert!(err.contains("prominences[0..=1]"), "{err}");
    }

    #[test]
    fn non_monotone_table_is_refused_with_its_cell() {
        let text = r#"{"agents":[{"alpha":1,"cost":0,"quality":{"kind":"tabulated","prices":[1.0,2.0],"values":[[0.5],[0.7,0.8]]}}],
                       "prominences":[1.0],"price_grid":[1.0,2.0]}"#;
        let err = instance_from_str(text).unwrap_err().to_string();
        assert!(err.contains("cell"), "{err}");
    }
}
