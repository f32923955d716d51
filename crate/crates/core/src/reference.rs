//! Reference stiffness table for the five bundled sheets.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::force::SpringConstants;
use crate::sheet::Material;

/// One row of the reference table. `thickness` and `ribbon_width` are kept as
/// the original text (e.g. `"0.25 mm"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceEntry {
    pub material: Material,
    pub thickness: String,
    pub ribbon_width: String,
    pub kx: f64,
    pub ky: f64,
}

impl ReferenceEntry {
    pub fn constants(&self) -> SpringConstants {
        SpringConstants::new(self.kx, self.ky)
    }

    pub fn thickness_mm(&self) -> Result<f64> {
        parse_mm(&self.thickness)
    }

    pub fn ribbon_width_mm(&self) -> Result<f64> {
        parse_mm(&self.ribbon_width)
    }
}

fn parse_mm(text: &str) -> Result<f64> {
    let number = text.trim().strip_suffix("mm").unwrap_or(text).trim();
    number
        .parse::<f64>()
        .map_err(|_| Error::UnknownConstants(format!("cannot read length {text:?}")))
}

/// Stiffness table keyed by sheet name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferenceTable(pub BTreeMap<String, ReferenceEntry>);

const BUNDLED: &str = include_str!("../../../data/table1_constants.json");

impl ReferenceTable {
    /// The table shipped in `data/table1_constants.json`.
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED).expect("bundled constants table is valid")
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn get(&self, name: &str) -> Option<&ReferenceEntry> {
        self.0
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v)
    }

    pub fn constants(&self, name: &str) -> Result<SpringConstants> {
        self.get(name)
            .map(ReferenceEntry::constants)
            .ok_or_else(|| Error::UnknownConstants(format!("no entry named {name:?}")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ReferenceEntry)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}
