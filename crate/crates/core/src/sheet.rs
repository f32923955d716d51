//! Static description of a kirigami sheet and the bundled reference presets.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Material {
    #[serde(rename = "PET")]
    Pet,
    #[serde(rename = "TPU")]
    Tpu,
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Material::Pet => "PET",
            Material::Tpu => "TPU",
        })
    }
}

/// One kirigami sheet: an elliptical boundary band around parallel slits.
///
/// `lx_init` runs along the pull axis (perpendicular to the discrete
/// ribbons), `ly_init` along the ribbons. All lengths in mm. `material` is
/// carried as metadata and never enters a computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSheetSpec")]
pub struct SheetSpec {
    pub name: String,
    pub lx_init: f64,
    pub ly_init: f64,
    pub ribbon_width: f64,
    pub boundary_margin: f64,
    pub thickness: f64,
    pub material: Material,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSheetSpec {
    name: String,
    lx_init: f64,
    ly_init: f64,
    ribbon_width: f64,
    #[serde(default)]
    boundary_margin: Option<f64>,
    thickness: f64,
    material: Material,
}

impl TryFrom<RawSheetSpec> for SheetSpec {
    type Error = Error;

    fn try_from(raw: RawSheetSpec) -> Result<Self> {
        SheetSpec::new(
            raw.name,
            raw.lx_init,
            raw.ly_init,
            raw.ribbon_width,
            raw.boundary_margin,
            raw.thickness,
            raw.material,
        )
    }
}

impl SheetSpec {
    /// Builds and validates a spec. A missing `boundary_margin` defaults to
    /// the ribbon width.
    pub fn new(
        name: impl Into<String>,
        lx_init: f64,
        ly_init: f64,
        ribbon_width: f64,
        boundary_margin: Option<f64>,
        thickness: f64,
        material: Material,
    ) -> Result<Self> {
        let spec = SheetSpec {
            name: name.into(),
            lx_init,
            ly_init,
            ribbon_width,
            boundary_margin: boundary_margin.unwrap_or(ribbon_width),
            thickness,
            material,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lx_init", self.lx_init),
            ("ly_init", self.ly_init),
            ("ribbon_width", self.ribbon_width),
            ("thickness", self.thickness),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "{field} must be finite and > 0, got {value}"
                )));
            }
        }
        let m = self.boundary_margin;
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "boundary_margin must be finite and >= 0, got {m}"
            )));
        }
        if 2.0 * m >= self.lx_init {
            return Err(Error::InvalidSpec(format!(
                "2 * boundary_margin ({}) must be below lx_init ({})",
                2.0 * m,
                self.lx_init
            )));
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Json(j) => Error::InvalidSpec(format!("{}: {j}", path.display())),
            other => other,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("sheet spec serializes")
    }

    /// Ratio of the ribbon-axis extent to the pull-axis extent.
    pub fn aspect_ratio(&self) -> f64 {
        self.ly_init / self.lx_init
    }
}

const PRESET_SOURCES: [(&str, &str); 5] = [
    ("A", include_str!("../../../specs/sheet_a.json")),
    ("B", include_str!("../../../specs/sheet_b.json")),
    ("C", include_str!("../../../specs/sheet_c.json")),
    ("D", include_str!("../../../specs/sheet_d.json")),
    ("E", include_str!("../../../specs/sheet_e.json")),
];

/// Names of the bundled reference sheets.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESET_SOURCES.iter().map(|(n, _)| *n)
}

/// Loads a bundled reference sheet by name (`"A"` .. `"E"`, case-insensitive).
pub fn preset(name: &str) -> Option<SheetSpec> {
    PRESET_SOURCES
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, src)| SheetSpec::from_json_str(src).expect("bundled preset is valid"))
}

pub fn presets() -> Vec<SheetSpec> {
    preset_names().filter_map(preset).collect()
}
