//! Layout of the discrete ribbons across a deformed sheet.
//!
//! Ribbons are strips of width `ribbon_width` packed edge to edge (zero slit
//! kerf) across the slit region `[boundary_margin, lx_init - boundary_margin]`
//! and centred on the middle of the pull axis. Each keeps its normalized
//! station `xi = x / lx` as the boundary deforms, so every ribbon spans a
//! chord of the same relative position on the undeformed and deformed
//! ellipse.

use serde::{Deserialize, Serialize};

use crate::catenary::{self, Catenary};
use crate::error::Result;
use crate::geometry::{chord_of_ellipse, DeformedState};
use crate::sheet::SheetSpec;

/// One slit-bounded ribbon at one deformed state. Lengths in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RibbonCurve {
    /// Centre of the ribbon as a fraction of the pull-axis length, in (0, 1).
    pub station_frac: f64,
    pub rest_length: f64,
    pub dy: f64,
    pub shape: Catenary,
}

impl RibbonCurve {
    pub fn dz(&self) -> f64 {
        self.shape.dz()
    }

    pub fn is_flat(&self) -> bool {
        self.shape.is_flat()
    }

    /// See [`catenary::ribbon_profile`].
    pub fn profile(&self, n_samples: usize) -> Result<Vec<(f64, f64)>> {
        catenary::ribbon_profile(&self.shape, self.dy, n_samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RibbonLayout {
    /// Ordered by station along the pull axis.
    pub ribbons: Vec<RibbonCurve>,
    /// Deepest sag over all ribbons (mm).
    pub lz: f64,
}

impl RibbonLayout {
    /// The ribbon whose station is closest to the middle of the pull axis.
    pub fn center_ribbon(&self) -> Option<&RibbonCurve> {
        self.ribbons.iter().min_by(|a, b| {
            (a.station_frac - 0.5)
                .abs()
                .total_cmp(&(b.station_frac - 0.5).abs())
        })
    }
}

/// Normalized centre stations of every ribbon wide enough to exist.
///
/// Strips whose undeformed chord is shorter than twice the ribbon width are
/// ellipse-tip slivers and are left out.
pub fn ribbon_stations(spec: &SheetSpec) -> Vec<f64> {
    let span = spec.lx_init - 2.0 * spec.boundary_margin;
    let count = ((span / spec.ribbon_width) + 1e-9).floor().max(1.0) as usize;
    let mid = 0.5 * spec.lx_init;
    let offset = 0.5 * (count as f64 - 1.0);
    (0..count)
        .map(|i| (mid + (i as f64 - offset) * spec.ribbon_width) / spec.lx_init)
        .filter(|&xi| xi > 0.0 && xi < 1.0)
        .filter(|&xi| {
            let chord = chord_of_ellipse(spec.lx_init, spec.ly_init, xi * spec.lx_init)
                .unwrap_or(0.0);
            chord >= 2.0 * spec.ribbon_width
        })
        .collect()
}

/// Solves every ribbon for the given state and stores the resulting bowl
/// depth in `state.lz`.
pub fn layout_ribbons(spec: &SheetSpec, state: &mut DeformedState) -> Result<RibbonLayout> {
    let ribbons = ribbon_stations(spec)
        .into_iter()
        .map(|xi| {
            let rest_length = chord_of_ellipse(spec.lx_init, spec.ly_init, xi * spec.lx_init)?;
            let dy = chord_of_ellipse(state.lx, state.ly, xi * state.lx)?;
            Ok(RibbonCurve {
                station_frac: xi,
                rest_length,
                dy,
                shape: catenary::solve_catenary(rest_length, dy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lz = ribbons.iter().map(RibbonCurve::dz).fold(0.0, f64::max);
    state.lz = lz;
    Ok(RibbonLayout { ribbons, lz })
}

/// Deforms the sheet and lays out its ribbons in one call.
pub fn deform_with_ribbons(spec: &SheetSpec, delta_x: f64) -> Result<(DeformedState, RibbonLayout)> {
    let mut state = crate::geometry::deform(spec, delta_x)?;
    let layout = layout_ribbons(spec, &mut state)?;
    Ok((state, layout))
}
