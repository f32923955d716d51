//! Boundary kinematics: the sheet boundary idealized as a rhombic four-bar
//! linkage with joint 1 anchored and joint 3 on a slider along the pull axis.
//!
//! Joints 1 and 3 sit at the ends of the pull axis, joints 2 and 4 at the ends
//! of the ribbon axis. All four links share one length, so pulling the slider
//! by `delta_x` lengthens the pull axis and shortens the ribbon axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sheet::SheetSpec;

/// Geometry of a sheet at one actuation displacement. Lengths in mm, angle in
/// radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedState {
    pub delta_x: f64,
    pub lx: f64,
    pub ly: f64,
    pub delta_y: f64,
    /// Angle between the links and the pull axis, `atan(ly / lx)`.
    pub theta: f64,
    /// Maximum bowl depth; zero until a ribbon layout fills it in.
    pub lz: f64,
}

/// Length of each of the four links.
pub fn link_length(spec: &SheetSpec) -> f64 {
    (0.5 * spec.lx_init).hypot(0.5 * spec.ly_init)
}

/// Slider travel at which the ribbon axis closes to zero width.
pub fn max_displacement(spec: &SheetSpec) -> f64 {
    2.0 * link_length(spec) - spec.lx_init
}

/// Deforms the boundary by a slider displacement `delta_x` (mm).
///
/// The ribbon-axis extent is the full width `2 * sqrt(l_link^2 - (lx/2)^2)`,
/// so the undeformed sheet is recovered exactly at `delta_x = 0`.
pub fn deform(spec: &SheetSpec, delta_x: f64) -> Result<DeformedState> {
    spec.validate()?;
    let max = max_displacement(spec);
    if !(delta_x >= 0.0 && delta_x <= max) {
        return Err(Error::DisplacementOutOfRange {
            delta_x,
            max_displacement: max,
        });
    }
    if delta_x == 0.0 {
        return Ok(DeformedState {
            delta_x,
            lx: spec.lx_init,
            ly: spec.ly_init,
            delta_y: 0.0,
            theta: spec.ly_init.atan2(spec.lx_init),
            lz: 0.0,
        });
    }
    let link = link_length(spec);
    let lx = spec.lx_init + delta_x;
    let half_lx = 0.5 * lx;
    // (l - h)(l + h) keeps precision near closure where l ~ h.
    let half_ly_sq = ((link - half_lx) * (link + half_lx)).max(0.0);
    let ly = 2.0 * half_ly_sq.sqrt();
    Ok(DeformedState {
        delta_x,
        lx,
        ly,
        delta_y: spec.ly_init - ly,
        theta: ly.atan2(lx),
        lz: 0.0,
    })
}

/// Chord of the deformed boundary ellipse parallel to the ribbons, at distance
/// `x` (mm) from the anchored joint along the pull axis.
///
/// The ellipse is centred at `(lx/2, 0)`, so the chord vanishes at `x = 0` and
/// `x = lx` and equals `ly` at the centre.
pub fn boundary_chord(state: &DeformedState, x: f64) -> Result<f64> {
    chord_of_ellipse(state.lx, state.ly, x)
}

pub(crate) fn chord_of_ellipse(lx: f64, ly: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0 && x <= lx) {
        return Err(Error::StationOutOfRange { x, lx });
    }
    let half = 0.5 * lx;
    // 1 - u^2 with u = (x - half)/half, written as x (lx - x) / half^2.
    let s = (x * (lx - x)).max(0.0) / (half * half);
    Ok(ly * s.sqrt())
}

impl DeformedState {
    /// Half-diagonal of the rhombus; equals the link length for every state
    /// produced by [`deform`].
    pub fn half_diagonal(&self) -> f64 {
        (0.5 * self.lx).hypot(0.5 * self.ly)
    }
}
