//! Actuation force of the two-spring linkage model.
//!
//! A spring across joints 1-3 stands in for bending of the boundary band
//! (`kx`), a spring across joints 2-4 for the reaction of the buckled ribbons
//! (`ky`). Geometry is in mm and stiffness in N/m; the mm to m conversion
//! happens here and nowhere else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{deform, DeformedState};
use crate::sheet::SheetSpec;

/// Link angles at or below this (radians) are treated as a closed linkage.
pub const ANGLE_EPSILON: f64 = 1e-9;

const MM_TO_M: f64 = 1e-3;

/// Lumped stiffness pair, N/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpringConstants {
    pub kx: f64,
    pub ky: f64,
}

impl SpringConstants {
    pub fn new(kx: f64, ky: f64) -> Self {
        SpringConstants { kx, ky }
    }

    pub fn is_physical(&self) -> bool {
        self.kx >= 0.0 && self.ky >= 0.0
    }
}

fn checked_angle(state: &DeformedState) -> Result<f64> {
    if !(state.theta > ANGLE_EPSILON) {
        return Err(Error::DegenerateAngle { theta: state.theta });
    }
    Ok(state.theta)
}

/// The two regressors of the force law in SI units:
/// `(delta_x, delta_y / tan(theta))`, both in m.
pub fn force_regressors(state: &DeformedState) -> Result<(f64, f64)> {
    let theta = checked_angle(state)?;
    Ok((
        state.delta_x * MM_TO_M,
        state.delta_y * MM_TO_M / theta.tan(),
    ))
}

/// Tensile force (N) needed to hold the slider at `state.delta_x`.
pub fn tensile_force(state: &DeformedState, k: &SpringConstants) -> Result<f64> {
    let (rx, ry) = force_regressors(state)?;
    Ok(k.kx * rx + k.ky * ry)
}

/// Sum of the forces in one pair of links transmitting the ribbon reaction,
/// `ky * delta_y / sin(theta)` (N).
pub fn link_force(state: &DeformedState, k: &SpringConstants) -> Result<f64> {
    let theta = checked_angle(state)?;
    Ok(k.ky * state.delta_y * MM_TO_M / theta.sin())
}

/// Predicted `(delta_x, force)` rows for each displacement, in input order.
pub fn force_curve(
    spec: &SheetSpec,
    k: &SpringConstants,
    displacements: &[f64],
) -> Result<Vec<(f64, f64)>> {
    displacements
        .iter()
        .map(|&d| {
            let state = deform(spec, d)?;
            Ok((d, tensile_force(&state, k)?))
        })
        .collect()
}
