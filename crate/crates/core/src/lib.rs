//! Modeling, calibration and design exploration for buckling kirigami sheets.
//!
//! A sheet's elliptical boundary is idealized as a rhombic four-bar linkage
//! pulled along one axis ([`geometry`]); the slit-separated ribbons inside it
//! buckle into catenaries ([`catenary`], [`ribbons`]); two lumped springs give
//! the actuation force ([`force`]), whose stiffnesses are fitted to measured
//! data ([`calibration`]). [`shape`] turns a deformed state into polylines and
//! [`design`] searches sheet geometries for a grasp requirement.
//!
//! Units: lengths in mm, forces in N, stiffness in N/m.

pub mod calibration;
pub mod catenary;
pub mod design;
pub mod error;
pub mod force;
pub mod geometry;
pub mod measurement_csv;
pub mod reference;
pub mod ribbons;
pub mod shape;
pub mod sheet;

pub use calibration::{
    fit_report, fit_spring_constants, geometry_metrics, loocv, FitReport, MeasurementRow,
    MeasurementSet,
};
pub use catenary::{ribbon_profile, solve_catenary, Catenary};
pub use error::{Error, ErrorClass, Result};
pub use force::{force_curve, link_force, tensile_force, SpringConstants};
pub use geometry::{boundary_chord, deform, link_length, max_displacement, DeformedState};
pub use reference::ReferenceTable;
pub use ribbons::{deform_with_ribbons, layout_ribbons, RibbonCurve, RibbonLayout};
pub use sheet::{Material, SheetSpec};
