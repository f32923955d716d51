//! Design search: does a sheet open a cavity deep and wide enough for a food
//! item, and at what actuation force?
//!
//! The cavity criterion is an operational stand-in for "can hold the item":
//! the bowl depth `lz` must reach the item depth while the opening width `ly`
//! still admits the item width, at a force within the actuator budget.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::force::{tensile_force, SpringConstants, ANGLE_EPSILON};
use crate::geometry::max_displacement;
use crate::reference::ReferenceTable;
use crate::ribbons::deform_with_ribbons;
use crate::sheet::{Material, SheetSpec};

/// Default displacement grid step, mm.
pub const DEFAULT_GRID_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraspRequirement {
    /// Opening width the item needs along the ribbon axis, mm.
    pub food_width: f64,
    /// Cavity depth the item needs, mm.
    pub food_depth: f64,
    /// Largest tensile force the actuator can supply, N.
    pub force_budget: f64,
}

impl GraspRequirement {
    /// Width and depth may be zero (no requirement); the budget must be
    /// non-negative. All values finite.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("food_width", self.food_width),
            ("food_depth", self.food_depth),
            ("force_budget", self.force_budget),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidRequirement(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// No displacement short of closure reaches the depth.
    DepthUnreachable,
    /// The depth is reached only after the opening is narrower than the item.
    WidthCollapsed,
    /// Depth and width are met, but only above the force budget.
    ForceExceeded,
}

impl Infeasibility {
    pub fn code(&self) -> &'static str {
        match self {
            Infeasibility::DepthUnreachable => "DepthUnreachable",
            Infeasibility::WidthCollapsed => "WidthCollapsed",
            Infeasibility::ForceExceeded => "ForceExceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignCandidate {
    pub spec: SheetSpec,
    pub constants: SpringConstants,
    /// Smallest grid displacement meeting the cavity criteria, mm. For a
    /// `ForceExceeded` design this is where the criteria were met.
    pub delta_x_grasp: Option<f64>,
    pub force_at_grasp: Option<f64>,
    pub feasible: bool,
    pub reason: Option<Infeasibility>,
}

/// Grid displacements `k * step` strictly below closure.
fn displacement_grid(spec: &SheetSpec, step: f64) -> impl Iterator<Item = f64> {
    let max = max_displacement(spec);
    (0..)
        .map(move |k| k as f64 * step)
        .take_while(move |&d| d < max)
}

/// Scans the displacement grid for the first state whose depth, width and
/// force all satisfy `req`.
pub fn evaluate_design(
    spec: &SheetSpec,
    constants: &SpringConstants,
    req: &GraspRequirement,
    grid_step: f64,
) -> Result<DesignCandidate> {
    req.validate()?;
    spec.validate()?;
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::InvalidRequirement(format!(
            "grid step must be > 0, got {grid_step}"
        )));
    }

    let mut deep_enough = false;
    let mut first_geometric: Option<(f64, f64)> = None;
    let mut hit: Option<(f64, f64)> = None;
    for d in displacement_grid(spec, grid_step) {
        let (state, _) = deform_with_ribbons(spec, d)?;
        if state.theta <= ANGLE_EPSILON {
            break;
        }
        if state.lz < req.food_depth {
            continue;
        }
        deep_enough = true;
        if state.ly < req.food_width {
            continue;
        }
        let force = tensile_force(&state, constants)?;
        first_geometric.get_or_insert((d, force));
        if force <= req.force_budget {
            hit = Some((d, force));
            break;
        }
    }

    let (delta_x_grasp, force_at_grasp, reason) = match (hit, first_geometric) {
        (Some((d, f)), _) => (Some(d), Some(f), None),
        (None, Some((d, f))) => (Some(d), Some(f), Some(Infeasibility::ForceExceeded)),
        (None, None) if deep_enough => (None, None, Some(Infeasibility::WidthCollapsed)),
        (None, None) => (None, None, Some(Infeasibility::DepthUnreachable)),
    };
    Ok(DesignCandidate {
        spec: spec.clone(),
        constants: *constants,
        delta_x_grasp,
        force_at_grasp,
        feasible: reason.is_none(),
        reason,
    })
}

// ---------------------------------------------------------------------------
// sweeps

/// Inclusive range `start, start + step, ..` up to `stop`, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            Axis::Values(v) => Ok(v.clone()),
            &Axis::Range { start, stop, step } => {
                if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
                    return Err(Error::InvalidRequirement(format!(
                        "bad range {start}:{stop}:{step}"
                    )));
                }
                let n = ((stop - start) / step + 1e-9).floor();
                if n < 0.0 {
                    return Ok(Vec::new());
                }
                Ok((0..=n as usize).map(|k| start + k as f64 * step).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignGrid {
    pub lx_init: Axis,
    pub ly_init: Axis,
    pub ribbon_width: Axis,
}

/// Everything a grid point does not vary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBase {
    #[serde(default = "default_base_name")]
    pub name: String,
    pub thickness: f64,
    pub material: Material,
    /// Boundary band width; defaults to each grid point's ribbon width.
    #[serde(default)]
    pub boundary_margin: Option<f64>,
}

fn default_base_name() -> String {
    "design".to_string()
}

/// Where stiffness comes from for sheets that were never measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstantsSource {
    /// The same constants for every grid point.
    Fixed(SpringConstants),
    /// A named row of the reference table.
    Preset(String),
    /// Closest reference sheet by material, thickness, ribbon width and
    /// aspect ratio. With `scale_thickness`, both constants are scaled
    /// linearly by the thickness ratio (a heuristic).
    Nearest {
        #[serde(default)]
        scale_thickness: bool,
    },
}

impl ConstantsSource {
    pub fn resolve(
        &self,
        spec: &SheetSpec,
        table: &ReferenceTable,
        reference_sheets: &[SheetSpec],
    ) -> Result<SpringConstants> {
        match self {
            ConstantsSource::Fixed(k) => Ok(*k),
            ConstantsSource::Preset(name) => table.constants(name),
            ConstantsSource::Nearest { scale_thickness } => {
                let mut best: Option<(f64, &str, SpringConstants, f64)> = None;
                for (name, row) in table.iter() {
                    if row.material != spec.material {
                        continue;
                    }
                    let t = row.thickness_mm()?;
                    let w = row.ribbon_width_mm()?;
                    let aspect = reference_sheets
                        .iter()
                        .find(|s| s.name.eq_ignore_ascii_case(name))
                        .map_or(spec.aspect_ratio(), SheetSpec::aspect_ratio);
                    let distance = (spec.thickness / t).ln().abs()
                        + (spec.ribbon_width / w).ln().abs()
                        + (spec.aspect_ratio() / aspect).ln().abs();
                    let better = match &best {
                        None => true,
                        Some((bd, bn, ..)) => match distance.total_cmp(bd) {
                            Ordering::Less => true,
                            Ordering::Equal => name < *bn,
                            Ordering::Greater => false,
                        },
                    };
                    if better {
                        best = Some((distance, name, row.constants(), t));
                    }
                }
                let (_, _, k, t) = best.ok_or_else(|| {
                    Error::UnknownConstants(format!(
                        "no reference sheet of material {}",
                        spec.material
                    ))
                })?;
                if *scale_thickness {
                    let s = spec.thickness / t;
                    Ok(SpringConstants::new(k.kx * s, k.ky * s))
                } else {
                    Ok(k)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Feasible designs, cheapest force first.
    pub feasible: Vec<DesignCandidate>,
    /// Infeasible designs in grid order, with reasons.
    pub rejected: Vec<DesignCandidate>,
}

impl SweepResult {
    pub fn all(&self) -> impl Iterator<Item = &DesignCandidate> {
        self.feasible.iter().chain(&self.rejected)
    }
}

fn grid_key(s: &SheetSpec) -> (f64, f64, f64) {
    (s.lx_init, s.ly_init, s.ribbon_width)
}

fn cmp_key(a: &SheetSpec, b: &SheetSpec) -> Ordering {
    let (ka, kb) = (grid_key(a), grid_key(b));
    ka.0.total_cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
}

/// Grid point specs in lexicographic `(lx_init, ly_init, ribbon_width)` order.
pub fn grid_specs(grid: &DesignGrid, base: &DesignBase) -> Result<Vec<SheetSpec>> {
    let (xs, ys, ws) = (
        grid.lx_init.values()?,
        grid.ly_init.values()?,
        grid.ribbon_width.values()?,
    );
    let mut specs = Vec::with_capacity(xs.len() * ys.len() * ws.len());
    for &lx in &xs {
        for &ly in &ys {
            for &w in &ws {
                let name = format!("{}_lx{lx}_ly{ly}_w{w}", base.name);
                specs.push(SheetSpec::new(
                    name,
                    lx,
                    ly,
                    w,
                    base.boundary_margin,
                    base.thickness,
                    base.material,
                )?);
            }
        }
    }
    specs.sort_by(cmp_key);
    Ok(specs)
}

/// Evaluates every spec and ranks the feasible ones by force, ties broken
/// by `(lx_init, ly_init, ribbon_width)`.
pub fn sweep_specs(
    specs: &[SheetSpec],
    source: &ConstantsSource,
    table: &ReferenceTable,
    req: &GraspRequirement,
    grid_step: f64,
) -> Result<SweepResult> {
    if specs.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let references = crate::sheet::presets();
    let mut feasible = Vec::new();
    let mut rejected = Vec::new();
    for spec in specs {
        let k = source.resolve(spec, table, &references)?;
        let c = evaluate_design(spec, &k, req, grid_step)?;
        if c.feasible {
            feasible.push(c);
        } else {
            rejected.push(c);
        }
    }
    feasible.sort_by(|a, b| {
        let (fa, fb) = (a.force_at_grasp.unwrap(), b.force_at_grasp.unwrap());
        fa.total_cmp(&fb).then_with(|| cmp_key(&a.spec, &b.spec))
    });
    rejected.sort_by(|a, b| cmp_key(&a.spec, &b.spec));
    Ok(SweepResult { feasible, rejected })
}

pub fn sweep_designs(
    grid: &DesignGrid,
    base: &DesignBase,
    source: &ConstantsSource,
    table: &ReferenceTable,
    req: &GraspRequirement,
    grid_step: f64,
) -> Result<SweepResult> {
    sweep_specs(&grid_specs(grid, base)?, source, table, req, grid_step)
}

pub const CSV_HEADER: &str =
    "spec_name,lx_init,ly_init,ribbon_width,delta_x_grasp_mm,force_n,feasible,reason";

/// Results table: feasible designs first (ranked), then the rejected ones.
pub fn candidates_csv<'a>(candidates: impl IntoIterator<Item = &'a DesignCandidate>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>, digits: usize| v.map_or(String::new(), |x| format!("{x:.digits$}"));
    for c in candidates {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.spec.name,
            c.spec.lx_init,
            c.spec.ly_init,
            c.spec.ribbon_width,
            opt(c.delta_x_grasp, 4),
            opt(c.force_at_grasp, 6),
            c.feasible,
            c.reason.map_or("", |r| r.code()),
        ));
    }
    out
}
