//! Full deformed shape as polylines: the boundary ellipse in the `z = 0`
//! plane plus one sagging catenary per ribbon, and writers for OBJ and CSV.
//!
//! Coordinates are mm with the anchored joint at the origin, `x` along the
//! pull axis, `y` along the ribbons and `z` negative below the boundary plane.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ribbons::deform_with_ribbons;
use crate::sheet::SheetSpec;

pub type Point3 = [f64; 3];

/// Uniform samples on the boundary loop, before ribbon endpoints are merged in.
pub const BOUNDARY_SAMPLES: usize = 96;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeModel {
    pub name: String,
    pub delta_x: f64,
    pub ribbon_width: f64,
    /// Closed loop, counter-clockwise from the anchored joint. Includes every
    /// ribbon endpoint exactly.
    pub boundary_points: Vec<Point3>,
    /// One polyline per ribbon in station order, from `-y` to `+y`.
    pub ribbon_polylines: Vec<Vec<Point3>>,
    /// `(lx, ly, lz)`.
    pub bounding_box: Point3,
}

/// Builds the shape of `spec` at displacement `delta_x`.
///
/// `samples_per_ribbon` is rounded up to an odd count so that every buckled
/// ribbon has a vertex at its lowest point.
pub fn build_shape(spec: &SheetSpec, delta_x: f64, samples_per_ribbon: usize) -> Result<ShapeModel> {
    if samples_per_ribbon < 3 {
        return Err(Error::InvalidSpec(format!(
            "samples per ribbon must be >= 3, got {samples_per_ribbon}"
        )));
    }
    let n = samples_per_ribbon | 1;
    let (state, layout) = deform_with_ribbons(spec, delta_x)?;
    let (lx, ly) = (state.lx, state.ly);

    // (parameter, point) on x = lx/2 (1 - cos t), y = ly/2 sin t
    let mut loop_pts: Vec<(f64, Point3)> = (0..BOUNDARY_SAMPLES)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64;
            (t, [0.5 * lx * (1.0 - t.cos()), 0.5 * ly * t.sin(), 0.0])
        })
        .collect();
    let mut endpoints = Vec::new();

    let mut ribbon_polylines = Vec::with_capacity(layout.ribbons.len());
    for r in &layout.ribbons {
        let x = r.station_frac * lx;
        let profile = if r.is_flat() {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| (-0.5 * r.dy + r.dy * i as f64 / last, 0.0))
                .collect()
        } else {
            r.profile(n)?
        };
        let mut line: Vec<Point3> = profile.into_iter().map(|(y, z)| [x, y, z]).collect();
        // pin both ends to the same coordinates the boundary loop will use
        let half = 0.5 * r.dy;
        line[0] = [x, -half, 0.0];
        line[n - 1] = [x, half, 0.0];
        let t = (1.0 - 2.0 * r.station_frac).clamp(-1.0, 1.0).acos();
        endpoints.push((t, line[n - 1]));
        endpoints.push((2.0 * PI - t, line[0]));
        ribbon_polylines.push(line);
    }

    const SAME: f64 = 1e-9;
    loop_pts.retain(|(t, _)| endpoints.iter().all(|(te, _)| (t - te).abs() > SAME));
    loop_pts.extend(endpoints);
    loop_pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    loop_pts.dedup_by(|a, b| (a.0 - b.0).abs() <= SAME && a.1 == b.1);

    Ok(ShapeModel {
        name: spec.name.clone(),
        delta_x,
        ribbon_width: spec.ribbon_width,
        boundary_points: loop_pts.into_iter().map(|(_, p)| p).collect(),
        ribbon_polylines,
        bounding_box: [lx, ly, layout.lz],
    })
}

impl ShapeModel {
    pub fn vertex_count(&self) -> usize {
        self.boundary_points.len() + self.ribbon_polylines.iter().map(Vec::len).sum::<usize>()
    }

    /// All vertices in export order: boundary loop, then ribbons by station.
    pub fn vertices(&self) -> impl Iterator<Item = &Point3> {
        self.boundary_points
            .iter()
            .chain(self.ribbon_polylines.iter().flatten())
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ObjOptions {
    /// Also emit each ribbon as a quad strip of its width, extruded along the
    /// pull axis. Visual aid only: the strip edges do not follow the boundary.
    pub ribbon_strips: bool,
}

/// Wavefront OBJ text: `v` records then `l` polylines (the boundary loop is
/// closed back to its first vertex). Vertex order matches
/// [`ShapeModel::vertices`].
pub fn obj_string(model: &ShapeModel, options: ObjOptions) -> String {
    let mut out = String::new();
    let [lx, ly, lz] = model.bounding_box;
    let _ = writeln!(out, "# kirigami sheet {}", model.name);
    let _ = writeln!(out, "# delta_x {} mm", num(model.delta_x));
    let _ = writeln!(out, "# bounding box {} {} {} mm", num(lx), num(ly), num(lz));
    let _ = writeln!(out, "o {}", model.name.replace(char::is_whitespace, "_"));
    for p in model.vertices() {
        let _ = writeln!(out, "v {} {} {}", num(p[0]), num(p[1]), num(p[2]));
    }
    let nb = model.boundary_points.len();
    if nb > 0 {
        out.push('l');
        for i in 1..=nb {
            let _ = write!(out, " {i}");
        }
        let _ = writeln!(out, " 1");
    }
    let mut next = nb + 1;
    for line in &model.ribbon_polylines {
        out.push('l');
        for i in next..next + line.len() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
        next += line.len();
    }

    if options.ribbon_strips && !model.ribbon_polylines.is_empty() {
        let half = 0.5 * model.ribbon_width;
        let _ = writeln!(out, "# ribbon strips (approximate)");
        let _ = writeln!(out, "g ribbon_strips");
        let base = next;
        for line in &model.ribbon_polylines {
            for p in line {
                let _ = writeln!(out, "v {} {} {}", num(p[0] - half), num(p[1]), num(p[2]));
                let _ = writeln!(out, "v {} {} {}", num(p[0] + half), num(p[1]), num(p[2]));
            }
        }
        let mut first = base;
        for line in &model.ribbon_polylines {
            for i in 0..line.len() - 1 {
                let a = first + 2 * i;
                let _ = writeln!(out, "f {} {} {} {}", a, a + 1, a + 3, a + 2);
            }
            first += 2 * line.len();
        }
    }
    out
}

/// Point cloud CSV, header `x_mm,y_mm,z_mm,element_id`. Element 0 is the
/// boundary loop, ribbons are numbered from 1 in station order.
pub fn csv_string(model: &ShapeModel) -> String {
    let mut out = String::from("x_mm,y_mm,z_mm,element_id\n");
    let elements = std::iter::once(&model.boundary_points).chain(model.ribbon_polylines.iter());
    for (id, points) in elements.enumerate() {
        for p in points {
            let _ = writeln!(out, "{},{},{},{id}", num(p[0]), num(p[1]), num(p[2]));
        }
    }
    out
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn export_obj(model: &ShapeModel, path: impl AsRef<Path>, options: ObjOptions) -> Result<()> {
    write_file(path.as_ref(), &obj_string(model, options))
}

pub fn export_csv_pointcloud(model: &ShapeModel, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &csv_string(model))
}
