//! Text, CSV and JSON renderings of command results.

use std::fmt::Write as _;

use serde::Serialize;

use kiri_core::calibration::{FitReport, Loocv, Metric};
use kiri_core::design::SweepResult;
use kiri_core::{DeformedState, RibbonLayout, SheetSpec, SpringConstants};

use crate::Format;

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializes") + "\n"
}

pub fn deform(spec: &SheetSpec, rows: &[(DeformedState, RibbonLayout)], format: Format) -> String {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                state: &'a DeformedState,
                ribbons: &'a RibbonLayout,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                sheet: &'a SheetSpec,
                max_displacement: f64,
                rows: Vec<Row<'a>>,
            }
            json(&Out {
                sheet: spec,
                max_displacement: kiri_core::max_displacement(spec),
                rows: rows
                    .iter()
                    .map(|(state, ribbons)| Row { state, ribbons })
                    .collect(),
            })
        }
        Format::Csv => {
            let mut out = String::from("delta_x_mm,lx_mm,ly_mm,lz_mm,theta_rad,delta_y_mm\n");
            for (s, _) in rows {
                let _ = writeln!(
                    out,
                    "{:.6},{:.6},{:.6},{:.6},{:.9},{:.6}",
                    s.delta_x, s.lx, s.ly, s.lz, s.theta, s.delta_y
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "sheet {}  (max displacement {:.4} mm)\n",
                spec.name,
                kiri_core::max_displacement(spec)
            );
            let _ = writeln!(
                out,
                "{:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}",
                "dx [mm]", "lx [mm]", "ly [mm]", "lz [mm]", "theta", "dy [mm]", "ribbons"
            );
            for (s, layout) in rows {
                let _ = writeln!(
                    out,
                    "{:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.6} {:>10.4} {:>8}",
                    s.delta_x,
                    s.lx,
                    s.ly,
                    s.lz,
                    s.theta,
                    s.delta_y,
                    layout.ribbons.len()
                );
            }
            out
        }
    }
}

pub fn force(spec: &SheetSpec, k: &SpringConstants, rows: &[(f64, f64, f64)], format: Format) -> String {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                delta_x_mm: f64,
                force_n: f64,
                link_force_n: f64,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                sheet: &'a str,
                constants: &'a SpringConstants,
                rows: Vec<Row>,
            }
            json(&Out {
                sheet: &spec.name,
                constants: k,
                rows: rows
                    .iter()
                    .map(|&(d, f, l)| Row {
                        delta_x_mm: d,
                        force_n: f,
                        link_force_n: l,
                    })
                    .collect(),
            })
        }
        Format::Csv => {
            let mut out = String::from("delta_x_mm,force_n,link_force_n\n");
            for (d, f, l) in rows {
                let _ = writeln!(out, "{d:.6},{f:.9},{l:.9}");
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "sheet {}  kx = {} N/m  ky = {} N/m\n{:>10} {:>12} {:>14}\n",
                spec.name, k.kx, k.ky, "dx [mm]", "F_t [N]", "link pair [N]"
            );
            for (d, f, l) in rows {
                let _ = writeln!(out, "{d:>10.4} {f:>12.6} {l:>14.6}");
            }
            out
        }
    }
}

fn metric_line(label: &str, unit: &str, m: Option<&Metric>) -> String {
    match m {
        None => format!("{label:<7} -\n"),
        Some(m) => {
            let r2 = m
                .r2
                .map_or_else(|| "undefined (zero variance)".to_string(), |r| format!("{r:.4}"));
            format!("{label:<7} MAE {:.4} {unit}  R^2 {r2}  (n = {})\n", m.mae, m.n)
        }
    }
}

pub fn fit_summary(report: &FitReport) -> String {
    let mut out = format!("sheet {}\n", report.sheet);
    match &report.constants {
        Some(k) => {
            let _ = writeln!(out, "kx = {:.4} N/m", k.kx);
            let _ = writeln!(out, "ky = {:.4} N/m", k.ky);
        }
        None => out.push_str("no force column; stiffness not fitted\n"),
    }
    out.push_str(&metric_line("force", "N", report.force.as_ref()));
    out.push_str(&metric_line("width", "mm", report.width.as_ref()));
    out.push_str(&metric_line("depth", "mm", report.depth.as_ref()));
    if report.min_displacement > 0.0 {
        let _ = writeln!(
            out,
            "geometry metrics use rows with delta_x >= {} mm",
            report.min_displacement
        );
    }
    out
}

pub fn loocv(cv: &Loocv, format: Format) -> String {
    match format {
        Format::Json => json(cv),
        Format::Csv => {
            let mut out = String::from("row_index,delta_x_mm,predicted_n,actual_n,abs_error_n\n");
            for r in &cv.rows {
                let _ = writeln!(
                    out,
                    "{},{:.6},{:.9},{:.9},{:.9}",
                    r.row_index, r.delta_x, r.predicted, r.actual, r.abs_error
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!(
                "{:>5} {:>10} {:>12} {:>12} {:>12}\n",
                "row", "dx [mm]", "pred [N]", "meas [N]", "|err| [N]"
            );
            for r in &cv.rows {
                let _ = writeln!(
                    out,
                    "{:>5} {:>10.4} {:>12.6} {:>12.6} {:>12.6}",
                    r.row_index, r.delta_x, r.predicted, r.actual, r.abs_error
                );
            }
            let _ = writeln!(out, "MAE {:.9} N", cv.mae);
            out
        }
    }
}

pub fn design(result: &SweepResult) -> String {
    let mut out = format!(
        "{} feasible, {} rejected\n",
        result.feasible.len(),
        result.rejected.len()
    );
    for c in result.all() {
        let status = match c.reason {
            None => "ok".to_string(),
            Some(r) => r.code().to_string(),
        };
        let dx = c.delta_x_grasp.map_or("-".into(), |d| format!("{d:.2} mm"));
        let f = c.force_at_grasp.map_or("-".into(), |f| format!("{f:.4} N"));
        let _ = writeln!(out, "{:<32} {:>10} {:>12}  {status}", c.spec.name, dx, f);
    }
    out
}
