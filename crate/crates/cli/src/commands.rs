use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use kiri_core::calibration::{fit_report, loocv, synthesize};
use kiri_core::design::{
    candidates_csv, evaluate_design, sweep_designs, ConstantsSource, DesignBase, DesignGrid,
    GraspRequirement, SweepResult,
};
use kiri_core::force::{link_force, tensile_force};
use kiri_core::measurement_csv::{format_measurements, read_measurements};
use kiri_core::ribbons::deform_with_ribbons;
use kiri_core::shape::{build_shape, csv_string, obj_string, ObjOptions};
use kiri_core::{sheet, ErrorClass, ReferenceTable, SheetSpec, SpringConstants};

use crate::output;
use crate::{Command, Displacements, Format};

#[derive(Debug)]
pub enum CliError {
    Core(kiri_core::Error),
    Usage(String),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(..) => 4,
            CliError::Core(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Numeric => 3,
                ErrorClass::Io => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<kiri_core::Error> for CliError {
    fn from(e: kiri_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load_spec(arg: &str) -> Result<SheetSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(SheetSpec::from_json_file(path)?);
    }
    sheet::preset(arg).ok_or_else(|| {
        CliError::Usage(format!("{arg}: no such file and not a preset name (A-E)"))
    })
}

/// Resolves `--constants`; warns when a reference name differs from the sheet.
fn load_constants(arg: Option<&str>, spec: &SheetSpec) -> Result<SpringConstants> {
    let table = ReferenceTable::bundled();
    let Some(arg) = arg else {
        return table.constants(&spec.name).map_err(|_| {
            CliError::Usage(format!(
                "no reference constants named {:?}; pass --constants",
                spec.name
            ))
        });
    };
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
        let k: SpringConstants = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok(k);
    }
    let k = table.constants(arg)?;
    if !arg.eq_ignore_ascii_case(&spec.name) {
        eprintln!(
            "warning: constants {arg:?} do not belong to sheet {:?}",
            spec.name
        );
    }
    Ok(k)
}

fn displacement_list(d: &Displacements) -> Result<Vec<f64>> {
    if let Some(v) = d.delta_x {
        return Ok(vec![v]);
    }
    let text = d.sweep.as_deref().unwrap_or_default();
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("--sweep expects START:STOP:STEP, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(stop >= start) {
        return Err(bad());
    }
    kiri_core::design::Axis::Range { start, stop, step }
        .values()
        .map_err(Into::into)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.into(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Deform {
            spec,
            displacements,
            format,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let rows = displacement_list(&displacements)?
                .into_iter()
                .map(|d| deform_with_ribbons(&spec, d))
                .collect::<kiri_core::Result<Vec<_>>>()?;
            emit(&output::deform(&spec, &rows, format), out.as_deref())
        }
        Command::Force {
            spec,
            constants,
            displacements,
            format,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let k = load_constants(constants.as_deref(), &spec)?;
            let rows = displacement_list(&displacements)?
                .into_iter()
                .map(|d| {
                    let state = kiri_core::deform(&spec, d)?;
                    Ok((d, tensile_force(&state, &k)?, link_force(&state, &k)?))
                })
                .collect::<kiri_core::Result<Vec<_>>>()?;
            emit(&output::force(&spec, &k, &rows, format), out.as_deref())
        }
        Command::Fit {
            spec,
            csv,
            min_displacement,
            format,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let data = read_measurements(&csv, spec)?;
            let report = fit_report(&data, min_displacement)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            if let Some(path) = &out {
                std::fs::write(path, &json).map_err(|e| CliError::Io(path.clone(), e))?;
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            match format {
                Format::Json => emit(&json, None),
                _ => emit(&output::fit_summary(&report), None),
            }
        }
        Command::Loocv {
            spec,
            csv,
            format,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let data = read_measurements(&csv, spec)?;
            let cv = loocv(&data)?;
            emit(&output::loocv(&cv, format), out.as_deref())
        }
        Command::Mesh {
            spec,
            delta_x,
            out,
            samples,
            strips,
        } => {
            let spec = load_spec(&spec)?;
            let ext = out
                .extension()
                .and_then(|e| e.to_str())
                .map(str::to_ascii_lowercase);
            let model = build_shape(&spec, delta_x, samples)?;
            let text = match ext.as_deref() {
                Some("obj") => obj_string(&model, ObjOptions { ribbon_strips: strips }),
                Some("csv") => csv_string(&model),
                _ => {
                    return Err(CliError::Usage(format!(
                        "{}: output extension must be .obj or .csv",
                        out.display()
                    )))
                }
            };
            emit(&text, Some(&out))?;
            eprintln!(
                "wrote {} vertices, {} ribbons to {}",
                model.vertex_count(),
                model.ribbon_polylines.len(),
                out.display()
            );
            Ok(())
        }
        Command::Design {
            requirement,
            spec,
            constants,
            grid_step,
            format,
            out,
        } => run_design(requirement, spec, constants, grid_step, format, out),
        Command::Synth {
            spec,
            constants,
            displacements,
            out,
        } => {
            let spec = load_spec(&spec)?;
            let k = load_constants(constants.as_deref(), &spec)?;
            let data = synthesize(&spec, &k, &displacement_list(&displacements)?)?;
            emit(&format_measurements(&data), out.as_deref())
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    requirement: GraspRequirement,
    #[serde(default)]
    grid: Option<DesignGrid>,
    #[serde(default)]
    base: Option<DesignBase>,
    #[serde(default)]
    constants: Option<ConstantsSource>,
}

fn constants_source(arg: &str) -> Result<ConstantsSource> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
        let k: SpringConstants = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok(ConstantsSource::Fixed(k));
    }
    Ok(ConstantsSource::Preset(arg.to_string()))
}

fn run_design(
    requirement: PathBuf,
    spec: Option<String>,
    constants: Option<String>,
    grid_step: f64,
    format: Format,
    out: Option<PathBuf>,
) -> Result<()> {
    let text =
        std::fs::read_to_string(&requirement).map_err(|e| CliError::Io(requirement.clone(), e))?;
    let file: DesignFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", requirement.display())))?;
    let source = match (constants.as_deref(), file.constants) {
        (Some(arg), _) => constants_source(arg)?,
        (None, Some(src)) => src,
        (None, None) => {
            return Err(CliError::Usage(
                "no stiffness source: add \"constants\" to the requirement file or pass --constants"
                    .into(),
            ))
        }
    };
    let table = ReferenceTable::bundled();
    let result = match (spec, file.grid, file.base) {
        (Some(spec), _, _) => {
            let spec = load_spec(&spec)?;
            let k = source.resolve(&spec, &table, &sheet::presets())?;
            let c = evaluate_design(&spec, &k, &file.requirement, grid_step)?;
            if c.feasible {
                SweepResult { feasible: vec![c], rejected: vec![] }
            } else {
                SweepResult { feasible: vec![], rejected: vec![c] }
            }
        }
        (None, Some(grid), Some(base)) => {
            sweep_designs(&grid, &base, &source, &table, &file.requirement, grid_step)?
        }
        (None, _, _) => {
            return Err(CliError::Usage(
                "requirement file needs both \"grid\" and \"base\", or pass --spec".into(),
            ))
        }
    };
    let text = match format {
        Format::Csv => candidates_csv(result.all()),
        Format::Json => serde_json::to_string_pretty(&result).expect("serializes") + "\n",
        Format::Text => output::design(&result),
    };
    emit(&text, out.as_deref())
}
