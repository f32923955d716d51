//! `kiri`: command-line front end for the kirigami sheet model.
//!
//! Exit codes: 0 success, 2 input or validation error, 3 numeric failure,
//! 4 I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "kiri",
    version,
    about = "Deformation, force, calibration and design tools for buckling kirigami sheets",
    long_about = "Deformation, force, calibration and design tools for buckling kirigami sheets.\n\n\
                  Units: lengths and displacements in mm, forces in N, stiffness in N/m.\n\
                  A SPEC argument is a sheet JSON file or a bundled preset name (A-E)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Displacements: a single value or an inclusive sweep.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Displacements {
    /// Slider displacement along the pull axis, mm.
    #[arg(long = "delta-x", value_name = "MM", allow_negative_numbers = true)]
    delta_x: Option<f64>,
    /// Inclusive sweep START:STOP:STEP, all in mm.
    #[arg(long, value_name = "START:STOP:STEP")]
    sweep: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deformed geometry (lx, ly, lz in mm; theta in rad) per displacement.
    Deform {
        /// Sheet JSON file or preset name.
        spec: String,
        #[command(flatten)]
        displacements: Displacements,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Write output here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predicted tensile force (N) per displacement (mm).
    Force {
        spec: String,
        /// Stiffness source: a reference sheet name (A-E) or a JSON file with
        /// `kx` and `ky` in N/m. Defaults to the spec's own name.
        #[arg(long, value_name = "NAME|PATH")]
        constants: Option<String>,
        #[command(flatten)]
        displacements: Displacements,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit kx, ky (N/m) to measured forces; score measured widths and depths (mm).
    Fit {
        spec: String,
        /// Measurement CSV: delta_x_mm,width_mm,depth_mm,force_n
        csv: PathBuf,
        /// Ignore rows below this displacement (mm) in width/depth metrics.
        #[arg(long, value_name = "MM", default_value_t = 0.0)]
        min_displacement: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-out cross-validation of the force fit (errors in N).
    Loocv {
        spec: String,
        csv: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the deformed shape; `.obj` or `.csv` chosen by the output extension. Coordinates in mm.
    Mesh {
        spec: String,
        /// Slider displacement, mm.
        #[arg(long = "delta-x", value_name = "MM")]
        delta_x: f64,
        /// Output file (.obj or .csv).
        #[arg(long)]
        out: PathBuf,
        /// Samples per ribbon (rounded up to odd).
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// OBJ only: add approximate ribbon-width quad strips.
        #[arg(long)]
        strips: bool,
    },
    /// Search sheet designs for a grasp requirement (widths/depths in mm, force budget in N).
    Design {
        /// Requirement JSON: requirement, and either grid + base or --spec.
        requirement: PathBuf,
        /// Evaluate this single sheet instead of the file's grid.
        #[arg(long)]
        spec: Option<String>,
        /// Stiffness source overriding the file: reference name or kx/ky JSON (N/m).
        #[arg(long, value_name = "NAME|PATH")]
        constants: Option<String>,
        /// Displacement scan step, mm.
        #[arg(long, value_name = "MM", default_value_t = kiri_core::design::DEFAULT_GRID_STEP)]
        grid_step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write model-generated measurements (mm, N) as a measurement CSV.
    Synth {
        spec: String,
        #[arg(long, value_name = "NAME|PATH")]
        constants: Option<String>,
        #[command(flatten)]
        displacements: Displacements,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
