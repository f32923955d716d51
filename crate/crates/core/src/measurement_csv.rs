//! Measurement CSV: header `delta_x_mm,width_mm,depth_mm,force_n`, UTF-8, LF
//! line endings, `.` decimals, empty cells for missing values.

use std::fmt::Write as _;
use std::path::Path;

use crate::calibration::{MeasurementRow, MeasurementSet};
use crate::error::{Error, Result};
use crate::sheet::SheetSpec;

pub const HEADER: [&str; 4] = ["delta_x_mm", "width_mm", "depth_mm", "force_n"];

fn schema(source: &str, line: u64, column: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        path: source.to_string(),
        line,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Parses measurement CSV text. `source` names the input in error messages.
pub fn parse_measurements(text: &str, sheet: SheetSpec, source: &str) -> Result<MeasurementSet> {
    if let Some(pos) = text.find('\r') {
        let line = text[..pos].matches('\n').count() as u64 + 1;
        return Err(schema(source, line, "-", "CR found; line endings must be LF"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(schema(source, 1, "-", "empty file; expected header")),
        Some(r) => r.map_err(|e| schema(source, 1, "-", e.to_string()))?,
    };
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(schema(
            source,
            1,
            "-",
            format!("header must be exactly `{}`", HEADER.join(",")),
        ));
    }

    let mut rows = Vec::new();
    let mut lines: Vec<u64> = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            schema(source, line, "-", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != HEADER.len() {
            return Err(schema(
                source,
                line,
                "-",
                format!("expected {} fields, found {}", HEADER.len(), record.len()),
            ));
        }
        let mut values = [None; 4];
        for (j, (cell, name)) in record.iter().zip(HEADER).enumerate() {
            if cell.is_empty() {
                continue;
            }
            let v: f64 = cell
                .parse()
                .map_err(|_| schema(source, line, name, format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(schema(source, line, name, format!("not finite: {cell:?}")));
            }
            values[j] = Some(v);
        }
        let delta_x =
            values[0].ok_or_else(|| schema(source, line, HEADER[0], "value is required"))?;
        if delta_x < 0.0 {
            return Err(schema(source, line, HEADER[0], "must be >= 0"));
        }
        if let Some(k) = rows.iter().position(|r: &MeasurementRow| r.delta_x == delta_x) {
            return Err(schema(
                source,
                line,
                HEADER[0],
                format!("displacement repeats line {}", lines[k]),
            ));
        }
        lines.push(line);
        rows.push(MeasurementRow {
            delta_x,
            width: values[1],
            depth: values[2],
            force: values[3],
        });
    }
    MeasurementSet::new(sheet, rows)
}

pub fn read_measurements(path: impl AsRef<Path>, sheet: SheetSpec) -> Result<MeasurementSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let text = String::from_utf8(bytes).map_err(|e| {
        let bad = e.utf8_error().valid_up_to();
        let line = e.as_bytes()[..bad].iter().filter(|&&b| b == b'\n').count() as u64 + 1;
        schema(&source, line, "-", "invalid UTF-8")
    })?;
    parse_measurements(&text, sheet, &source)
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn format_measurements(data: &MeasurementSet) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for r in data.rows() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.delta_x,
            cell(r.width),
            cell(r.depth),
            cell(r.force)
        );
    }
    out
}

pub fn write_measurements(data: &MeasurementSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_measurements(data)).map_err(|e| Error::io(path, e))
}
