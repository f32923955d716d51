//! Stiffness calibration from measured forces, leave-one-out validation and
//! goodness-of-fit metrics.
//!
//! Each measured force gives one linear equation
//! `F = kx * dx + ky * dy / tan(theta)` in the unknown stiffnesses, with the
//! geometry (`dy`, `theta`) taken from the linkage model rather than from
//! measured widths. The overdetermined system is solved by a Givens QR
//! factorization on column-scaled regressors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::force::{force_regressors, tensile_force, SpringConstants};
use crate::geometry::deform;
use crate::ribbons::deform_with_ribbons;
use crate::sheet::SheetSpec;

/// One experimental record. Lengths in mm, force in N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRow {
    pub delta_x: f64,
    pub width: Option<f64>,
    pub depth: Option<f64>,
    pub force: Option<f64>,
}

impl MeasurementRow {
    pub fn force_only(delta_x: f64, force: f64) -> Self {
        MeasurementRow {
            delta_x,
            width: None,
            depth: None,
            force: Some(force),
        }
    }
}

/// Records for one sheet, sorted by strictly increasing displacement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSet {
    pub sheet: SheetSpec,
    rows: Vec<MeasurementRow>,
}

impl MeasurementSet {
    /// Sorts rows by displacement and rejects negative, non-finite or
    /// repeated displacements.
    pub fn new(sheet: SheetSpec, mut rows: Vec<MeasurementRow>) -> Result<Self> {
        for r in &rows {
            if !(r.delta_x.is_finite() && r.delta_x >= 0.0) {
                return Err(Error::InvalidMeasurements(format!(
                    "displacement must be finite and >= 0, got {}",
                    r.delta_x
                )));
            }
            for v in [r.width, r.depth, r.force].into_iter().flatten() {
                if !v.is_finite() {
                    return Err(Error::InvalidMeasurements(format!(
                        "non-finite value at displacement {}",
                        r.delta_x
                    )));
                }
            }
        }
        rows.sort_by(|a, b| a.delta_x.total_cmp(&b.delta_x));
        if let Some(w) = rows.windows(2).find(|w| w[0].delta_x >= w[1].delta_x) {
            return Err(Error::InvalidMeasurements(format!(
                "displacement {} appears more than once",
                w[1].delta_x
            )));
        }
        Ok(MeasurementSet { sheet, rows })
    }

    pub fn rows(&self) -> &[MeasurementRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn force_rows(&self) -> impl Iterator<Item = (usize, &MeasurementRow)> {
        self.rows.iter().enumerate().filter(|(_, r)| r.force.is_some())
    }

    pub fn has_width(&self) -> bool {
        self.rows.iter().any(|r| r.width.is_some())
    }

    pub fn has_depth(&self) -> bool {
        self.rows.iter().any(|r| r.depth.is_some())
    }

    pub fn has_force(&self) -> bool {
        self.rows.iter().any(|r| r.force.is_some())
    }
}

/// Builds model-consistent measurements: widths and depths from the
/// geometry model, forces from `k`. Handy for synthetic studies.
pub fn synthesize(
    spec: &SheetSpec,
    k: &SpringConstants,
    displacements: &[f64],
) -> Result<MeasurementSet> {
    let rows = displacements
        .iter()
        .map(|&d| {
            let (state, _) = deform_with_ribbons(spec, d)?;
            Ok(MeasurementRow {
                delta_x: d,
                width: Some(state.ly),
                depth: Some(state.lz),
                force: Some(tensile_force(&state, k)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(spec.clone(), rows)
}

// ---------------------------------------------------------------------------
// two-column least squares

const RANK_TOL: f64 = 1e-10;

/// Solves `min || X beta - y ||` for a two-column `X` given as rows.
///
/// Columns are scaled to unit norm, then reduced to triangular form with
/// Givens rotations. Fails with [`Error::SingularDesign`] when a column is
/// zero or the two columns are parallel to within `1e-10` (sine of the angle
/// between them).
pub fn least_squares_2(design: &[[f64; 2]], rhs: &[f64]) -> Result<[f64; 2]> {
    assert_eq!(design.len(), rhs.len(), "design and rhs lengths differ");
    if design.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: design.len(),
        });
    }
    let norm = |j: usize| design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
    let scale = [norm(0), norm(1)];
    if !(scale[0] > 0.0 && scale[1] > 0.0) || !scale.iter().all(|s| s.is_finite()) {
        return Err(Error::SingularDesign);
    }

    // upper-triangular R and Q^T y
    let (mut r11, mut r12, mut r22) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut q1, mut q2) = (0.0_f64, 0.0_f64);
    for (row, &y) in design.iter().zip(rhs) {
        let (mut v1, mut v2, mut vy) = (row[0] / scale[0], row[1] / scale[1], y);
        if v1 != 0.0 {
            let rho = r11.hypot(v1);
            let (c, s) = (r11 / rho, v1 / rho);
            r11 = rho;
            (r12, v2) = (c * r12 + s * v2, c * v2 - s * r12);
            (q1, vy) = (c * q1 + s * vy, c * vy - s * q1);
            v1 = 0.0;
        }
        debug_assert_eq!(v1, 0.0);
        if v2 != 0.0 {
            let rho = r22.hypot(v2);
            let (c, s) = (r22 / rho, v2 / rho);
            r22 = rho;
            q2 = c * q2 + s * vy;
        }
    }
    if !(r22 > RANK_TOL * r11) {
        return Err(Error::SingularDesign);
    }
    let b2 = q2 / r22;
    let b1 = (q1 - r12 * b2) / r11;
    Ok([b1 / scale[0], b2 / scale[1]])
}

// ---------------------------------------------------------------------------
// fitting

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceResidual {
    pub delta_x: f64,
    pub measured: f64,
    pub predicted: f64,
    /// `measured - predicted`, N.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpringFit {
    pub constants: SpringConstants,
    pub residuals: Vec<ForceResidual>,
    /// Set when a fitted constant came out negative. The value is kept.
    pub negative_constant: bool,
}

fn regression_rows(data: &MeasurementSet) -> Result<Vec<(f64, [f64; 2], f64)>> {
    data.force_rows()
        .map(|(_, r)| {
            let state = deform(&data.sheet, r.delta_x)?;
            let (a, b) = force_regressors(&state)?;
            Ok((r.delta_x, [a, b], r.force.expect("force row")))
        })
        .collect()
}

fn solve_rows(rows: &[(f64, [f64; 2], f64)]) -> Result<SpringConstants> {
    let design: Vec<[f64; 2]> = rows.iter().map(|r| r.1).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let [kx, ky] = least_squares_2(&design, &rhs)?;
    Ok(SpringConstants::new(kx, ky))
}

fn predict(k: &SpringConstants, x: &[f64; 2]) -> f64 {
    k.kx * x[0] + k.ky * x[1]
}

/// Least-squares stiffness pair for one sheet's force measurements.
pub fn fit_spring_constants(data: &MeasurementSet) -> Result<SpringFit> {
    let rows = regression_rows(data)?;
    if rows.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: rows.len(),
        });
    }
    let constants = solve_rows(&rows)?;
    let residuals = rows
        .iter()
        .map(|(d, x, f)| {
            let predicted = predict(&constants, x);
            ForceResidual {
                delta_x: *d,
                measured: *f,
                predicted,
                residual: f - predicted,
            }
        })
        .collect();
    Ok(SpringFit {
        constants,
        residuals,
        negative_constant: !constants.is_physical(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoocvRow {
    /// Index into [`MeasurementSet::rows`].
    pub row_index: usize,
    pub delta_x: f64,
    pub predicted: f64,
    pub actual: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loocv {
    pub rows: Vec<LoocvRow>,
    /// Mean absolute held-out error, N.
    pub mae: f64,
}

/// Leave-one-out cross-validation of the force fit: each force row is
/// predicted from constants fitted on all the others.
pub fn loocv(data: &MeasurementSet) -> Result<Loocv> {
    let indices: Vec<usize> = data.force_rows().map(|(i, _)| i).collect();
    let rows = regression_rows(data)?;
    if rows.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: rows.len(),
        });
    }
    let mut out = Vec::with_capacity(rows.len());
    let mut train = Vec::with_capacity(rows.len() - 1);
    for (held, &(d, x, f)) in rows.iter().enumerate() {
        train.clear();
        train.extend(
            rows.iter()
                .enumerate()
                .filter(|&(i, _)| i != held)
                .map(|(_, r)| *r),
        );
        let k = solve_rows(&train)?;
        let predicted = predict(&k, &x);
        out.push(LoocvRow {
            row_index: indices[held],
            delta_x: d,
            predicted,
            actual: f,
            abs_error: (f - predicted).abs(),
        });
    }
    let mae = out.iter().map(|r| r.abs_error).sum::<f64>() / out.len() as f64;
    Ok(Loocv { rows: out, mae })
}

// ---------------------------------------------------------------------------
// metrics

/// Mean absolute error and coefficient of determination of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub n: usize,
    pub mae: f64,
    /// `1 - SS_res / SS_tot`; `None` when the measurements have zero
    /// variance and the ratio is undefined.
    pub r2: Option<f64>,
}

impl Metric {
    /// Metric over `(measured, predicted)` pairs; `None` when empty.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Option<Metric> {
        if pairs.is_empty() {
            return None;
        }
        let n = pairs.len() as f64;
        let mae = pairs.iter().map(|(m, p)| (m - p).abs()).sum::<f64>() / n;
        let mean = pairs.iter().map(|(m, _)| m).sum::<f64>() / n;
        let ss_tot: f64 = pairs.iter().map(|(m, _)| (m - mean).powi(2)).sum();
        let ss_res: f64 = pairs.iter().map(|(m, p)| (m - p).powi(2)).sum();
        let r2 = (ss_tot > 0.0).then(|| 1.0 - ss_res / ss_tot);
        Some(Metric {
            n: pairs.len(),
            mae,
            r2,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryMetrics {
    pub width: Option<Metric>,
    pub depth: Option<Metric>,
}

/// Displacement below which rows were left out of the reported width error.
pub const PUBLISHED_MIN_DISPLACEMENT: f64 = 5.0;

/// Compares measured widths and depths with the model, over rows with
/// `delta_x >= min_displacement`. No fitting is involved.
pub fn geometry_metrics(data: &MeasurementSet, min_displacement: f64) -> Result<GeometryMetrics> {
    if !data.has_width() && !data.has_depth() {
        return Err(Error::MissingColumn("width_mm or depth_mm"));
    }
    let mut width = Vec::new();
    let mut depth = Vec::new();
    for r in data.rows() {
        if r.delta_x < min_displacement || (r.width.is_none() && r.depth.is_none()) {
            continue;
        }
        let (state, _) = deform_with_ribbons(&data.sheet, r.delta_x)?;
        if let Some(w) = r.width {
            width.push((w, state.ly));
        }
        if let Some(d) = r.depth {
            depth.push((d, state.lz));
        }
    }
    Ok(GeometryMetrics {
        width: Metric::from_pairs(&width),
        depth: Metric::from_pairs(&depth),
    })
}

/// Everything `fit` reports for one sheet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub sheet: String,
    pub constants: Option<SpringConstants>,
    pub residuals: Vec<ForceResidual>,
    pub force: Option<Metric>,
    pub width: Option<Metric>,
    pub depth: Option<Metric>,
    pub min_displacement: f64,
    pub warnings: Vec<String>,
}

/// Fits forces when a force column is present and scores geometry when
/// width or depth columns are present.
pub fn fit_report(data: &MeasurementSet, min_displacement: f64) -> Result<FitReport> {
    let mut report = FitReport {
        sheet: data.sheet.name.clone(),
        constants: None,
        residuals: Vec::new(),
        force: None,
        width: None,
        depth: None,
        min_displacement,
        warnings: Vec::new(),
    };
    if !data.has_force() && !data.has_width() && !data.has_depth() {
        return Err(Error::MissingColumn("force_n, width_mm or depth_mm"));
    }
    if data.has_force() {
        let fit = fit_spring_constants(data)?;
        if fit.negative_constant {
            report.warnings.push(format!(
                "fitted constants are not both non-negative (kx = {}, ky = {})",
                fit.constants.kx, fit.constants.ky
            ));
        }
        let pairs: Vec<(f64, f64)> = fit.residuals.iter().map(|r| (r.measured, r.predicted)).collect();
        report.force = Metric::from_pairs(&pairs);
        report.constants = Some(fit.constants);
        report.residuals = fit.residuals;
    }
    if data.has_width() || data.has_depth() {
        let g = geometry_metrics(data, min_displacement)?;
        report.width = g.width;
        report.depth = g.depth;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheet::preset;

    const E: SpringConstants = SpringConstants { kx: 171.78, ky: 9.25 };
    const SWEEP: [f64; 5] = [2.5, 5.0, 7.5, 10.0, 12.5];

    /// Weighted normal equations solved by Cramer's rule.
    fn normal_equations(design: &[[f64; 2]], rhs: &[f64], weights: &[f64]) -> [f64; 2] {
        let (mut a, mut b, mut c, mut u, mut v) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((x, y), w) in design.iter().zip(rhs).zip(weights) {
            a += w * x[0] * x[0];
            b += w * x[0] * x[1];
            c += w * x[1] * x[1];
            u += w * x[0] * y;
            v += w * x[1] * y;
        }
        let det = a * c - b * b;
        [(u * c - b * v) / det, (a * v - b * u) / det]
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn recovers_generating_constants() {
        let data = synthesize(&preset("E").unwrap(), &E, &SWEEP).unwrap();
        let fit = fit_spring_constants(&data).unwrap();
        assert!(rel(fit.constants.kx, E.kx) < 1e-6);
        assert!(rel(fit.constants.ky, E.ky) < 1e-6);
        assert!(!fit.negative_constant);
        assert!(fit.residuals.iter().all(|r| r.residual.abs() < 1e-12));
    }

    #[test]
    fn zero_column_is_singular() {
        let design = [[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert!(matches!(
            least_squares_2(&design, &[1.0, 2.0, 3.0]),
            Err(Error::SingularDesign)
        ));
        let parallel = [[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        assert!(matches!(
            least_squares_2(&parallel, &[1.0, 2.0, 3.0]),
            Err(Error::SingularDesign)
        ));
    }

    #[test]
    fn duplicated_row_matches_weighted_oracle() {
        let design = [[1.0, 0.3], [2.0, 1.1], [3.0, 2.9], [4.0, 4.2]];
        let rhs = [1.2, 2.1, 3.7, 5.5];
        let mut dup_design = design.to_vec();
        dup_design.push(design[2]);
        let mut dup_rhs = rhs.to_vec();
        dup_rhs.push(rhs[2]);
        let got = least_squares_2(&dup_design, &dup_rhs).unwrap();
        let want = normal_equations(&design, &rhs, &[1.0, 1.0, 2.0, 1.0]);
        assert!(rel(got[0], want[0]) < 1e-10);
        assert!(rel(got[1], want[1]) < 1e-10);
    }

    #[test]
    fn negative_constants_are_flagged_not_clamped() {
        let spec = preset("E").unwrap();
        let k = SpringConstants::new(200.0, -5.0);
        let data = synthesize(&spec, &k, &SWEEP).unwrap();
        let fit = fit_spring_constants(&data).unwrap();
        assert!(fit.negative_constant);
        assert!(rel(fit.constants.ky, -5.0) < 1e-6);
        let report = fit_report(&data, 0.0).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn insufficient_rows() {
        let spec = preset("E").unwrap();
        let one = MeasurementSet::new(spec.clone(), vec![MeasurementRow::force_only(5.0, 1.0)]).unwrap();
        assert!(matches!(
            fit_spring_constants(&one),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        ));
        let two = synthesize(&spec, &E, &[5.0, 10.0]).unwrap();
        assert!(fit_spring_constants(&two).is_ok());
        assert!(matches!(
            loocv(&two),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn loocv_minimal_and_noiseless() {
        let spec = preset("E").unwrap();
        let three = synthesize(&spec, &E, &[2.5, 7.5, 12.5]).unwrap();
        let cv = loocv(&three).unwrap();
        assert_eq!(cv.rows.len(), 3);
        assert!(cv.mae <= 1e-9);
        let five = synthesize(&spec, &E, &SWEEP).unwrap();
        assert!(loocv(&five).unwrap().mae <= 1e-9);
    }

    #[test]
    fn rows_are_sorted_and_unique() {
        let spec = preset("E").unwrap();
        let set = MeasurementSet::new(
            spec.clone(),
            vec![
                MeasurementRow::force_only(5.0, 1.0),
                MeasurementRow::force_only(2.5, 0.5),
            ],
        )
        .unwrap();
        assert_eq!(set.rows()[0].delta_x, 2.5);
        assert!(MeasurementSet::new(
            spec.clone(),
            vec![
                MeasurementRow::force_only(5.0, 1.0),
                MeasurementRow::force_only(5.0, 0.5),
            ],
        )
        .is_err());
        assert!(MeasurementSet::new(spec, vec![MeasurementRow::force_only(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn self_consistent_geometry() {
        let spec = preset("E").unwrap();
        let data = synthesize(&spec, &E, &SWEEP).unwrap();
        let g = geometry_metrics(&data, 0.0).unwrap();
        let w = g.width.unwrap();
        let d = g.depth.unwrap();
        assert_eq!(w.mae, 0.0);
        assert_eq!(w.r2, Some(1.0));
        assert_eq!(d.mae, 0.0);
        assert_eq!(d.r2, Some(1.0));
        let filtered = geometry_metrics(&data, PUBLISHED_MIN_DISPLACEMENT).unwrap();
        assert_eq!(filtered.width.unwrap().n, 4);
    }

    #[test]
    fn constant_column_has_no_r2() {
        let m = Metric::from_pairs(&[(3.0, 2.0), (3.0, 4.0), (3.0, 3.5)]).unwrap();
        assert_eq!(m.r2, None);
        assert!((m.mae - (1.0 + 1.0 + 0.5) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn width_only_dataset() {
        let spec = preset("E").unwrap();
        let rows = SWEEP
            .iter()
            .map(|&d| MeasurementRow {
                delta_x: d,
                width: Some(deform(&spec, d).unwrap().ly + 0.1),
                depth: None,
                force: None,
            })
            .collect();
        let data = MeasurementSet::new(spec, rows).unwrap();
        let g = geometry_metrics(&data, 0.0).unwrap();
        assert!(g.depth.is_none());
        assert!((g.width.unwrap().mae - 0.1).abs() < 1e-12);
        let report = fit_report(&data, 0.0).unwrap();
        assert!(report.constants.is_none());
        assert!(report.width.is_some());
        assert!(report.depth.is_none());
    }

    #[test]
    fn force_only_geometry_is_missing() {
        let spec = preset("E").unwrap();
        let data = MeasurementSet::new(spec, vec![MeasurementRow::force_only(5.0, 1.0)]).unwrap();
        assert!(matches!(
            geometry_metrics(&data, 0.0),
            Err(Error::MissingColumn(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn design_strategy() -> impl Strategy<Value = (Vec<[f64; 2]>, Vec<f64>)> {
            (3usize..20).prop_flat_map(|n| {
                (
                    proptest::collection::vec((0.1f64..10.0, 0.1f64..10.0), n),
                    proptest::collection::vec(-10.0f64..10.0, n),
                )
                    .prop_map(|(x, y)| (x.into_iter().map(|(a, b)| [a, b]).collect(), y))
            })
        }

        proptest! {
            #[test]
            fn matches_normal_equations((design, rhs) in design_strategy()) {
                let ones = vec![1.0; rhs.len()];
                let oracle = normal_equations(&design, &rhs, &ones);
                // only compare on well-conditioned draws
                let norm = |j: usize| design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
                let dot: f64 = design.iter().map(|r| r[0] * r[1]).sum();
                let cos = dot / (norm(0) * norm(1));
                prop_assume!(cos < 0.999);
                let got = least_squares_2(&design, &rhs).unwrap();
                for j in 0..2 {
                    let tol = 1e-8 * oracle[j].abs().max(1e-8 * (oracle[0].abs() + oracle[1].abs()));
                    prop_assert!((got[j] - oracle[j]).abs() <= tol, "{:?} vs {:?}", got, oracle);
                }
            }

            #[test]
            fn scaling_covariance((design, rhs) in design_strategy()) {
                let Ok(base) = least_squares_2(&design, &rhs) else { return Ok(()); };
                let doubled: Vec<f64> = rhs.iter().map(|y| 2.0 * y).collect();
                let twice = least_squares_2(&design, &doubled).unwrap();
                prop_assert_eq!(twice, [2.0 * base[0], 2.0 * base[1]]);
                let tripled: Vec<f64> = rhs.iter().map(|y| 3.0 * y).collect();
                let thrice = least_squares_2(&design, &tripled).unwrap();
                for j in 0..2 {
                    prop_assert!((thrice[j] - 3.0 * base[j]).abs() <= 1e-12 * (base[0].abs() + base[1].abs()) * 3.0);
                }
            }
        }
    }
}
