//! Acceptance checks. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p kiri-cli --test acceptance -- --nocapture` to see them.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kiri_core::calibration::{synthesize, MeasurementRow, MeasurementSet};
use kiri_core::catenary::{arc_length, sag_from_length, sag_from_span};
use kiri_core::design::{evaluate_design, sweep_specs, ConstantsSource, GraspRequirement};
use kiri_core::shape::{build_shape, csv_string, obj_string, ObjOptions};
use kiri_core::sheet::{preset, Material};
use kiri_core::{
    deform, fit_spring_constants, link_length, loocv, max_displacement, solve_catenary,
    tensile_force, ReferenceTable, SheetSpec, SpringConstants,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const TABLE_E: SpringConstants = SpringConstants { kx: 171.78, ky: 9.25 };
const SWEEP: [f64; 5] = [2.5, 5.0, 7.5, 10.0, 12.5];

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_sheet(rng: &mut ChaCha8Rng) -> SheetSpec {
    let lx = rng.gen_range(5.0..80.0);
    let ly = rng.gen_range(5.0..80.0);
    SheetSpec::new("r", lx, ly, 1.0, Some(0.0), 0.25, Material::Pet).unwrap()
}

/// 1. link-length conservation, exact rest width, strict width decrease; < 1 s.
fn geometry_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut pairs = 0;
    let mut ok = true;
    for _ in 0..1000 {
        let spec = random_sheet(&mut rng);
        let m = max_displacement(&spec);
        let link = link_length(&spec);
        let rest = deform(&spec, 0.0).unwrap();
        ok &= rest.ly == spec.ly_init;
        let mut ds: Vec<f64> = (0..10).map(|_| rng.gen_range(0.0..=m)).collect();
        ds.sort_by(f64::total_cmp);
        let mut prev = f64::INFINITY;
        let mut prev_d = -1.0;
        for d in ds {
            let s = deform(&spec, d).unwrap();
            worst = worst.max((s.half_diagonal() - link).abs() / link);
            if d > prev_d {
                ok &= s.ly < prev;
            }
            prev = s.ly;
            prev_d = d;
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        ok && worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("1000 sheets, {pairs} states, max rel link error {worst:.2e}, {elapsed:.2?}"),
    )
}

/// 2. root residual, sag identity, integrated arc length; < 2 s.
fn catenary_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let (mut root, mut sag, mut arc) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let l = rng.gen_range(1.0..60.0);
        let dy = l * rng.gen_range(1e-3..1.0 - 1e-6);
        let c = solve_catenary(l, dy).unwrap();
        let a = c.a().unwrap();
        root = root.max((arc_length(a, dy) - l).abs() / l);
        // the two sag formulations
        sag = sag.max((sag_from_span(a, dy) - c.dz()).abs() / c.dz());
        debug_assert_eq!(sag_from_length(a, l), c.dz());
        // arc length of the sampled profile, polyline + Richardson
        let poly = |n: usize| -> f64 {
            let p = kiri_core::ribbon_profile(&c, dy, n).unwrap();
            p.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum()
        };
        let integrated = (4.0 * poly(2001) - poly(1001)) / 3.0;
        arc = arc.max((integrated - l).abs() / l);
    }
    let elapsed = start.elapsed();
    check(
        root <= 1e-10 && sag <= 1e-9 && arc <= 1e-6 && elapsed < Duration::from_secs(2),
        format!("root {root:.2e}, sag {sag:.2e}, arc {arc:.2e}, {elapsed:.2?}"),
    )
}

/// 3. noiseless refit of sheet-E constants; LOOCV MAE <= 1e-9 N.
fn fit_recovery() -> Outcome {
    let data = synthesize(&preset("E").unwrap(), &TABLE_E, &SWEEP).unwrap();
    let k = fit_spring_constants(&data).unwrap().constants;
    let ekx = (k.kx - TABLE_E.kx).abs() / TABLE_E.kx;
    let eky = (k.ky - TABLE_E.ky).abs() / TABLE_E.ky;
    let mae = loocv(&data).unwrap().mae;
    check(
        ekx <= 1e-6 && eky <= 1e-6 && mae <= 1e-9,
        format!("kx rel {ekx:.2e}, ky rel {eky:.2e}, LOOCV MAE {mae:.2e} N"),
    )
}

/// 4. Monte-Carlo LOOCV MAE under Gaussian force noise.
fn noise_robustness() -> Outcome {
    let spec = preset("E").unwrap();
    let sigma = 0.05;
    let displacements: Vec<f64> = (1..=26).map(|i| 0.5 * i as f64).collect();
    let clean = synthesize(&spec, &TABLE_E, &displacements).unwrap();
    let noise = Normal::new(0.0, sigma).unwrap();
    let seeds = 200;
    let mut ratios = Vec::with_capacity(seeds);
    for seed in 0..seeds as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let rows = clean
            .rows()
            .iter()
            .map(|r| MeasurementRow::force_only(r.delta_x, r.force.unwrap() + noise.sample(&mut rng)))
            .collect();
        let set = MeasurementSet::new(spec.clone(), rows).unwrap();
        ratios.push(loocv(&set).unwrap().mae / sigma);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let inside = ratios.iter().filter(|r| (0.5..=3.0).contains(*r)).count();
    check(
        (0.5..=3.0).contains(&mean),
        format!(
            "{seeds} seeds, {} rows, mean MAE {mean:.3} sigma ({inside}/{seeds} seeds individually in band)",
            displacements.len()
        ),
    )
}

/// 5. sheet-E force curve strictly increasing and convex.
fn forward_curve_shape() -> Outcome {
    let spec = preset("E").unwrap();
    let force = |d: f64| tensile_force(&deform(&spec, d).unwrap(), &TABLE_E).unwrap();
    let coarse: Vec<f64> = (0..=5).map(|i| force(2.5 * i as f64)).collect();
    let dense: Vec<f64> = (0..=125).map(|i| force(0.1 * i as f64)).collect();
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let min_second = |v: &[f64]| {
        v.windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min)
    };
    let (c2, d2) = (min_second(&coarse), min_second(&dense));
    check(
        increasing(&coarse) && increasing(&dense) && c2 >= 0.0 && d2 >= 0.0,
        format!(
            "F(12.5 mm) = {:.4} N, min second difference {c2:.3e} (2.5 mm), {d2:.3e} (0.1 mm)",
            coarse[5]
        ),
    )
}

/// 6. orderings of the reference constants.
fn table_orderings() -> Outcome {
    let t = ReferenceTable::bundled();
    let k = |n: &str| t.constants(n).unwrap();
    let (a, b, c, d, e) = (k("A"), k("B"), k("C"), k("D"), k("E"));
    let ok = a.kx > b.kx
        && d.ky > e.ky
        && c.kx < a.kx
        && c.kx < b.kx
        && c.ky < a.ky
        && c.ky < b.ky;
    check(
        ok,
        format!(
            "kx A {} > B {}; ky D {} > E {}; C ({}, {}) below A and B",
            a.kx, b.kx, d.ky, e.ky, c.kx, c.ky
        ),
    )
}

fn parse_vertices(obj: &str) -> Vec<[f64; 3]> {
    obj.lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let v: Vec<f64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn parse_points(csv: &str) -> Vec<[f64; 3]> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').take(3).map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

/// 7. OBJ/CSV re-parse to the model vertices; repeated exports identical.
fn export_round_trip() -> Outcome {
    let mut worst = 0.0_f64;
    let mut identical = true;
    let mut counts = true;
    for spec in kiri_core::sheet::presets() {
        for frac in [0.0, 0.3, 0.7] {
            let d = frac * max_displacement(&spec);
            let model = build_shape(&spec, d, 15).unwrap();
            let obj = obj_string(&model, ObjOptions::default());
            let csv = csv_string(&model);
            identical &= obj == obj_string(&build_shape(&spec, d, 15).unwrap(), ObjOptions::default());
            identical &= csv == csv_string(&build_shape(&spec, d, 15).unwrap());
            let want: Vec<[f64; 3]> = model.vertices().copied().collect();
            for got in [parse_vertices(&obj), parse_points(&csv)] {
                counts &= got.len() == want.len();
                for (g, w) in got.iter().zip(&want) {
                    for k in 0..3 {
                        worst = worst.max((g[k] - w[k]).abs());
                    }
                }
            }
        }
    }
    check(
        identical && counts && worst <= 1e-6,
        format!("max coordinate error {worst:.2e} mm, byte-identical {identical}"),
    )
}

/// 8. coarse candidates within one step of a 10x finer scan; budget monotone.
fn design_consistency() -> Outcome {
    let e = preset("E").unwrap();
    let coarse_step = 0.1;
    let mut checked = 0;
    let mut ok = true;
    let mut reqs = Vec::new();
    for &food_depth in &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0] {
        for &food_width in &[0.0, 8.0, 16.0, 24.0] {
            for &force_budget in &[0.25, 0.75, 1.5, 3.0] {
                reqs.push(GraspRequirement { food_width, food_depth, force_budget });
            }
        }
    }
    for req in &reqs {
        let coarse = evaluate_design(&e, &TABLE_E, req, coarse_step).unwrap();
        let fine = evaluate_design(&e, &TABLE_E, req, coarse_step / 10.0).unwrap();
        match (coarse.delta_x_grasp, fine.delta_x_grasp) {
            (Some(c), Some(f)) if coarse.feasible && fine.feasible => {
                ok &= c >= f - 1e-12 && c - f <= coarse_step + 1e-12;
                checked += 1;
            }
            _ => {}
        }
        // a coarse hit is always a fine hit
        ok &= !coarse.feasible || fine.feasible;
    }
    let specs = kiri_core::sheet::presets();
    let table = ReferenceTable::bundled();
    let src = ConstantsSource::Nearest { scale_thickness: false };
    let mut monotone = true;
    for req in &reqs {
        let small = sweep_specs(&specs, &src, &table, req, coarse_step).unwrap();
        let big = GraspRequirement { force_budget: 2.0 * req.force_budget, ..*req };
        let big = sweep_specs(&specs, &src, &table, &big, coarse_step).unwrap();
        monotone &= small
            .feasible
            .iter()
            .all(|c| big.feasible.iter().any(|b| b.spec.name == c.spec.name));
    }
    check(
        ok && monotone && checked > 0,
        format!("{} requirements, {checked} feasible pairs checked, budget monotone {monotone}", reqs.len()),
    )
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// 9. deform -> fit -> loocv -> mesh -> design through the binary; < 5 s.
fn cli_smoke() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("sheet_e.obj");
    let steps: Vec<Vec<&str>> = vec![
        vec!["deform", "specs/sheet_e.json", "--sweep", "0:12.5:2.5", "--format", "csv"],
        vec!["fit", "specs/sheet_e.json", "data/sheet_e_synthetic.csv", "--format", "json"],
        vec!["loocv", "specs/sheet_e.json", "data/sheet_e_synthetic.csv", "--format", "csv"],
        vec!["mesh", "specs/sheet_e.json", "--delta-x", "7.5", "--out", mesh.to_str().unwrap()],
        vec!["design", "data/design_example.json"],
    ];
    let start = Instant::now();
    for args in &steps {
        let out = Command::new(env!("CARGO_BIN_EXE_kiri"))
            .args(args)
            .current_dir(root())
            .output()
            .unwrap();
        if !out.status.success() {
            return Err(format!(
                "`kiri {}` exited {:?}: {}",
                args.join(" "),
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(5) && mesh.exists(),
        format!("{} commands, {elapsed:.2?}", steps.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 geometry invariants", geometry_invariants),
        ("2 catenary oracle equivalence", catenary_oracles),
        ("3 fit recovery", fit_recovery),
        ("4 noise robustness", noise_robustness),
        ("5 forward force curve shape", forward_curve_shape),
        ("6 reference constant orderings", table_orderings),
        ("7 export round trip", export_round_trip),
        ("8 design explorer consistency", design_consistency),
        ("9 end-to-end CLI smoke", cli_smoke),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
