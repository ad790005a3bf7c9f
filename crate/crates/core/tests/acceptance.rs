//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use finsler_core::config::Config;
use finsler_core::connection::{ricci_horizontal, CurvatureKind};
use finsler_core::finsler::{FinslerStructure, LocalGeometry};
use finsler_core::tripathi::{Tripathi, TripathiParams};
use finsler_core::verify::{run_all, run_suites, CheckRow, Report, RunOptions};

/// Points per metric in dimension 3. Dimension 2 uses the configured 50.
const POINTS_3D: usize = 15;

struct Runs {
    planar: Report,
    spatial: Report,
}

/// A row together with where it came from.
struct Found<'a> {
    dim: usize,
    metric: &'a str,
    row: &'a CheckRow,
}

impl Runs {
    fn rows<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = Found<'a>> + 'a {
        [&self.planar, &self.spatial]
            .into_iter()
            .flat_map(move |r| {
                r.suites
                    .iter()
                    .filter(move |s| s.suite == suite)
                    .flat_map(move |s| {
                        s.rows.iter().map(move |row| Found {
                            dim: r.metadata.dimension,
                            metric: &s.metric,
                            row,
                        })
                    })
            })
    }
}

/// Largest residual among rows, failing on any row at or above its limit.
/// `limit` returns `None` for rows that are only reported.
fn bound<'a>(
    rows: impl Iterator<Item = Found<'a>>,
    limit: impl Fn(&Found) -> Option<f64>,
) -> Result<(f64, usize), String> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for f in rows {
        let Some(tol) = limit(&f) else { continue };
        count += 1;
        if !(f.row.residual < tol) {
            return Err(format!(
                "{} on {} (n={}, {}): residual {:e} not below {:e}",
                f.row.label,
                f.metric,
                f.dim,
                f.row.params.as_deref().unwrap_or("-"),
                f.row.residual,
                tol
            ));
        }
        worst = worst.max(f.row.residual);
    }
    if count == 0 {
        return Err("no rows found".into());
    }
    Ok((worst, count))
}

fn reported_max<'a>(rows: impl Iterator<Item = Found<'a>>) -> f64 {
    rows.filter(|f| f.row.tolerance.is_none())
        .fold(0.0f64, |m, f| m.max(f.row.residual))
}

fn riemannian_oracles() -> Vec<(FinslerStructure, RiemannOracle)> {
    vec![
        (
            riemannian2(),
            RiemannOracle {
                n: 2,
                metric: riemannian2_matrix,
            },
        ),
        (
            riemannian3(),
            RiemannOracle {
                n: 3,
                metric: riemannian3_matrix,
            },
        ),
    ]
}

fn theorem_conditions(runs: &Runs) -> Result<String, String> {
    let planar = &runs.planar.metadata;
    let randoms = planar
        .params
        .iter()
        .filter(|p| p.starts_with("random"))
        .count();
    if randoms < 5 || planar.metrics.len() < 3 || planar.plan.points < 50 {
        return Err("planar run is smaller than 5 random fields x 3 metrics x 50 points".into());
    }
    let (worst, count) = bound(runs.rows("theorem"), |_| Some(1e-7))?;

    let mut cfg = Config::default_config();
    cfg.sample.points = 5;
    let fuzzed = run_suites(
        &cfg,
        &RunOptions {
            fuzz: true,
            ..RunOptions::default()
        },
        &["theorem"],
    )
    .map_err(|e| e.to_string())?;
    if fuzzed.suites.iter().any(|s| s.passed) {
        return Err("fuzz control passed on some metric".into());
    }

    // the defining conditions pin down the coefficients
    let mut unique = 0.0f64;
    for f in [randers2(), randers3()] {
        let n = f.dim();
        let params = sample_params(n);
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 4).map_err(|e| e.to_string())?;
            let built = Tripathi::new(&geo, &params)
                .map_err(|e| e.to_string())?
                .build();
            let sol = solve_conditions(&geo, &params);
            let (h, nl, v) = coefficient_values(&built);
            let scale = 1.0 + h.iter().chain(&nl).fold(0.0f64, |m, x| m.max(x.abs()));
            unique = unique
                .max(max_abs_diff(&h, &sol.h) / scale)
                .max(max_abs_diff(&nl, &sol.nl) / scale)
                .max(max_abs_diff(&v, &sol.v));
        }
    }
    if !(unique < 1e-8) {
        return Err(format!(
            "linear solve of the conditions differs from the build by {unique:e}"
        ));
    }
    Ok(format!(
        "max {worst:.1e} over {count} rows (< 1e-7); fuzz control fails; solved conditions match build to {unique:.1e}"
    ))
}

fn route_equivalence(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("routes"), |f| f.row.tolerance.map(|_| 1e-8))?;
    let literal = reported_max(runs.rows("routes"));
    Ok(format!("max {worst:.1e} over {count} rows (< 1e-8); expanded display as printed reported at {literal:.1e}"))
}

fn vc_collapse(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("collapse"), |_| Some(1e-10))?;
    Ok(format!("max {worst:.1e} over {count} rows (< 1e-10)"))
}

fn torsion_propositions(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("torsion"), |f| match f.row.label.as_str() {
        "hv-torsion" => Some(1e-12),
        "h-torsion" | "v-torsion" => Some(1e-8),
        "vhv-torsion" | "vh-torsion" => Some(1e-7),
        _ => None,
    })?;
    Ok(format!(
        "max {worst:.1e} over {count} rows (T 1e-12, Q and S 1e-8, P and R 1e-7)"
    ))
}

fn curvature_propositions(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("curvature"), |f| match f.row.label.as_str() {
        "v-curvature" => Some(1e-8),
        "hv-curvature" | "h-curvature" => {
            let general = f.metric == "randers" && f.row.params.as_deref() != Some("vc");
            Some(if general { 1e-6 } else { 1e-7 })
        }
        _ => None,
    })?;
    let literal = reported_max(runs.rows("curvature"));
    Ok(format!(
        "max {worst:.1e} over {count} rows (S 1e-8, P and R 1e-7 or 1e-6 on Randers); hv display as printed reported at {literal:.1e}"
    ))
}

fn bianchi_identities(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("bianchi"), |f| f.row.tolerance.map(|_| 1e-6))?;
    let literal = reported_max(runs.rows("bianchi"));

    // first Bianchi identity against the textbook Riemann tensor
    let mut cyclic = 0.0f64;
    let mut match_err = 0.0f64;
    for (f, oracle) in riemannian_oracles() {
        let n = oracle.n;
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 5).map_err(|e| e.to_string())?;
            let built = Tripathi::new(&geo, &TripathiParams::vc(n))
                .map_err(|e| e.to_string())?
                .build();
            let curv = built.curvature(CurvatureKind::H);
            let riem = oracle.riemann(&p.x);
            for i in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let k = |x, y, z| curv.comps.get(&[i, x, y, z]).value();
                            cyclic = cyclic.max((k(a, b, c) + k(b, c, a) + k(c, a, b)).abs());
                            match_err =
                                match_err.max((k(a, b, c) + riem[idx4(n, i, c, a, b)]).abs());
                        }
                    }
                }
            }
        }
    }
    if !(cyclic < 1e-7 && match_err < 1e-7) {
        return Err(format!(
            "Riemannian limit: cyclic sum {cyclic:e}, Riemann mismatch {match_err:e}"
        ));
    }
    Ok(format!(
        "max {worst:.1e} over {count} rows (< 1e-6); Riemannian cyclic sum {cyclic:.1e}; v-curvature display as printed reported at {literal:.1e}"
    ))
}

fn process_diagram(runs: &Runs) -> Result<String, String> {
    for label in [
        "c∘p1 = p1∘c",
        "gc under VC",
        "gh under VC",
        "gr under VC",
        "gb under VC",
    ] {
        if !runs.rows("diagram").any(|f| f.row.label == label) {
            return Err(format!("arrow `{label}` missing"));
        }
    }
    let (worst, count) = bound(runs.rows("diagram"), |_| Some(1e-8))?;
    Ok(format!("max {worst:.1e} over {count} arrows (< 1e-8)"))
}

fn case_matrix(runs: &Runs) -> Result<String, String> {
    for report in [&runs.planar, &runs.spatial] {
        for s in report.suites.iter().filter(|s| s.suite == "cases") {
            for id in 1..=26 {
                if !s.rows.iter().any(|r| r.label == format!("case {id}")) {
                    return Err(format!("case {id} missing on {}", s.metric));
                }
            }
        }
    }
    let (worst, count) = bound(runs.rows("cases"), |f| f.row.tolerance.map(|_| 1e-7))?;
    let printed = reported_max(runs.rows("cases"));
    Ok(format!(
        "max {worst:.1e} over {count} rows (< 1e-7); printed forms of cases 11-14 reported at up to {printed:.1e}"
    ))
}

fn substrate_oracles(runs: &Runs) -> Result<String, String> {
    let (worst, count) = bound(runs.rows("fd"), |_| Some(1e-5))?;
    let (mut chris, mut riem_err, mut ric_err) = (0.0f64, 0.0f64, 0.0f64);
    for (f, oracle) in riemannian_oracles() {
        let n = oracle.n;
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 4).map_err(|e| e.to_string())?;
            let gamma: Vec<f64> = geo.gamma.comps().iter().map(|c| c.value()).collect();
            chris = chris.max(max_abs_diff(&gamma, &oracle.christoffel(&p.x)));
            let curv = geo.cartan().curvature(CurvatureKind::H);
            let riem = oracle.riemann(&p.x);
            for i in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let ours = curv.comps.get(&[i, a, b, c]).value();
                            riem_err = riem_err.max((ours + riem[idx4(n, i, c, a, b)]).abs());
                        }
                    }
                }
            }
            let ric_o = ricci_horizontal(&curv, &geo.g_inv);
            let ric = oracle.ricci(&p.x);
            let inv = (oracle.metric)(&p.x)
                .try_inverse()
                .ok_or("singular oracle metric")?;
            for i in 0..n {
                for j in 0..n {
                    let want: f64 = (0..n).map(|k| inv[(i, k)] * ric[j * n + k]).sum();
                    ric_err = ric_err.max((ric_o.get(&[i, j]).value() - want).abs());
                }
            }
        }
    }
    if !(chris < 1e-7 && riem_err < 1e-7 && ric_err < 1e-7) {
        return Err(format!(
            "Riemannian limit: Christoffel {chris:e}, Riemann {riem_err:e}, Ricci {ric_err:e}"
        ));
    }
    Ok(format!(
        "fd max {worst:.1e} over {count} rows (< 1e-5); Christoffel {chris:.1e}, Riemann {riem_err:.1e}, Ricci {ric_err:.1e} (< 1e-7)"
    ))
}

fn determinism(runs: &Runs) -> Result<String, String> {
    let again =
        run_all(&Config::default_config(), &RunOptions::default()).map_err(|e| e.to_string())?;
    let (a, b) = (runs.planar.to_json(), again.to_json());
    if a != b {
        return Err("two runs of the default configuration differ".into());
    }
    Ok(format!("two runs give identical {}-byte reports", a.len()))
}

type Criterion = fn(&Runs) -> Result<String, String>;

fn main() -> ExitCode {
    let start = Instant::now();
    let planar = run_all(&Config::default_config(), &RunOptions::default()).expect("planar run");
    let mut spatial_cfg = Config::default_config_3d();
    spatial_cfg.sample.points = POINTS_3D;
    let spatial = run_all(&spatial_cfg, &RunOptions::default()).expect("spatial run");
    let runs = Runs { planar, spatial };

    let criteria: [(&str, Criterion); 10] = [
        ("theorem conditions", theorem_conditions),
        ("route equivalence", route_equivalence),
        ("vanishing-condition collapse", vc_collapse),
        ("torsion propositions", torsion_propositions),
        ("curvature propositions", curvature_propositions),
        ("Bianchi identities", bianchi_identities),
        ("process diagram", process_diagram),
        ("case matrix", case_matrix),
        ("substrate oracles", substrate_oracles),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check(&runs) {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s (n=2 at 50 points, n=3 at {POINTS_3D} points per metric)",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
