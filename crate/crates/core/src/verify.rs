//! Sampling, the identity suites and their aggregated reports.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ad::{JVec, PiTensor};
use crate::cases::{self, CASE_COUNT};
use crate::config::{name_stream, random_choices, Config, NamedParams, SampleConfig};
use crate::connection::{ConnectionCoefficients, Direction};
use crate::error::{Error, Result};
use crate::finsler::{
    fundamental_tensor, geodesic_spray, ChartPoint, FinslerStructure, LocalGeometry,
};
use crate::processes::{diagram_residuals, ConnectionFamily};
use crate::tripathi::bianchi::bianchi_identities_transported;
use crate::tripathi::relations::{curvature_relations, theorem_conditions, torsion_relations};
use crate::tripathi::{Tripathi, TripathiParams};

/// Size of the coefficient perturbation injected by the fuzz control.
pub const FUZZ: f64 = 1e-3;

/// Attempts per requested point before sampling gives up.
const SAMPLE_ATTEMPTS: usize = 100;

/// Seeded sampling of chart points with `y` in a shell around the origin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub points: usize,
    pub half_width: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl From<&SampleConfig> for SamplePlan {
    fn from(s: &SampleConfig) -> Self {
        SamplePlan {
            seed: s.seed,
            points: s.points,
            half_width: s.half_width,
            y_min: s.y_min,
            y_max: s.y_max,
        }
    }
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::from(&SampleConfig::default())
    }
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_min >= 0.1 && self.y_min < self.y_max) {
            return Err(Error::Config(
                "sample y-shell needs 0.1 ≤ y_min < y_max".into(),
            ));
        }
        if self.points == 0 || !(self.half_width > 0.0) {
            return Err(Error::Config(
                "sample plan needs points and a positive box".into(),
            ));
        }
        Ok(())
    }

    /// Points where `F` is admissible. `stream` separates independent draws
    /// under the same seed.
    pub fn sample(&self, f: &FinslerStructure, stream: u64) -> Result<Vec<ChartPoint>> {
        self.validate()?;
        let n = f.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let mut out = Vec::with_capacity(self.points);
        let mut last_err = None;
        for _ in 0..self.points * SAMPLE_ATTEMPTS {
            if out.len() == self.points {
                break;
            }
            let x: Vec<f64> = (0..n)
                .map(|_| rng.gen_range(-self.half_width..=self.half_width))
                .collect();
            let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(0.1..=1.0).contains(&norm) {
                continue;
            }
            let radius = rng.gen_range(self.y_min..=self.y_max);
            let y = dir.iter().map(|v| v * radius / norm).collect();
            let p = ChartPoint::new(x, y)?;
            match f.validate_at(&p) {
                Ok(()) => out.push(p),
                Err(e) => last_err = Some(e),
            }
        }
        if out.len() < self.points {
            return Err(
                last_err.unwrap_or_else(|| Error::Config("sampling ran out of attempts".into()))
            );
        }
        Ok(out)
    }
}

/// Named tolerances, tiered by the derivative depth of each identity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let pairs = [
            ("fd", 1e-5),
            ("theorem", 1e-7),
            ("route", 1e-8),
            ("collapse", 1e-10),
            ("torsion_exact", 1e-12),
            ("torsion", 1e-8),
            ("torsion_derived", 1e-7),
            ("curvature_v", 1e-8),
            ("curvature", 1e-7),
            ("bianchi", 1e-6),
            ("diagram", 1e-8),
            ("cases", 1e-7),
        ];
        Tolerances(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }
}

impl Tolerances {
    pub fn with_overrides(overrides: &BTreeMap<String, f64>) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (k, v) in overrides {
            t.set(k, *v)?;
        }
        Ok(t)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0) {
            return Err(Error::Config(format!(
                "tolerance `{name}` must be positive"
            )));
        }
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Config(format!(
                "unknown tolerance `{name}` (known: {})",
                self.names().join(", ")
            ))),
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn names(&self) -> Vec<&str> {
        self.0.keys().map(String::as_str).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Shown for information, no tolerance applies.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub label: String,
    /// The statement being checked.
    pub citation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<String>,
    pub residual: f64,
    pub tolerance: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub metric: String,
    pub seed: u64,
    pub points: usize,
    pub rows: Vec<CheckRow>,
    pub passed: bool,
}

impl CheckReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Fail)
    }
}

/// Running maxima of residuals keyed by label and parameter set.
struct Rows(Vec<CheckRow>);

impl Rows {
    fn new() -> Rows {
        Rows(Vec::new())
    }

    fn record(
        &mut self,
        label: &str,
        citation: &str,
        params: Option<&str>,
        residual: f64,
        tolerance: Option<f64>,
    ) {
        let found = self
            .0
            .iter_mut()
            .find(|r| r.label == label && r.params.as_deref() == params);
        match found {
            Some(row) => {
                if residual.is_nan() || residual > row.residual {
                    row.residual = residual;
                }
            }
            None => self.0.push(CheckRow {
                label: label.to_string(),
                citation: citation.to_string(),
                params: params.map(str::to_string),
                residual,
                tolerance,
                verdict: Verdict::Reported,
            }),
        }
    }

    fn finish(mut self, suite: &str, ctx: &Suite) -> CheckReport {
        for row in &mut self.0 {
            row.verdict = match row.tolerance {
                None => Verdict::Reported,
                Some(tol) if row.residual < tol => Verdict::Pass,
                Some(_) => Verdict::Fail,
            };
        }
        let passed = self.0.iter().all(|r| r.verdict != Verdict::Fail);
        CheckReport {
            suite: suite.to_string(),
            metric: ctx.f.name.clone(),
            seed: ctx.seed,
            points: ctx.points.len(),
            rows: self.0,
            passed,
        }
    }
}

/// Everything one suite needs about one metric.
pub struct Suite<'a> {
    pub f: &'a FinslerStructure,
    pub points: &'a [ChartPoint],
    pub tolerances: &'a Tolerances,
    pub seed: u64,
    /// Inject a coefficient perturbation; every suite must then fail.
    pub fuzz: bool,
}

impl Suite<'_> {
    fn tol(&self, name: &str) -> Option<f64> {
        Some(self.tolerances.get(name))
    }

    fn perturb(&self, conn: ConnectionCoefficients) -> ConnectionCoefficients {
        if !self.fuzz {
            return conn;
        }
        let mut h = conn.h.clone();
        let shifted = h.get(&[0, 0, 0]) + FUZZ;
        h.set(&[0, 0, 0], shifted);
        ConnectionCoefficients::new(conn.nl, h, conn.v)
    }

    fn rng(&self, purpose: &str) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(name_stream(purpose));
        rng
    }
}

/// Order of the `L` jet that leaves `spare` orders on the curvatures of `D̄`.
fn order_for(params: &TripathiParams, spare: usize) -> usize {
    4 + spare + usize::from(params.phi.needs_curvature())
}

/// `|lhs − Σ rhs| / (1 + s)` with `s` the largest entry of any term.
fn vec_residual(lhs: &JVec, rhs: &[&JVec]) -> f64 {
    let n = lhs.len();
    let mut scale = lhs.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut total = vec![0.0; n];
    for t in rhs {
        for (acc, v) in total.iter_mut().zip(t.values()) {
            *acc += v;
            scale = scale.max(v.abs());
        }
    }
    let diff = lhs
        .values()
        .iter()
        .zip(&total)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / (1.0 + scale)
}

const THEOREM_CITATIONS: [(&str, &str); 5] = [
    (
        "horizontal metricity",
        "D̄_{β̄X} g = 2f₁A(X)g + f₂(B ⊗ g + g ⊗ B)",
    ),
    (
        "vertical metricity",
        "D̄ is vertically parallel: D̄_{γX} g = 0",
    ),
    ("quarter symmetry", "Q̄(X,Y) = u(Y)φ(X) − u(X)φ(Y)"),
    ("hv-torsion symmetry", "g(T̄(X,Y),Z) is symmetric in Y and Z"),
    ("regularity", "the deflection map of D̄ is the identity"),
];

fn citation_of(table: &[(&'static str, &'static str)], label: &str) -> &'static str {
    table
        .iter()
        .find(|(l, _)| *l == label)
        .map_or("", |(_, c)| c)
}

/// The four defining conditions and regularity of `D̄`.
pub fn check_theorem(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let mut rows = Rows::new();
    for np in params {
        let order = order_for(&np.params, 0);
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let trip = Tripathi::new(&geo, &np.params)?;
            let built = ctx.perturb(trip.build());
            for r in theorem_conditions(&trip, &built) {
                let cite = citation_of(&THEOREM_CITATIONS, &r.name);
                rows.record(&r.name, cite, Some(&np.name), r.value, ctx.tol("theorem"));
            }
        }
    }
    Ok(rows.finish("theorem", ctx))
}

/// A fixed random affine π-vector field `Yⁱ = cⁱ + Σ cⁱ_a z^a`.
fn probe_field(geo: &LocalGeometry, coeffs: &[Vec<f64>]) -> JVec {
    let like = geo.like();
    JVec(
        coeffs
            .iter()
            .map(|row| {
                let mut acc = like.lift(row[0]);
                for (z, c) in geo.vars.iter().zip(&row[1..]) {
                    acc = acc + z * *c;
                }
                acc
            })
            .collect(),
    )
}

/// The coefficient-built `D̄` against `∇ + N`, the two spray routes, the
/// expanded nonlinear connection, and the contraction of the deformation.
pub fn check_routes(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let n = ctx.f.dim();
    let mut rng = ctx.rng("routes");
    let coeffs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..=2 * n).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        .collect();
    let mut rows = Rows::new();
    for np in params {
        let order = order_for(&np.params, 0);
        let name = Some(np.name.as_str());
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let trip = Tripathi::new(&geo, &np.params)?;
            let built = ctx.perturb(trip.build());
            let cartan = geo.cartan();
            let probe = probe_field(&geo, &coeffs);
            for j in 0..n {
                let ej = trip.axis(j);
                let hx = built.frame(Direction::Horizontal(j));
                let ours = built.cov_deriv(&hx, &probe);
                let theirs = cartan.cov_deriv(&hx, &probe);
                let diff = trip.difference(&ej, &probe);
                rows.record(
                    "horizontal operator route",
                    "D̄_X Y = ∇_X Y + N(ρX, Y)",
                    name,
                    vec_residual(&ours, &[&theirs, &diff]),
                    ctx.tol("route"),
                );
                let vx = built.frame(Direction::Vertical(j));
                rows.record(
                    "vertical operator route",
                    "the vertical parts of D̄ and ∇ coincide",
                    name,
                    vec_residual(
                        &built.cov_deriv(&vx, &probe),
                        &[&cartan.cov_deriv(&vx, &probe)],
                    ),
                    ctx.tol("route"),
                );
                let expanded = trip.difference_expanded(&ej, &probe);
                rows.record(
                    "expanded display",
                    "N as printed in the expanded formula in terms of the Cartan connection",
                    name,
                    vec_residual(&expanded, &[&diff]),
                    None,
                );
            }
            let eta = trip.eta();
            let half_nl_y = built.nl.apply(&[eta]) * 0.5;
            rows.record(
                "spray routes",
                "Ḡ = G − ½η̄_t = ½N̄y",
                name,
                vec_residual(&trip.spray(), &[&half_nl_y]),
                ctx.tol("route"),
            );
            rows.record(
                "nonlinear expansion",
                "N̄ expanded term by term",
                name,
                Residual::max_diff(&trip.nonlinear_expanded(), &built.nl),
                ctx.tol("route"),
            );
            rows.record(
                "deformation contraction",
                "X_t at X = η̄ equals η̄_t",
                name,
                vec_residual(&trip.x_t(eta), &[&trip.eta_t()]),
                ctx.tol("route"),
            );
        }
    }
    Ok(rows.finish("routes", ctx))
}

struct Residual;

impl Residual {
    /// Largest entry difference over `1 +` the largest entry.
    fn max_diff(a: &PiTensor, b: &PiTensor) -> f64 {
        a.max_abs_diff(b) / (1.0 + a.max_abs().max(b.max_abs()))
    }
}

/// With `f₁ = f₂ = u = 0`, `D̄` is the Cartan connection.
pub fn check_collapse(ctx: &Suite) -> Result<CheckReport> {
    let n = ctx.f.dim();
    let vc = TripathiParams::vc(n);
    let mut rows = Rows::new();
    for p in ctx.points {
        let geo = LocalGeometry::new(ctx.f, p, 4)?;
        let trip = Tripathi::new(&geo, &vc)?;
        let built = ctx.perturb(trip.build());
        let cartan = geo.cartan();
        let tol = ctx.tol("collapse");
        rows.record(
            "coefficients",
            "D̄ = Cartan connection",
            None,
            built.max_abs_diff(&cartan),
            tol,
        );
        rows.record(
            "spray",
            "Ḡ = G",
            None,
            vec_residual(&trip.spray(), &[&geo.spray]),
            tol,
        );
        rows.record(
            "nonlinear connection",
            "N̄ = Barthel connection",
            None,
            Residual::max_diff(&built.nl, &geo.barthel),
            tol,
        );
    }
    Ok(rows.finish("collapse", ctx))
}

const TORSION_CITATIONS: [(&str, &str, &str); 5] = [
    (
        "hv-torsion",
        "T̄ coincides with the (h)hv-torsion T of the Cartan connection",
        "torsion_exact",
    ),
    ("h-torsion", "Q̄(X,Y) = u(Y)φ(X) − u(X)φ(Y)", "torsion"),
    ("v-torsion", "Ŝ̄ vanishes identically", "torsion"),
    (
        "vhv-torsion",
        "P̂̄ in terms of P̂, X_t and N",
        "torsion_derived",
    ),
    (
        "vh-torsion",
        "R̂̄ in terms of R̂, N and brackets",
        "torsion_derived",
    ),
];

pub fn check_torsion(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let mut rows = Rows::new();
    for np in params {
        let order = order_for(&np.params, 0);
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let trip = Tripathi::new(&geo, &np.params)?;
            let built = ctx.perturb(trip.build());
            for r in torsion_relations(&trip, &built) {
                let (_, cite, tol) = TORSION_CITATIONS
                    .iter()
                    .find(|(l, _, _)| *l == r.name)
                    .expect("every torsion row is cited");
                rows.record(&r.name, cite, Some(&np.name), r.value, ctx.tol(tol));
            }
        }
    }
    Ok(rows.finish("torsion", ctx))
}

const CURVATURE_CITATIONS: [(&str, &str); 4] = [
    ("v-curvature", "S̄ = S"),
    (
        "hv-curvature",
        "P̄ = P + S(X_t,Y)Z + (∇_{γY}N)(X,Z) + N(T(Y,X),Z)",
    ),
    ("h-curvature", "R̄ in terms of R, P, S, X_t and N"),
    ("hv-curvature display", "P̄ with the f₂ group as printed"),
];

pub fn check_curvature(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let mut rows = Rows::new();
    for np in params {
        let order = order_for(&np.params, 0);
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let trip = Tripathi::new(&geo, &np.params)?;
            let built = ctx.perturb(trip.build());
            let curv = curvature_relations(&trip, &built);
            for r in &curv.residuals {
                let tol = if r.name == "v-curvature" {
                    "curvature_v"
                } else {
                    "curvature"
                };
                let cite = citation_of(&CURVATURE_CITATIONS, &r.name);
                rows.record(&r.name, cite, Some(&np.name), r.value, ctx.tol(tol));
            }
            let d = &curv.hv_display;
            rows.record(
                &d.name,
                citation_of(&CURVATURE_CITATIONS, &d.name),
                Some(&np.name),
                d.value,
                None,
            );
        }
    }
    Ok(rows.finish("curvature", ctx))
}

const BIANCHI_CITATIONS: [(&str, &str); 6] = [
    (
        "bianchi hv torsion",
        "P̄(X,Y)Z − P̄(Z,Y)X through derivatives of T̄ and Q̄",
    ),
    ("bianchi h cyclic", "cyclic sum of R̄ through Q̄ and R̂̄"),
    (
        "bianchi v-curvature",
        "horizontal derivative of S̄, alternated",
    ),
    ("bianchi hv-curvature", "vertical derivative of R̄"),
    ("bianchi h-curvature", "cyclic horizontal derivative of R̄"),
    (
        "bianchi v-curvature display",
        "horizontal derivative of S̄ with the derivative term signed as printed",
    ),
];

pub fn check_bianchi(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let mut rows = Rows::new();
    for np in params {
        let order = order_for(&np.params, 1);
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let built = Tripathi::new(&geo, &np.params)?.build();
            // the identities hold for any connection, so the perturbation
            // only enters the covariant derivatives
            let transport = ctx.perturb(built.clone());
            let b = bianchi_identities_transported(&built, &transport, &geo.eta());
            for r in &b.residuals {
                rows.record(
                    &r.name,
                    citation_of(&BIANCHI_CITATIONS, &r.name),
                    Some(&np.name),
                    r.value,
                    ctx.tol("bianchi"),
                );
            }
            let d = &b.v_curvature_display;
            rows.record(
                &d.name,
                citation_of(&BIANCHI_CITATIONS, &d.name),
                Some(&np.name),
                d.value,
                None,
            );
        }
    }
    Ok(rows.finish("bianchi", ctx))
}

/// Process arrows from each built `D̄`, and under the vanishing parameters
/// the four classical connections.
pub fn check_diagram(ctx: &Suite, params: &[NamedParams]) -> Result<CheckReport> {
    let mut rows = Rows::new();
    let cite = "the second row of the diagram comes from the first by the processes";
    let mut record = |arrows: Vec<crate::processes::Arrow>, name: &str| {
        for a in arrows {
            rows.record(&a.label, cite, Some(name), a.residual, ctx.tol("diagram"));
        }
    };
    let vc = TripathiParams::vc(ctx.f.dim());
    for p in ctx.points {
        let geo = LocalGeometry::new(ctx.f, p, 5)?;
        let gc = ctx.perturb(Tripathi::new(&geo, &vc)?.build());
        let fam = ConnectionFamily::derive(gc, &geo.eta());
        let classical = ConnectionFamily::classical(&geo);
        record(diagram_residuals(&fam, Some(&classical)), "vc");
    }
    for np in params {
        let order = order_for(&np.params, 1);
        for p in ctx.points {
            let geo = LocalGeometry::new(ctx.f, p, order)?;
            let gc = ctx.perturb(Tripathi::new(&geo, &np.params)?.build());
            let fam = ConnectionFamily::derive(gc, &geo.eta());
            record(diagram_residuals(&fam, None), &np.name);
        }
    }
    Ok(rows.finish("diagram", ctx))
}

/// All case presets against their closed forms, with seeded free choices.
pub fn check_cases(ctx: &Suite) -> Result<CheckReport> {
    let n = ctx.f.dim();
    let choices = random_choices(n, &mut ctx.rng("cases"))?;
    let shift = if ctx.fuzz { FUZZ } else { 0.0 };
    let mut rows = Rows::new();
    for id in 1..=CASE_COUNT {
        let info = cases::info(id)?;
        let r = cases::check_case_shifted(id, ctx.f, &choices, ctx.points, shift)?;
        let label = format!("case {id}");
        let cite = format!("{}: {}", info.source, info.constraints);
        rows.record(&label, &cite, None, r.residual, ctx.tol("cases"));
        if let Some(printed) = r.printed_residual {
            rows.record(&format!("{label} printed form"), &cite, None, printed, None);
        }
    }
    Ok(rows.finish("cases", ctx))
}

/// Entry-wise error over `1 +` the largest jet value.
fn rel_error(ad: &[f64], fd: &[f64]) -> f64 {
    let scale = ad.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = ad
        .iter()
        .zip(fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / (1.0 + scale)
}

/// Step for differences of `L²` values.
const STEP_SECOND: f64 = 2e-4;
/// Step for differences of jet-computed `g`, `G`.
const STEP_FIRST: f64 = 1e-5;

fn shifted(p: &ChartPoint, moves: &[(usize, f64)]) -> Result<ChartPoint> {
    let n = p.dim();
    let (mut x, mut y) = (p.x.clone(), p.y.clone());
    for &(slot, h) in moves {
        if slot < n {
            x[slot] += h;
        } else {
            y[slot - n] += h;
        }
    }
    ChartPoint::new(x, y)
}

/// Central differences of plain evaluations against the jets of `g`, `C`,
/// `G`, `N` and `Γ*`.
pub fn fd_crosscheck(ctx: &Suite) -> Result<CheckReport> {
    let f = ctx.f;
    let n = f.dim();
    let mut rows = Rows::new();
    let tol = ctx.tol("fd");
    for p in ctx.points {
        let geo = LocalGeometry::new(f, p, 3)?;
        let l2 = |q: &ChartPoint| -> Result<f64> { Ok(f.function().value(q)?.powi(2)) };
        // ∂²L²/∂z_a∂z_b by the four-point rule
        let mixed = |a: usize, b: usize, h: f64| -> Result<f64> {
            let v = |sa: f64, sb: f64| l2(&shifted(p, &[(a, sa * h), (b, sb * h)])?);
            Ok((v(1.0, 1.0)? - v(1.0, -1.0)? - v(-1.0, 1.0)? + v(-1.0, -1.0)?) / (4.0 * h * h))
        };
        let first = |a: usize, h: f64| -> Result<f64> {
            Ok((l2(&shifted(p, &[(a, h)])?)? - l2(&shifted(p, &[(a, -h)])?)?) / (2.0 * h))
        };

        let mut g_fd = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g_fd[(i, j)] = 0.5 * mixed(n + i, n + j, STEP_SECOND)?;
            }
        }
        let mut g_ad: Vec<f64> = geo.g.matrix_values().iter().copied().collect();
        if ctx.fuzz {
            g_ad[0] += FUZZ;
        }
        rows.record(
            "fundamental tensor",
            "g = ½ ∂²L²/∂y∂y",
            None,
            rel_error(&g_ad, g_fd.as_slice()),
            tol,
        );

        let g_inv_fd = g_fd
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate {
                point: p.to_string(),
                message: "difference metric is singular".into(),
            })?;
        let mut inner = vec![0.0; n];
        for (l, slot) in inner.iter_mut().enumerate() {
            let mut acc = -first(l, STEP_SECOND)?;
            for m in 0..n {
                acc += p.y[m] * mixed(n + l, m, STEP_SECOND)?;
            }
            *slot = 0.25 * acc;
        }
        let spray_fd: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|l| g_inv_fd[(i, l)] * inner[l]).sum())
            .collect();
        rows.record(
            "geodesic spray",
            "Gⁱ = ¼gⁱˡ(yᵐ∂²L²/∂yˡ∂xᵐ − ∂L²/∂xˡ)",
            None,
            rel_error(&geo.spray.values(), &spray_fd),
            tol,
        );

        // derivatives of the jet-computed g and G at shifted points
        let h = STEP_FIRST;
        let mut dg = vec![DMatrix::zeros(n, n); 2 * n];
        let mut dspray = vec![vec![0.0; n]; n];
        for (a, slot) in dg.iter_mut().enumerate() {
            let plus = fundamental_tensor(f, &shifted(p, &[(a, h)])?)?.g;
            let minus = fundamental_tensor(f, &shifted(p, &[(a, -h)])?)?.g;
            for i in 0..n {
                for j in 0..n {
                    slot[(i, j)] = (plus[i][j] - minus[i][j]) / (2.0 * h);
                }
            }
            if a >= n {
                let plus = geodesic_spray(f, &shifted(p, &[(a, h)])?)?;
                let minus = geodesic_spray(f, &shifted(p, &[(a, -h)])?)?;
                for i in 0..n {
                    dspray[i][a - n] = (plus[i] - minus[i]) / (2.0 * h);
                }
            }
        }
        let cube = |t: &PiTensor| -> Vec<f64> { t.comps().iter().map(|c| c.value()).collect() };
        let idx3 = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        let mut c_fd = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c_fd[idx3(i, j, k)] = 0.5 * dg[n + k][(i, j)];
                }
            }
        }
        rows.record(
            "Cartan tensor",
            "C = ½ ∂g/∂y",
            None,
            rel_error(&cube(&geo.c), &c_fd),
            tol,
        );

        let n_fd: Vec<f64> = (0..n).flat_map(|i| dspray[i].clone()).collect();
        let n_ad: Vec<f64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| geo.barthel.get(&[i, j]).value())
            .collect();
        rows.record(
            "Barthel connection",
            "Nⁱ_j = ∂Gⁱ/∂yʲ",
            None,
            rel_error(&n_ad, &n_fd),
            tol,
        );

        // δ_k g_ab with the jet-computed N
        let delta = |k: usize, a: usize, b: usize| -> f64 {
            dg[k][(a, b)]
                - (0..n)
                    .map(|m| geo.barthel.get(&[m, k]).value() * dg[n + m][(a, b)])
                    .sum::<f64>()
        };
        let g_inv = geo.g_inv.matrix_values();
        let mut gamma_fd = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma_fd[idx3(i, j, k)] = (0..n)
                        .map(|l| {
                            g_inv[(i, l)] * 0.5 * (delta(j, l, k) + delta(k, j, l) - delta(l, j, k))
                        })
                        .sum();
                }
            }
        }
        rows.record(
            "Cartan horizontal coefficients",
            "Γ*ⁱ_jk = ½gⁱˡ(δ_j g_lk + δ_k g_jl − δ_l g_jk)",
            None,
            rel_error(&cube(&geo.gamma), &gamma_fd),
            tol,
        );
    }
    Ok(rows.finish("fd", ctx))
}

/// Choices that are not part of the configuration file.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub fuzz: bool,
    /// Use these points for every metric instead of sampling.
    pub points: Option<Vec<ChartPoint>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub dimension: usize,
    pub plan: SamplePlan,
    pub metrics: Vec<String>,
    pub params: Vec<String>,
    pub explicit_points: bool,
    pub fuzz: bool,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub suites: Vec<CheckReport>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Points for one metric: explicit ones if given, otherwise a seeded draw.
pub fn points_for(
    cfg: &Config,
    f: &FinslerStructure,
    opts: &RunOptions,
) -> Result<Vec<ChartPoint>> {
    match &opts.points {
        Some(pts) => {
            for p in pts {
                f.validate_at(p)?;
            }
            Ok(pts.clone())
        }
        None => SamplePlan::from(&cfg.sample).sample(f, name_stream(&f.name)),
    }
}

pub const SUITES: [&str; 9] = [
    "fd",
    "theorem",
    "routes",
    "collapse",
    "torsion",
    "curvature",
    "bianchi",
    "diagram",
    "cases",
];

/// Run the named suites over every metric of the configuration.
pub fn run_suites(cfg: &Config, opts: &RunOptions, suites: &[&str]) -> Result<Report> {
    cfg.validate()?;
    for s in suites {
        if !SUITES.contains(s) {
            return Err(Error::Config(format!("unknown suite `{s}`")));
        }
    }
    let tolerances = Tolerances::with_overrides(&cfg.tolerances)?;
    let params = cfg.resolved_params()?;
    let mut reports = Vec::new();
    for f in cfg.structures()? {
        let points = points_for(cfg, &f, opts)?;
        let ctx = Suite {
            f: &f,
            points: &points,
            tolerances: &tolerances,
            seed: cfg.sample.seed,
            fuzz: opts.fuzz,
        };
        for s in SUITES.iter().filter(|s| suites.contains(s)) {
            let report = match *s {
                "fd" => fd_crosscheck(&ctx)?,
                "theorem" => check_theorem(&ctx, &params)?,
                "routes" => check_routes(&ctx, &params)?,
                "collapse" => check_collapse(&ctx)?,
                "torsion" => check_torsion(&ctx, &params)?,
                "curvature" => check_curvature(&ctx, &params)?,
                "bianchi" => check_bianchi(&ctx, &params)?,
                "diagram" => check_diagram(&ctx, &params)?,
                "cases" => check_cases(&ctx)?,
                _ => unreachable!("suite names checked above"),
            };
            reports.push(report);
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    Ok(Report {
        metadata: Metadata {
            dimension: cfg.dimension,
            plan: SamplePlan::from(&cfg.sample),
            metrics: cfg.metrics.iter().map(|m| m.name.clone()).collect(),
            params: params.iter().map(|p| p.name.clone()).collect(),
            explicit_points: opts.points.is_some(),
            fuzz: opts.fuzz,
            tolerances,
        },
        suites: reports,
        passed,
    })
}

/// Every suite over every metric.
pub fn run_all(cfg: &Config, opts: &RunOptions) -> Result<Report> {
    run_suites(cfg, opts, &SUITES)
}
