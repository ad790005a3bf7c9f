//! Registry of the special cases of the Tripathi connection: parameter
//! presets and the closed-form deltas `D̄_X Y − ∇_X Y` they reduce to.

use serde::Serialize;

use crate::ad::{JVec, MatrixField, ScalarField};
use crate::connection::Direction;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::finsler::{ChartPoint, FinslerStructure, LocalGeometry};
use crate::tripathi::{EndoParam, FormParam, Part, Tripathi, TripathiParams};

pub const CASE_COUNT: usize = 26;

/// Values a case leaves open. Only those a case needs are consulted.
#[derive(Clone, Debug, Default)]
pub struct CaseChoices {
    pub t: Option<f64>,
    pub f1: Option<ScalarField>,
    pub f2: Option<ScalarField>,
    pub a: Option<FormParam>,
    pub b: Option<FormParam>,
    pub u: Option<FormParam>,
    pub phi: Option<MatrixField>,
}

/// Catalog entry of a case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseInfo {
    pub id: usize,
    pub family: &'static str,
    pub constraints: &'static str,
    pub source: &'static str,
    /// Whether the printed closed form contains a slip, so the regenerated
    /// form is checked and the printed one only reported.
    pub typo: bool,
    /// Whether the case depends on the Ricci sign convention.
    pub convention_dependent: bool,
}

const QUARTER_METRIC: &str = "quarter-symmetric metric";
const QUARTER_NONMETRIC_F1: &str = "quarter-symmetric non-metric (f2 = 0)";
const QUARTER_NONMETRIC_F2: &str = "quarter-symmetric non-metric (f1 = 0)";
const SEMI_METRIC: &str = "semi-symmetric metric";
const SEMI_NONMETRIC_F1: &str = "semi-symmetric non-metric (f2 = 0)";
const SEMI_NONMETRIC_F2: &str = "semi-symmetric non-metric (f1 = 0)";
const SYMMETRIC: &str = "symmetric non-metric";

const CATALOG: [(&str, &str, &str); CASE_COUNT] = [
    (
        "generalized quarter-symmetric recurrent metric",
        "A = B, f1 = 1 - t, f2 = -t",
        "generalized quarter-symmetric connection",
    ),
    (
        QUARTER_METRIC,
        "f1 = f2 = 0",
        "Yano, quarter-symmetric metric connection",
    ),
    (
        QUARTER_METRIC,
        "f1 = f2 = 0, phi = Ric_o",
        "Pandey, Ricci quarter-symmetric metric connection",
    ),
    (
        QUARTER_METRIC,
        "f1 = f2 = 0, phi2 = 0",
        "Pandey, quarter-symmetric metric connection",
    ),
    (
        QUARTER_METRIC,
        "f1 = f2 = 0, phi1 = 0",
        "Yano, quarter-symmetric metric connection",
    ),
    (
        QUARTER_NONMETRIC_F1,
        "f1 = 1/2, f2 = 0",
        "quarter-symmetric h-recurrent Finsler connection",
    ),
    (
        QUARTER_NONMETRIC_F1,
        "f2 = 0, phi2 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        QUARTER_NONMETRIC_F1,
        "f1 = 1, f2 = 0, A = u, phi2 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        QUARTER_NONMETRIC_F1,
        "f2 = 0, phi1 = 0",
        "quarter-symmetric recurrent connection",
    ),
    (
        QUARTER_NONMETRIC_F1,
        "f1 = 1, f2 = 0, A = u, phi1 = 0",
        "special quarter-symmetric recurrent connection",
    ),
    (
        QUARTER_NONMETRIC_F2,
        "f1 = 0, phi2 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        QUARTER_NONMETRIC_F2,
        "f1 = 0, B = u, phi2 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        QUARTER_NONMETRIC_F2,
        "f1 = 0, phi1 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        QUARTER_NONMETRIC_F2,
        "f1 = 0, B = u, phi1 = 0",
        "quarter-symmetric non-metric connection",
    ),
    (
        SEMI_METRIC,
        "f1 = f2 = 0, phi = id",
        "Yano, semi-symmetric metric connection",
    ),
    (
        SEMI_METRIC,
        "f1 = f2 = 0, phi = id, u = ell",
        "semi-symmetric metric Finsler connection",
    ),
    (
        SEMI_NONMETRIC_F1,
        "f2 = 0, phi = id",
        "semi-symmetric recurrent connection",
    ),
    (
        SEMI_NONMETRIC_F1,
        "f1 = 1/2, f2 = 0, phi = id",
        "Andonie, Liang, semi-symmetric recurrent connection",
    ),
    (
        SEMI_NONMETRIC_F1,
        "f1 = 1/2, f2 = 0, phi = id, A = u = ell",
        "special semi-symmetric h-recurrent Finsler connection",
    ),
    (
        SEMI_NONMETRIC_F2,
        "f1 = 0, phi = id",
        "semi-symmetric non-metric connection",
    ),
    (
        SEMI_NONMETRIC_F2,
        "f1 = 0, f2 = -1, phi = id",
        "Sengupta, semi-symmetric non-metric connection",
    ),
    (
        SEMI_NONMETRIC_F2,
        "f1 = 0, f2 = -1, phi = id, B = u",
        "Agashe, semi-symmetric non-metric connection",
    ),
    (SYMMETRIC, "u = 0", "symmetric non-metric connection"),
    (
        SYMMETRIC,
        "f1 = 1/2, f2 = 0, u = 0",
        "Weyl, symmetric recurrent connection",
    ),
    (
        SYMMETRIC,
        "f1 = f2 = -1, u = 0, A = B",
        "Yano, symmetric non-metric connection",
    ),
    (
        SYMMETRIC,
        "f1 = 1/2, f2 = 0, u = 0, A = ell",
        "special symmetric h-recurrent Finsler connection",
    ),
];

fn check_id(id: usize) -> Result<()> {
    if (1..=CASE_COUNT).contains(&id) {
        Ok(())
    } else {
        Err(Error::UnknownCase(id))
    }
}

pub fn info(id: usize) -> Result<CaseInfo> {
    check_id(id)?;
    let (family, constraints, source) = CATALOG[id - 1];
    Ok(CaseInfo {
        id,
        family,
        constraints,
        source,
        typo: (11..=14).contains(&id),
        convention_dependent: id == 3,
    })
}

pub fn catalog() -> Vec<CaseInfo> {
    (1..=CASE_COUNT)
        .map(|id| info(id).expect("ids in range"))
        .collect()
}

fn constant(n: usize, v: f64) -> ScalarField {
    ScalarField::from_expr(n, Expr::num(v)).expect("constant field")
}

impl CaseChoices {
    fn need<T: Clone>(&self, id: usize, name: &'static str, v: &Option<T>) -> Result<T> {
        v.clone().ok_or(Error::MissingChoice {
            id,
            name: name.to_string(),
        })
    }
}

/// Parameters realizing case `id` from the free choices.
pub fn preset(id: usize, n: usize, c: &CaseChoices) -> Result<TripathiParams> {
    check_id(id)?;
    let zero_s = || constant(n, 0.0);
    let half = || constant(n, 0.5);
    let one = || constant(n, 1.0);
    let minus_one = || constant(n, -1.0);
    let zero_f = || FormParam::zero(n);
    let f1 = || c.need(id, "f1", &c.f1);
    let f2 = || c.need(id, "f2", &c.f2);
    let a = || c.need(id, "A", &c.a);
    let b = || c.need(id, "B", &c.b);
    let u = || c.need(id, "u", &c.u);
    let phi = || c.need(id, "phi", &c.phi).map(EndoParam::Field);
    let lowered = |part: Part| {
        c.need(id, "phi", &c.phi)
            .map(|m| EndoParam::Lowered { m, part })
    };
    let sym = || lowered(Part::Symmetric);
    let anti = || lowered(Part::Antisymmetric);
    // A is only read by the printed forms of cases 11 to 14
    let a_or_zero = || c.a.clone().unwrap_or_else(zero_f);

    let p = |f1, f2, a, b, u, phi| TripathiParams {
        f1,
        f2,
        a,
        b,
        u,
        phi,
    };
    Ok(match id {
        1 => {
            let t = c.need(id, "t", &c.t)?;
            let a = a()?;
            p(
                constant(n, 1.0 - t),
                constant(n, -t),
                a.clone(),
                a,
                u()?,
                phi()?,
            )
        }
        2 => p(zero_s(), zero_s(), zero_f(), zero_f(), u()?, phi()?),
        3 => p(
            zero_s(),
            zero_s(),
            zero_f(),
            zero_f(),
            u()?,
            EndoParam::RicciCartan,
        ),
        4 => p(zero_s(), zero_s(), zero_f(), zero_f(), u()?, sym()?),
        5 => p(zero_s(), zero_s(), zero_f(), zero_f(), u()?, anti()?),
        6 => p(half(), zero_s(), a()?, zero_f(), u()?, phi()?),
        7 => p(f1()?, zero_s(), a()?, zero_f(), u()?, sym()?),
        8 => p(one(), zero_s(), u()?, zero_f(), u()?, sym()?),
        9 => p(f1()?, zero_s(), a()?, zero_f(), u()?, anti()?),
        10 => p(one(), zero_s(), u()?, zero_f(), u()?, anti()?),
        11 => p(zero_s(), f2()?, a_or_zero(), b()?, u()?, sym()?),
        12 => p(zero_s(), f2()?, a_or_zero(), u()?, u()?, sym()?),
        13 => p(zero_s(), f2()?, a_or_zero(), b()?, u()?, anti()?),
        14 => p(zero_s(), f2()?, a_or_zero(), u()?, u()?, anti()?),
        15 => p(
            zero_s(),
            zero_s(),
            zero_f(),
            zero_f(),
            u()?,
            EndoParam::Identity,
        ),
        16 => p(
            zero_s(),
            zero_s(),
            zero_f(),
            zero_f(),
            FormParam::Ell,
            EndoParam::Identity,
        ),
        17 => p(f1()?, zero_s(), a()?, zero_f(), u()?, EndoParam::Identity),
        18 => p(half(), zero_s(), a()?, zero_f(), u()?, EndoParam::Identity),
        19 => p(
            half(),
            zero_s(),
            FormParam::Ell,
            zero_f(),
            FormParam::Ell,
            EndoParam::Identity,
        ),
        20 => p(zero_s(), f2()?, zero_f(), b()?, u()?, EndoParam::Identity),
        21 => p(
            zero_s(),
            minus_one(),
            zero_f(),
            b()?,
            u()?,
            EndoParam::Identity,
        ),
        22 => {
            let u = u()?;
            p(
                zero_s(),
                minus_one(),
                zero_f(),
                u.clone(),
                u,
                EndoParam::Identity,
            )
        }
        23 => {
            let phi = c
                .phi
                .clone()
                .map_or_else(|| EndoParam::zero(n), EndoParam::Field);
            p(f1()?, f2()?, a()?, b()?, zero_f(), phi)
        }
        24 => p(
            half(),
            zero_s(),
            a()?,
            zero_f(),
            zero_f(),
            EndoParam::zero(n),
        ),
        25 => {
            let a = a()?;
            p(
                minus_one(),
                minus_one(),
                a.clone(),
                a,
                zero_f(),
                EndoParam::zero(n),
            )
        }
        26 => p(
            half(),
            zero_s(),
            FormParam::Ell,
            zero_f(),
            zero_f(),
            EndoParam::zero(n),
        ),
        _ => unreachable!("checked above"),
    })
}

/// The printed building blocks shared by several closed forms.
struct Blocks<'a, 'g> {
    tr: &'a Tripathi<'g>,
}

impl Blocks<'_, '_> {
    /// `g(X,Y)w̄ − w(X)Y − w(Y)X − Lℓ(Y)T(w̄,X) + 𝐓(w̄,X,Y)η̄ + L²S(X,w̄)Y`
    fn recurrent(&self, w: &JVec, wbar: &JVec, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let eta = tr.eta();
        let l = tr.l();
        wbar * tr.g(x, y) - y * w.dot(x) - x * w.dot(y) - tr.t(wbar, x) * (l * tr.ell(y))
            + eta * tr.tt(wbar, x, y)
            + tr.s(x, wbar, y) * (l * l)
    }

    /// The same with `L²{T(T(w̄,Y),X) − T(T(X,Y),w̄)}` in place of the `S` term.
    fn recurrent_tt(&self, w: &JVec, wbar: &JVec, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let eta = tr.eta();
        let l = tr.l();
        let tt = tr.t(&tr.t(wbar, y), x) - tr.t(&tr.t(x, y), wbar);
        wbar * tr.g(x, y) - y * w.dot(x) - x * w.dot(y) - tr.t(wbar, x) * (l * tr.ell(y))
            + eta * tr.tt(wbar, x, y)
            + tt * (l * l)
    }

    /// `g(X,Y)w̄ − Lℓ(Y)T(w̄,X) + 𝐓(w̄,X,Y)η̄ + L²S(X,s)Y`
    fn nonmetric(&self, wbar: &JVec, s_arg: &JVec, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let l = tr.l();
        wbar * tr.g(x, y) - tr.t(wbar, x) * (l * tr.ell(y))
            + tr.eta() * tr.tt(wbar, x, y)
            + tr.s(x, s_arg, y) * (l * l)
    }

    fn nonmetric_tt(&self, wbar: &JVec, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let l = tr.l();
        let tt = tr.t(&tr.t(wbar, y), x) - tr.t(&tr.t(x, y), wbar);
        wbar * tr.g(x, y) - tr.t(wbar, x) * (l * tr.ell(y))
            + tr.eta() * tr.tt(wbar, x, y)
            + tt * (l * l)
    }

    /// The `u`, `φ` part with both `φ₁` and `φ₂`.
    fn quarter(&self, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let eta = tr.eta();
        let l = tr.l();
        let ubar = &tr.raised.u;
        let p1e = tr.phi1(eta);
        let p2e = tr.phi2(eta);
        let mixed = &p1e - &p2e;
        let u_eta = tr.u_of(eta);
        -(ubar * (tr.g(&tr.phi1(x), y) + tr.tt(&p2e, x, y))) - tr.phi2(y) * tr.u_of(x)
            + tr.t(ubar, x) * (l * tr.ell(&tr.phi1(y)))
            - (tr.s(&mixed, x, y) + tr.t(&tr.phi1(y), x) - tr.phi1(&tr.t(x, y))) * &u_eta
            + (tr.t(&p2e, x) + tr.phi1(x)) * tr.u_of(y)
            + tr.s(ubar, x, y) * (l * tr.ell(&p1e))
            - p1e * tr.tt(ubar, x, y)
    }

    /// The `u`, `φ` part when `φ₂ = 0`.
    fn quarter_sym(&self, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let eta = tr.eta();
        let l = tr.l();
        let ubar = &tr.raised.u;
        let p1e = tr.phi1(eta);
        -(ubar * tr.g(&tr.phi1(x), y)) + tr.t(ubar, x) * (l * tr.ell(&tr.phi1(y)))
            - (tr.s(&p1e, x, y) + tr.t(&tr.phi1(y), x) - tr.phi1(&tr.t(x, y))) * tr.u_of(eta)
            + tr.phi1(x) * tr.u_of(y)
            + tr.s(ubar, x, y) * (l * tr.ell(&p1e))
            - &p1e * tr.tt(ubar, x, y)
    }

    /// The `u`, `φ` part when `φ₁ = 0`.
    fn quarter_anti(&self, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let eta = tr.eta();
        let ubar = &tr.raised.u;
        let p2e = tr.phi2(eta);
        -(ubar * tr.tt(&p2e, x, y)) - tr.phi2(y) * tr.u_of(x)
            + tr.t(&p2e, x) * tr.u_of(y)
            + tr.s(&p2e, x, y) * tr.u_of(eta)
    }

    /// The `u` part when `φ = id`.
    fn semi(&self, x: &JVec, y: &JVec) -> JVec {
        let tr = self.tr;
        let l = tr.l();
        let l2 = l * l;
        let ubar = &tr.raised.u;
        -(ubar * tr.g(x, y))
            + x * tr.u_of(y)
            + tr.t(ubar, x) * (l * tr.ell(y))
            + tr.t(&tr.t(x, y), ubar) * &l2
            - tr.t(&tr.t(ubar, y), x) * &l2
            - tr.eta() * tr.tt(ubar, x, y)
    }
}

/// Closed-form delta `D̄_X Y − ∇_X Y` of case `id` on π-vectors `X = ρX`, `Y`.
///
/// With `printed` set, cases 11 to 14 use `S(X, ā)` in the `f₂` group as
/// printed; otherwise the group's own vector.
pub fn closed_form_delta(
    id: usize,
    tr: &Tripathi,
    x: &JVec,
    y: &JVec,
    printed: bool,
) -> Result<JVec> {
    check_id(id)?;
    let bl = Blocks { tr };
    let eta = tr.eta();
    let l = tr.l();
    let vals = &tr.values;
    let (abar, bbar, ubar) = (&tr.raised.a, &tr.raised.b, &tr.raised.u);
    let f1 = &vals.f1;
    let f2 = &vals.f2;
    let recurrent_a = || bl.recurrent(&vals.a, abar, x, y);
    let nonmetric_printed = |own: &JVec| {
        let s_arg = if printed { abar } else { own };
        bl.nonmetric(own, s_arg, x, y)
    };
    let ell_cone = |sign_xy: f64, sign_yx: f64| {
        eta * (tr.g(x, y) / l) + y * (tr.ell(x) * sign_xy) + x * (tr.ell(y) * sign_yx)
    };
    Ok(match id {
        1 => {
            // the f₁ = 1 − t group merged with the −f₂ = t group (A = B)
            let sym = (y * vals.a.dot(x) + x * vals.a.dot(y)) * f1;
            bl.nonmetric(abar, abar, x, y) - sym + bl.quarter(x, y)
        }
        2 | 3 => bl.quarter(x, y),
        4 => bl.quarter_sym(x, y),
        5 => bl.quarter_anti(x, y),
        6 => recurrent_a() * 0.5 + bl.quarter(x, y),
        7 => recurrent_a() * f1 + bl.quarter_sym(x, y),
        8 => bl.recurrent(&vals.u, ubar, x, y) + bl.quarter_sym(x, y),
        9 => recurrent_a() * f1 + bl.quarter_anti(x, y),
        10 => bl.recurrent(&vals.u, ubar, x, y) + bl.quarter_anti(x, y),
        11 => bl.quarter_sym(x, y) - nonmetric_printed(bbar) * f2,
        12 => bl.quarter_sym(x, y) - nonmetric_printed(ubar) * f2,
        13 => bl.quarter_anti(x, y) - nonmetric_printed(bbar) * f2,
        14 => bl.quarter_anti(x, y) - nonmetric_printed(ubar) * f2,
        15 => bl.semi(x, y),
        16 => -(eta * (tr.g(x, y) / l)) + x * tr.ell(y),
        17 => bl.recurrent_tt(&vals.a, abar, x, y) * f1 + bl.semi(x, y),
        18 => bl.recurrent_tt(&vals.a, abar, x, y) * 0.5 + bl.semi(x, y),
        19 => -(ell_cone(1.0, -1.0) * 0.5),
        20 => bl.semi(x, y) - bl.nonmetric_tt(bbar, x, y) * f2,
        21 => bl.nonmetric_tt(bbar, x, y) + bl.semi(x, y),
        22 => x * tr.u_of(y),
        23 => recurrent_a() * f1 - bl.nonmetric(bbar, bbar, x, y) * f2,
        24 => recurrent_a() * 0.5,
        25 => y * vals.a.dot(x) + x * vals.a.dot(y),
        26 => ell_cone(-1.0, -1.0) * 0.5,
        _ => unreachable!("checked above"),
    })
}

/// Largest deviations of a case over points and frame inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseCheck {
    pub id: usize,
    /// Built connection against the closed form.
    pub residual: f64,
    /// Built connection against the printed form, for the flagged cases.
    pub printed_residual: Option<f64>,
}

/// Compare the built connection of case `id` with its closed form.
///
/// The built delta on frames is `H̄ⁱ_jk − (∇_{β̄e_j} e_k)ⁱ`, with `∇` the
/// Cartan connection along the horizontal frame of `D̄`.
pub fn check_case(
    id: usize,
    f: &FinslerStructure,
    choices: &CaseChoices,
    points: &[ChartPoint],
) -> Result<CaseCheck> {
    check_case_shifted(id, f, choices, points, 0.0)
}

/// As [`check_case`] with `shift` added to the built `H̄⁰_00`, a control
/// that must make the comparison fail.
pub fn check_case_shifted(
    id: usize,
    f: &FinslerStructure,
    choices: &CaseChoices,
    points: &[ChartPoint],
    shift: f64,
) -> Result<CaseCheck> {
    let n = f.dim();
    let params = preset(id, n, choices)?;
    let typo = info(id)?.typo;
    let order = if params.phi.needs_curvature() { 4 } else { 3 };
    let mut residual = 0.0f64;
    let mut printed_residual = 0.0f64;
    for p in points {
        let geo = LocalGeometry::new(f, p, order)?;
        let tr = Tripathi::new(&geo, &params)?;
        let mut built = tr.build();
        if shift != 0.0 {
            let moved = built.h.get(&[0, 0, 0]) + shift;
            built.h.set(&[0, 0, 0], moved);
        }
        let cartan = geo.cartan();
        for j in 0..n {
            let frame = built.frame(Direction::Horizontal(j));
            let ej = tr.axis(j);
            for k in 0..n {
                let ek = tr.axis(k);
                let nabla = cartan.cov_deriv(&frame, &ek);
                let ours = JVec(
                    (0..n)
                        .map(|i| built.h.get(&[i, j, k]) - &nabla[i])
                        .collect(),
                );
                let compare = |other: &JVec| {
                    let scale = ours
                        .values()
                        .iter()
                        .chain(&other.values())
                        .fold(0.0f64, |m, v| m.max(v.abs()));
                    let diff = ours
                        .values()
                        .iter()
                        .zip(other.values())
                        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    diff / (1.0 + scale)
                };
                residual = residual.max(compare(&closed_form_delta(id, &tr, &ej, &ek, false)?));
                if typo {
                    printed_residual =
                        printed_residual.max(compare(&closed_form_delta(id, &tr, &ej, &ek, true)?));
                }
            }
        }
    }
    Ok(CaseCheck {
        id,
        residual,
        printed_residual: typo.then_some(printed_residual),
    })
}
