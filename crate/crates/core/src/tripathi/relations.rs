//! Residuals of the identities satisfied by the Tripathi connection.

use serde::{Deserialize, Serialize};

use super::Tripathi;
use crate::ad::{JVec, PiTensor};
use crate::connection::{bracket, ConnectionCoefficients, CurvatureKind, Direction, TmField};

/// One identity evaluated at one point: `|lhs − rhs| / (1 + scale)` where
/// `scale` is the largest magnitude among the terms entering either side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    /// Compare two sides given as lists of term tensors that are summed.
    pub fn of_terms(name: &str, lhs: &[&PiTensor], rhs: &[&PiTensor]) -> Residual {
        let total = |terms: &[&PiTensor]| -> Vec<f64> {
            let mut acc = vec![0.0; terms[0].comps().len()];
            for t in terms {
                for (a, c) in acc.iter_mut().zip(t.comps()) {
                    *a += c.value();
                }
            }
            acc
        };
        let scale = lhs
            .iter()
            .chain(rhs)
            .fold(0.0f64, |m, t| m.max(t.max_abs()));
        let (l, r) = (total(lhs), total(rhs));
        let diff = l
            .iter()
            .zip(&r)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Residual {
            name: name.to_string(),
            value: diff / (1.0 + scale),
            scale,
        }
    }

    pub fn between(name: &str, lhs: &PiTensor, rhs: &PiTensor) -> Residual {
        Residual::of_terms(name, &[lhs], &[rhs])
    }
}

/// Residuals of the four defining conditions plus regularity.
pub fn theorem_conditions(trip: &Tripathi, built: &ConnectionCoefficients) -> Vec<Residual> {
    let geo = trip.geo;
    let n = geo.n;
    let g = &geo.g;
    let vals = &trip.values;
    let (h_def, v_def) = built.metric_deficit(g);

    let expected = PiTensor::from_fn(n, 0, 3, |ix| {
        let (j, k, l) = (ix[0], ix[1], ix[2]);
        let f1 = (&vals.f1 * &vals.a[j] * g.get(&[k, l])).scale(2.0);
        let f2 = &vals.f2 * (&vals.b[k] * g.get(&[l, j]) + &vals.b[l] * g.get(&[j, k]));
        f1 + f2
    });
    let zero = v_def.map(|c| c.zero_like());

    let tors = built.torsions(trip.eta());
    let phi = &vals.phi;
    let quarter = PiTensor::from_fn(n, 1, 2, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        &vals.u[k] * phi.get(&[i, j]) - &vals.u[j] * phi.get(&[i, k])
    });

    // g(T̄(e_j, e_k), e_l) and its (k, l) transpose
    let lowered = PiTensor::from_fn(n, 0, 3, |ix| {
        let col = tors.tt.apply(&[&axis(trip, ix[0]), &axis(trip, ix[1])]);
        geo.inner(&col, &axis(trip, ix[2]))
    });
    let transposed = PiTensor::from_fn(n, 0, 3, |ix| lowered.get(&[ix[0], ix[2], ix[1]]).clone());

    let deflection = PiTensor::from_fn(n, 1, 1, |ix| {
        let y = trip.eta();
        let mut acc = built.h.get(&[ix[0], ix[1], 0]) * &y[0];
        for m in 1..n {
            acc = acc + built.h.get(&[ix[0], ix[1], m]) * &y[m];
        }
        acc
    });

    vec![
        Residual::between("horizontal metricity", &h_def, &expected),
        Residual::between("vertical metricity", &v_def, &zero),
        Residual::between("quarter symmetry", &tors.q, &quarter),
        Residual::between("hv-torsion symmetry", &lowered, &transposed),
        Residual::between("regularity", &deflection, &built.nl),
    ]
}

/// Torsions of `D̄` against their expressions through Cartan quantities.
pub fn torsion_relations(trip: &Tripathi, built: &ConnectionCoefficients) -> Vec<Residual> {
    let geo = trip.geo;
    let n = geo.n;
    let eta = trip.eta();
    let cartan = geo.cartan();
    let ours = built.torsions(eta);
    let theirs = cartan.torsions(eta);
    let vals = &trip.values;
    let quarter = PiTensor::from_fn(n, 1, 2, |ix| {
        let (i, j, k) = (ix[0], ix[1], ix[2]);
        &vals.u[k] * vals.phi.get(&[i, j]) - &vals.u[j] * vals.phi.get(&[i, k])
    });
    let zero = ours.s_hat.map(|c| c.zero_like());
    let diff = trip.difference_tensor();
    let xt: Vec<JVec> = (0..n).map(|j| trip.x_t(&axis(trip, j))).collect();
    let h: Vec<TmField> = (0..n)
        .map(|j| cartan.frame(Direction::Horizontal(j)))
        .collect();
    let v: Vec<TmField> = (0..n)
        .map(|j| cartan.frame(Direction::Vertical(j)))
        .collect();
    let vt: Vec<TmField> = xt.iter().map(|z| cartan.vertical_lift(z)).collect();

    // P̂̄(X,Y) = P̂(X,Y) − ∇_{γY}X_t − N(X,Y) + N(ρ[βX,γY], η̄)
    let dxt = pairs(n, |j, k| -cartan.cov_deriv(&v[k], &xt[j]));
    let neg_diff = diff.map(|c| -c);
    let p_bracket = pairs(n, |j, k| diff.apply(&[&bracket(&h[j], &v[k]).rho(), eta]));

    // R̂̄(X,Y) = R̂(X,Y) + N(ρ[β̄X,β̄Y], η̄) + K([βX,γY_t] + [γX_t,βY] + [γX_t,γY_t])
    let hb: Vec<TmField> = (0..n)
        .map(|j| built.frame(Direction::Horizontal(j)))
        .collect();
    let r_bracket = pairs(n, |j, k| diff.apply(&[&bracket(&hb[j], &hb[k]).rho(), eta]));
    let r_k = pairs(n, |j, k| {
        let sum = &(&bracket(&h[j], &vt[k]) + &bracket(&vt[j], &h[k])) + &bracket(&vt[j], &vt[k]);
        cartan.connection_map(&sum, eta)
    });

    vec![
        Residual::between("hv-torsion", &ours.tt, &geo.t),
        Residual::between("h-torsion", &ours.q, &quarter),
        Residual::between("v-torsion", &ours.s_hat, &zero),
        Residual::of_terms(
            "vhv-torsion",
            &[&ours.p_hat],
            &[&theirs.p_hat, &dxt, &neg_diff, &p_bracket],
        ),
        Residual::of_terms(
            "vh-torsion",
            &[&ours.r_hat],
            &[&theirs.r_hat, &r_bracket, &r_k],
        ),
    ]
}

/// Named curvature residuals; the literal hv display is kept separate since
/// its `f₂` term carries the opposite sign to the regenerated expansion.
pub struct CurvatureRelations {
    pub residuals: Vec<Residual>,
    pub hv_display: Residual,
}

/// Curvatures of `D̄` against their expansions through Cartan quantities.
pub fn curvature_relations(trip: &Tripathi, built: &ConnectionCoefficients) -> CurvatureRelations {
    let geo = trip.geo;
    let n = geo.n;
    let eta = trip.eta();
    let cartan = geo.cartan();
    let diff = trip.difference_tensor();
    let xt: Vec<JVec> = (0..n).map(|j| trip.x_t(&axis(trip, j))).collect();
    let e: Vec<JVec> = (0..n).map(|j| axis(trip, j)).collect();
    let t = |a: &JVec, b: &JVec| geo.t.apply(&[a, b]);
    let nn = |a: &JVec, b: &JVec| diff.apply(&[a, b]);
    let s = &trip.s;
    let s_of = |a: &JVec, b: &JVec, c: &JVec| s.apply(&[a, b, c]);

    let s_bar = built.curvature(CurvatureKind::V).comps;

    // P̄(X,Y)Z = P + S(X_t,Y)Z + (∇_{γY}N)(X,Z) + N(T(Y,X),Z)
    let p_bar = built.curvature(CurvatureKind::Hv).comps;
    let p = cartan.curvature(CurvatureKind::Hv).comps;
    let dn_v: Vec<PiTensor> = (0..n)
        .map(|b| cartan.cov_deriv_tensor(&cartan.frame(Direction::Vertical(b)), &diff))
        .collect();
    let p_s = triples(n, |a, b, c| s_of(&xt[a], &e[b], &e[c]));
    let p_dn = triples(n, |a, b, c| column(&dn_v[b], a, c));
    let p_nt = triples(n, |a, b, c| nn(&t(&e[b], &e[a]), &e[c]));

    // the f₂ group as displayed: +f₂{Lℓ(X)S(b̄,Y)Z + L²S(T(b̄,X),Y)Z}
    let l = &geo.l;
    let l2 = l * l;
    let b_bar = &trip.raised.b;
    let f2 = &trip.values.f2;
    let p_flip = triples(n, |a, b, c| {
        s_of(&t(b_bar, &e[a]), &e[b], &e[c]) * (f2 * &l2).scale(2.0)
    });

    // R̄ = R + P(X,Y_t) − P(Y,X_t) + S(X_t,Y_t) + 𝔘{(∇_{β̄Y}N)(X,Z) + N(Y,N(X,Z)) + N(T(Y_t,X),Z)}
    let r_bar = built.curvature(CurvatureKind::H).comps;
    let r = cartan.curvature(CurvatureKind::H).comps;
    let r_p = triples(n, |a, b, c| {
        p.apply(&[&e[a], &xt[b], &e[c]]) - p.apply(&[&e[b], &xt[a], &e[c]])
    });
    let r_s = triples(n, |a, b, c| s_of(&xt[a], &xt[b], &e[c]));
    let dn_h: Vec<PiTensor> = (0..n)
        .map(|b| cartan.cov_deriv_tensor(&built.frame(Direction::Horizontal(b)), &diff))
        .collect();
    let alt = |a: usize, b: usize, c: usize| {
        column(&dn_h[b], a, c) + nn(&e[b], &nn(&e[a], &e[c])) + nn(&t(&xt[b], &e[a]), &e[c])
    };
    let r_u = triples(n, |a, b, c| alt(a, b, c) - alt(b, a, c));

    let _ = eta;
    let hv_display = Residual::of_terms(
        "hv-curvature display",
        &[&p_bar],
        &[&p, &p_s, &p_dn, &p_nt, &p_flip],
    );
    CurvatureRelations {
        residuals: vec![
            Residual::between("v-curvature", &s_bar, s),
            Residual::of_terms("hv-curvature", &[&p_bar], &[&p, &p_s, &p_dn, &p_nt]),
            Residual::of_terms("h-curvature", &[&r_bar], &[&r, &r_p, &r_s, &r_u]),
        ],
        hv_display,
    }
}

/// `[i][a][b]` from a vector-valued function of two frame indices.
fn pairs(n: usize, f: impl Fn(usize, usize) -> JVec) -> PiTensor {
    let vals: Vec<Vec<JVec>> = (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect();
    PiTensor::from_pairs(&vals)
}

/// `[i][a][b][c]` from a vector-valued function of three frame indices.
pub(crate) fn triples(n: usize, f: impl Fn(usize, usize, usize) -> JVec) -> PiTensor {
    let vals: Vec<Vec<Vec<JVec>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| f(a, b, c)).collect())
                .collect()
        })
        .collect();
    PiTensor::from_fn(n, 1, 3, |ix| vals[ix[1]][ix[2]][ix[3]][ix[0]].clone())
}

/// The vector `t(e_a, e_c)` of a `(1,2)` tensor.
fn column(t: &PiTensor, a: usize, c: usize) -> JVec {
    JVec((0..t.dim()).map(|i| t.get(&[i, a, c]).clone()).collect())
}

fn axis(trip: &Tripathi, j: usize) -> JVec {
    JVec::axis(trip.geo.n, j, trip.geo.like())
}
