//! Bianchi identities of a regular connection, evaluated on frames.

use super::relations::Residual;
use crate::ad::{JVec, PiTensor};
use crate::connection::{ConnectionCoefficients, CurvatureKind, Direction};

/// Tensors entering the identities, with base values of their covariant
/// derivatives along every frame direction.
struct Data {
    n: usize,
    q: PiTensor,
    t: PiTensor,
    r_hat: PiTensor,
    p_hat: PiTensor,
    s_hat: PiTensor,
    r: PiTensor,
    p: PiTensor,
    s: PiTensor,
    dq_h: Vec<PiTensor>,
    dq_v: Vec<PiTensor>,
    dt_h: Vec<PiTensor>,
    ds_h: Vec<PiTensor>,
    dp_h: Vec<PiTensor>,
    dp_v: Vec<PiTensor>,
    dr_h: Vec<PiTensor>,
    dr_v: Vec<PiTensor>,
}

impl Data {
    fn new(conn: &ConnectionCoefficients, transport: &ConnectionCoefficients, eta: &JVec) -> Data {
        let n = conn.dim();
        let tors = conn.torsions(eta);
        let r = conn.curvature(CurvatureKind::H).comps;
        let p = conn.curvature(CurvatureKind::Hv).comps;
        let s = conn.curvature(CurvatureKind::V).comps;
        let along = |dir: fn(usize) -> Direction, t: &PiTensor| -> Vec<PiTensor> {
            (0..n)
                .map(|j| {
                    transport
                        .cov_deriv_tensor(&transport.frame(dir(j)), t)
                        .truncate(0)
                })
                .collect()
        };
        let h = Direction::Horizontal;
        let v = Direction::Vertical;
        Data {
            n,
            dq_h: along(h, &tors.q),
            dq_v: along(v, &tors.q),
            dt_h: along(h, &tors.tt),
            ds_h: along(h, &s),
            dp_h: along(h, &p),
            dp_v: along(v, &p),
            dr_h: along(h, &r),
            dr_v: along(v, &r),
            q: tors.q.truncate(0),
            t: tors.tt.truncate(0),
            r_hat: tors.r_hat.truncate(0),
            p_hat: tors.p_hat.truncate(0),
            s_hat: tors.s_hat.truncate(0),
            r: r.truncate(0),
            p: p.truncate(0),
            s: s.truncate(0),
        }
    }
}

fn at(t: &PiTensor, ix: &[usize]) -> f64 {
    t.get(ix).value()
}

/// `A(e_a, B(e_b, e_c))ⁱ` for two `(1,2)` tensors.
fn nest2(a: &PiTensor, x: usize, b: &PiTensor, y: usize, z: usize, i: usize) -> f64 {
    (0..a.dim())
        .map(|m| at(a, &[i, x, m]) * at(b, &[m, y, z]))
        .sum()
}

/// `A(B(e_a, e_b), e_c)ⁱ` for two `(1,2)` tensors.
fn nest1(a: &PiTensor, b: &PiTensor, x: usize, y: usize, z: usize, i: usize) -> f64 {
    (0..a.dim())
        .map(|m| at(a, &[i, m, z]) * at(b, &[m, x, y]))
        .sum()
}

/// Curvature `K(·,·)W` with a `(1,2)` tensor inserted in slot `slot`.
fn curv_with(
    k: &PiTensor,
    slot: usize,
    inner: &PiTensor,
    ix: [usize; 3],
    others: [usize; 2],
    i: usize,
) -> f64 {
    (0..k.dim())
        .map(|m| {
            let mut idx = [i, others[0], others[1], ix[2]];
            idx[slot] = m;
            at(k, &idx) * at(inner, &[m, ix[0], ix[1]])
        })
        .sum()
}

/// Accumulate `|lhs − rhs| / (1 + scale)` over all frame indices.
fn identity(
    name: &str,
    n: usize,
    arity: usize,
    f: impl Fn(usize, &[usize]) -> (Vec<f64>, Vec<f64>),
) -> Residual {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    let mut idx = vec![0usize; arity];
    for flat in 0..n.pow(arity as u32 + 1) {
        let mut rem = flat;
        for slot in idx.iter_mut() {
            *slot = rem % n;
            rem /= n;
        }
        let i = rem % n;
        let (lhs, rhs) = f(i, &idx);
        scale = lhs.iter().chain(&rhs).fold(scale, |m, v| m.max(v.abs()));
        diff = diff.max((lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>()).abs());
    }
    Residual {
        name: name.to_string(),
        value: diff / (1.0 + scale),
        scale,
    }
}

/// The five identities at the base point, plus the v-curvature identity
/// with the sign of its `(D̄_{γY}P̄)(Z,X,W)` term as displayed, which the
/// mixed cyclic identity does not support.
#[derive(Clone, Debug)]
pub struct BianchiResiduals {
    pub residuals: Vec<Residual>,
    pub v_curvature_display: Residual,
}

pub fn bianchi_identities(conn: &ConnectionCoefficients, eta: &JVec) -> BianchiResiduals {
    bianchi_identities_transported(conn, conn, eta)
}

/// As [`bianchi_identities`], with the covariant derivatives of the torsions
/// and curvatures of `conn` taken by `transport`. The identities hold for
/// every connection, so feeding a different `transport` is how a sensitivity
/// control can make them fail.
pub fn bianchi_identities_transported(
    conn: &ConnectionCoefficients,
    transport: &ConnectionCoefficients,
    eta: &JVec,
) -> BianchiResiduals {
    let d = Data::new(conn, transport, eta);
    let n = d.n;
    BianchiResiduals {
        residuals: vec![
            first(&d, n),
            second(&d, n),
            third(&d, n, -1.0),
            fourth(&d, n),
            fifth(&d, n),
        ],
        v_curvature_display: third(&d, n, 1.0),
    }
}

/// `P̄(X,Y)Z − P̄(Z,Y)X` against torsion derivatives.
fn first(d: &Data, n: usize) -> Residual {
    identity("bianchi hv torsion", n, 3, |i, ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        let lhs = vec![at(&d.p, &[i, x, y, z]), -at(&d.p, &[i, z, y, x])];
        let rhs = vec![
            at(&d.dt_h[z], &[i, y, x]),
            -at(&d.dt_h[x], &[i, y, z]),
            -at(&d.dq_v[y], &[i, z, x]),
            nest2(&d.t, y, &d.q, z, x, i),
            -nest1(&d.t, &d.p_hat, z, y, x, i),
            nest1(&d.t, &d.p_hat, x, y, z, i),
            -nest2(&d.q, z, &d.t, y, x, i),
            nest2(&d.q, x, &d.t, y, z, i),
        ];
        (lhs, rhs)
    })
}

/// Cyclic identity for the h-curvature.
fn second(d: &Data, n: usize) -> Residual {
    identity("bianchi h cyclic", n, 3, |i, ix| {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (x, y, z) in [
            (ix[0], ix[1], ix[2]),
            (ix[1], ix[2], ix[0]),
            (ix[2], ix[0], ix[1]),
        ] {
            lhs.push(at(&d.r, &[i, x, y, z]));
            lhs.push(-nest1(&d.t, &d.r_hat, x, y, z, i));
            rhs.push(nest2(&d.q, x, &d.q, y, z, i));
            rhs.push(-at(&d.dq_h[x], &[i, y, z]));
        }
        (lhs, rhs)
    })
}

/// Horizontal derivative of the v-curvature; `dp_sign` multiplies the
/// `(D̄_{γY}P̄)(Z,X,W)` term inside the alternation.
fn third(d: &Data, n: usize, dp_sign: f64) -> Residual {
    let name = if dp_sign < 0.0 {
        "bianchi v-curvature"
    } else {
        "bianchi v-curvature display"
    };
    identity(name, n, 4, |i, ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        let lhs = vec![
            at(&d.ds_h[z], &[i, x, y, w]),
            -curv_with(&d.p, 2, &d.s_hat, [x, y, w], [z, 0], i),
        ];
        let mut rhs = Vec::new();
        for (sign, a, b) in [(1.0, x, y), (-1.0, y, x)] {
            rhs.push(dp_sign * sign * at(&d.dp_v[b], &[i, z, a, w]));
            rhs.push(sign * curv_with(&d.p, 1, &d.t, [a, z, w], [0, b], i));
            rhs.push(sign * curv_with(&d.s, 1, &d.p_hat, [z, a, w], [0, b], i));
        }
        (lhs, rhs)
    })
}

/// Vertical derivative of the h-curvature.
fn fourth(d: &Data, n: usize) -> Residual {
    identity("bianchi hv-curvature", n, 4, |i, ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        let lhs = vec![at(&d.dr_v[x], &[i, y, z, w])];
        let mut rhs = vec![
            curv_with(&d.s, 1, &d.r_hat, [y, z, w], [0, x], i),
            -curv_with(&d.p, 1, &d.q, [y, z, w], [0, x], i),
        ];
        for (sign, a, b) in [(1.0, y, z), (-1.0, z, y)] {
            // 𝔘_{Z,Y}: B(Z,Y) − B(Y,Z) with B(Z,Y) = (D̄_{β̄Z}P̄)(Y,X,W) + …
            let (zz, yy) = (b, a);
            rhs.push(sign * at(&d.dp_h[zz], &[i, yy, x, w]));
            rhs.push(sign * curv_with(&d.p, 2, &d.p_hat, [yy, x, w], [zz, 0], i));
            rhs.push(sign * curv_with(&d.r, 1, &d.t, [x, zz, w], [0, yy], i));
        }
        (lhs, rhs)
    })
}

/// Cyclic horizontal derivative of the h-curvature.
fn fifth(d: &Data, n: usize) -> Residual {
    identity("bianchi h-curvature", n, 4, |i, ix| {
        let w = ix[3];
        let mut lhs = Vec::new();
        for (x, y, z) in [
            (ix[0], ix[1], ix[2]),
            (ix[1], ix[2], ix[0]),
            (ix[2], ix[0], ix[1]),
        ] {
            lhs.push(at(&d.dr_h[x], &[i, y, z, w]));
            lhs.push(curv_with(&d.p, 2, &d.r_hat, [y, z, w], [x, 0], i));
            lhs.push(curv_with(&d.r, 1, &d.q, [x, y, w], [0, z], i));
        }
        (lhs, vec![0.0])
    })
}
