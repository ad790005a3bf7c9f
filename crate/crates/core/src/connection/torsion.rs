use super::{bracket, ConnectionCoefficients, Direction};
use crate::ad::{JVec, PiTensor};

/// Torsions of a connection on the frames, each stored `[i][j][k]`.
///
/// `q` and `tt` come from the torsion operator on `(δ̄_j, δ̄_k)` and
/// `(∂y^j, δ̄_k)`. The contracted torsions are formed from commutators
/// through the connection map `K`:
/// `R̂(j,k) = K[δ̄_j, δ̄_k]`, `P̂(j,k) = K[δ̄_j, ∂y^k] − D_{δ̄_j} K(∂y^k)` and
/// `Ŝ(j,k) = K[∂y^j, ∂y^k] − D_{∂y^j} K(∂y^k) + D_{∂y^k} K(∂y^j)`, which agree
/// with the curvature applied to `η̄` whenever `K` annihilates `δ̄_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionBundle {
    pub q: PiTensor,
    pub tt: PiTensor,
    pub r_hat: PiTensor,
    pub p_hat: PiTensor,
    pub s_hat: PiTensor,
}

pub(super) fn torsions(conn: &ConnectionCoefficients, eta: &JVec) -> TorsionBundle {
    let n = conn.dim();
    let h: Vec<_> = (0..n)
        .map(|j| conn.frame(Direction::Horizontal(j)))
        .collect();
    let v: Vec<_> = (0..n).map(|j| conn.frame(Direction::Vertical(j))).collect();
    let k_map = |x: &super::TmField| conn.connection_map(x, eta);
    let kv: Vec<JVec> = v.iter().map(k_map).collect();

    let table = |f: &dyn Fn(usize, usize) -> JVec| {
        let vals: Vec<Vec<JVec>> = (0..n).map(|j| (0..n).map(|k| f(j, k)).collect()).collect();
        PiTensor::from_pairs(&vals)
    };
    let sub = |a: JVec, b: JVec| JVec(a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect());

    let q = table(&|j, k| conn.torsion_op(&h[j], &h[k]));
    let tt = table(&|j, k| conn.torsion_op(&v[j], &h[k]));
    let r_hat = table(&|j, k| k_map(&bracket(&h[j], &h[k])));
    let p_hat = table(&|j, k| sub(k_map(&bracket(&h[j], &v[k])), conn.cov_deriv(&h[j], &kv[k])));
    let s_hat = table(&|j, k| {
        let a = sub(k_map(&bracket(&v[j], &v[k])), conn.cov_deriv(&v[j], &kv[k]));
        let b = conn.cov_deriv(&v[k], &kv[j]);
        JVec(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
    });
    TorsionBundle {
        q,
        tt,
        r_hat,
        p_hat,
        s_hat,
    }
}
