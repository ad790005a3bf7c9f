use super::{bracket, ConnectionCoefficients, Direction};
use crate::ad::tensor::mat_mul;
use crate::ad::{JVec, PiTensor};

/// Which pair of frames the curvature is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurvatureKind {
    /// `R`: `(δ̄_j, δ̄_k)`
    H,
    /// `P`: `(δ̄_j, ∂y^k)`
    Hv,
    /// `S`: `(∂y^j, ∂y^k)`
    V,
}

impl CurvatureKind {
    pub fn frames(self, j: usize, k: usize) -> (Direction, Direction) {
        match self {
            CurvatureKind::H => (Direction::Horizontal(j), Direction::Horizontal(k)),
            CurvatureKind::Hv => (Direction::Horizontal(j), Direction::Vertical(k)),
            CurvatureKind::V => (Direction::Vertical(j), Direction::Vertical(k)),
        }
    }
}

/// Curvature tensor `comps[i][a][b][c] = (𝕂(frame_a, frame_b) e_c)ⁱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureValue {
    pub kind: CurvatureKind,
    pub comps: PiTensor,
}

impl CurvatureValue {
    /// Evaluate on π-vectors `(X, Y, Z)`.
    pub fn apply(&self, x: &JVec, y: &JVec, z: &JVec) -> JVec {
        self.comps.apply(&[x, y, z])
    }
}

pub(super) fn curvature(conn: &ConnectionCoefficients, kind: CurvatureKind) -> CurvatureValue {
    let n = conn.dim();
    let antisymmetric = kind != CurvatureKind::Hv;
    let mut blocks: Vec<Vec<Option<PiTensor>>> = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if antisymmetric && b < a {
                continue;
            }
            let (da, db) = kind.frames(a, b);
            let (x, y) = (conn.frame(da), conn.frame(db));
            let (wx, wy) = (conn.omega(&x), conn.omega(&y));
            let wb = conn.omega(&bracket(&x, &y));
            // 𝕂(X,Y) e_c = −X(ω_Y) − ω_X ω_Y + Y(ω_X) + ω_Y ω_X + ω_[X,Y]
            let xwy = wy.map(|c| x.apply(c));
            let ywx = wx.map(|c| y.apply(c));
            let m = &(&(&(&ywx - &xwy) + &mat_mul(&wy, &wx)) - &mat_mul(&wx, &wy)) + &wb;
            blocks[a][b] = Some(m);
        }
    }
    let comps = PiTensor::from_fn(n, 1, 3, |ix| {
        let (i, a, b, c) = (ix[0], ix[1], ix[2], ix[3]);
        match &blocks[a][b] {
            Some(m) => m.get(&[i, c]).clone(),
            None => -blocks[b][a]
                .as_ref()
                .expect("upper block computed")
                .get(&[i, c]),
        }
    });
    CurvatureValue { kind, comps }
}
