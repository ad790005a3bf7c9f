//! Regular connections on the pullback bundle, represented by coefficient
//! jets `(N, H, V)` about a point, with torsion and curvature evaluated from
//! their operator definitions.
//!
//! Vector fields on the tangent bundle are component arrays in the
//! coordinate basis `(∂x¹..∂xⁿ, ∂y¹..∂yⁿ)`. The frames are
//! `δ̄_j = ∂x^j − Nᵐ_j ∂y^m` and `∂y^j`. The curvature operator is
//! `𝕂(X,Y)Z = −D_X D_Y Z + D_Y D_X Z + D_[X,Y] Z`.

mod curvature;
mod torsion;

pub use curvature::{CurvatureKind, CurvatureValue};
pub use torsion::TorsionBundle;

use crate::ad::tensor::mat_vec;
use crate::ad::{JVec, Jet, PiTensor};

/// A vector field on the tangent bundle near the point.
#[derive(Clone, Debug, PartialEq)]
pub struct TmField(pub Vec<Jet>);

impl TmField {
    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    /// `ρX`, the base part.
    pub fn rho(&self) -> JVec {
        JVec(self.0[..self.dim()].to_vec())
    }

    pub fn vertical_part(&self) -> JVec {
        JVec(self.0[self.dim()..].to_vec())
    }

    /// `X(f)`.
    pub fn apply(&self, f: &Jet) -> Jet {
        let mut acc: Option<Jet> = None;
        for (a, xa) in self.0.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            let term = xa * f.d(a);
            acc = Some(match acc {
                Some(s) => s + term,
                None => term,
            });
        }
        acc.unwrap_or_else(|| f.zero_like())
    }

    /// `X(Z)` componentwise.
    pub fn apply_vec(&self, z: &JVec) -> JVec {
        JVec(z.0.iter().map(|c| self.apply(c)).collect())
    }

    pub fn scale(&self, s: &Jet) -> TmField {
        TmField(self.0.iter().map(|c| c * s).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, c| m.max(c.value().abs()))
    }
}

impl std::ops::Add for &TmField {
    type Output = TmField;
    fn add(self, o: &TmField) -> TmField {
        TmField(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Sub for &TmField {
    type Output = TmField;
    fn sub(self, o: &TmField) -> TmField {
        TmField(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

/// Lie bracket `[X, Y]`.
pub fn bracket(x: &TmField, y: &TmField) -> TmField {
    TmField(
        x.0.iter()
            .zip(&y.0)
            .map(|(xa, ya)| x.apply(ya) - y.apply(xa))
            .collect(),
    )
}

/// A frame direction on the tangent bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `δ̄_j`
    Horizontal(usize),
    /// `∂y^j`
    Vertical(usize),
}

/// Coefficients of a regular connection:
/// `D_{δ̄_j} e_k = Hⁱ_jk e_i`, `D_{∂y^j} e_k = Vⁱ_jk e_i`, frames built from `Nⁱ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCoefficients {
    /// `Nⁱ_j` stored `[i][j]`.
    pub nl: PiTensor,
    /// `Hⁱ_jk` stored `[i][j][k]`.
    pub h: PiTensor,
    /// `Vⁱ_jk` stored `[i][j][k]`.
    pub v: PiTensor,
}

impl ConnectionCoefficients {
    pub fn new(nl: PiTensor, h: PiTensor, v: PiTensor) -> Self {
        ConnectionCoefficients { nl, h, v }
    }

    pub fn dim(&self) -> usize {
        self.nl.dim()
    }

    /// Smallest jet order among the coefficients.
    pub fn order(&self) -> usize {
        self.nl.order().min(self.h.order()).min(self.v.order())
    }

    pub fn truncate(&self, order: usize) -> Self {
        ConnectionCoefficients {
            nl: self.nl.truncate(order),
            h: self.h.truncate(order),
            v: self.v.truncate(order),
        }
    }

    /// Largest difference between base values of corresponding coefficients.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.nl
            .max_abs_diff(&other.nl)
            .max(self.h.max_abs_diff(&other.h))
            .max(self.v.max_abs_diff(&other.v))
    }

    fn like(&self) -> &Jet {
        self.nl.get(&[0, 0])
    }

    fn constant(&self, v: f64) -> Jet {
        self.like().lift(v)
    }

    /// `δ̄_j` or `∂y^j`.
    pub fn frame(&self, dir: Direction) -> TmField {
        let n = self.dim();
        let zero = self.constant(0.0);
        let mut comps = vec![zero; 2 * n];
        match dir {
            Direction::Horizontal(j) => {
                comps[j] = self.constant(1.0);
                for m in 0..n {
                    comps[n + m] = -self.nl.get(&[m, j]);
                }
            }
            Direction::Vertical(j) => comps[n + j] = self.constant(1.0),
        }
        TmField(comps)
    }

    /// Horizontal lift `βZ = Zʲ δ̄_j`.
    pub fn horizontal_lift(&self, z: &JVec) -> TmField {
        let n = self.dim();
        let mut comps: Vec<Jet> = z.0.clone();
        for m in 0..n {
            let mut acc = -(self.nl.get(&[m, 0]) * &z.0[0]);
            for j in 1..n {
                acc = acc - self.nl.get(&[m, j]) * &z.0[j];
            }
            comps.push(acc);
        }
        TmField(comps)
    }

    /// Vertical lift `γZ = Zʲ ∂y^j`.
    pub fn vertical_lift(&self, z: &JVec) -> TmField {
        let zero = z.0[0].zero_like();
        let mut comps = vec![zero; z.len()];
        comps.extend(z.0.iter().cloned());
        TmField(comps)
    }

    /// Connection matrix `ω(X)ⁱ_k` with `D_X Z = X(Z) + ω(X) Z`.
    pub fn omega(&self, x: &TmField) -> PiTensor {
        let n = self.dim();
        // vertical components relative to the horizontal frame
        let vert: Vec<Jet> = (0..n)
            .map(|m| {
                let mut acc = x.0[n + m].clone();
                for a in 0..n {
                    if !x.0[a].is_zero() {
                        acc = acc + self.nl.get(&[m, a]) * &x.0[a];
                    }
                }
                acc
            })
            .collect();
        PiTensor::from_fn(n, 1, 1, |ix| {
            let (i, k) = (ix[0], ix[1]);
            let mut acc: Option<Jet> = None;
            let mut add = |t: Jet| {
                acc = Some(match acc.take() {
                    Some(s) => s + t,
                    None => t,
                })
            };
            for a in 0..n {
                if !x.0[a].is_zero() {
                    add(&x.0[a] * self.h.get(&[i, a, k]));
                }
            }
            for m in 0..n {
                if !vert[m].is_zero() {
                    add(&vert[m] * self.v.get(&[i, m, k]));
                }
            }
            acc.unwrap_or_else(|| self.like().zero_like())
        })
    }

    /// `D_X Z` for a π-vector field `Z`.
    pub fn cov_deriv(&self, x: &TmField, z: &JVec) -> JVec {
        let w = self.omega(x);
        let lin = mat_vec(&w, z);
        let der = x.apply_vec(z);
        JVec(der.0.iter().zip(&lin.0).map(|(a, b)| a + b).collect())
    }

    pub fn cov_deriv_dir(&self, dir: Direction, z: &JVec) -> JVec {
        self.cov_deriv(&self.frame(dir), z)
    }

    /// Connection map `K(X) = D_X η̄`.
    pub fn connection_map(&self, x: &TmField, eta: &JVec) -> JVec {
        self.cov_deriv(x, eta)
    }

    /// `D_X T` for a π-tensor with at most one contravariant index.
    pub fn cov_deriv_tensor(&self, x: &TmField, t: &PiTensor) -> PiTensor {
        let n = self.dim();
        let w = self.omega(x);
        let (up, down) = (t.up(), t.down());
        PiTensor::from_fn(n, up, down, |ix| {
            let mut acc = x.apply(t.get(ix));
            let mut idx = ix.to_vec();
            if up == 1 {
                for m in 0..n {
                    idx[0] = m;
                    let c = t.get(&idx);
                    if !c.is_zero() {
                        acc = acc + w.get(&[ix[0], m]) * c;
                    }
                }
                idx[0] = ix[0];
            }
            for slot in up..up + down {
                for m in 0..n {
                    idx[slot] = m;
                    let c = t.get(&idx);
                    if !c.is_zero() {
                        acc = acc - w.get(&[m, ix[slot]]) * c;
                    }
                }
                idx[slot] = ix[slot];
            }
            acc
        })
    }

    /// Torsion `𝕋(X,Y) = D_X ρY − D_Y ρX − ρ[X,Y]`.
    pub fn torsion_op(&self, x: &TmField, y: &TmField) -> JVec {
        let a = self.cov_deriv(x, &y.rho());
        let b = self.cov_deriv(y, &x.rho());
        let c = bracket(x, y).rho();
        JVec(
            a.0.iter()
                .zip(&b.0)
                .zip(&c.0)
                .map(|((a, b), c)| a - b - c)
                .collect(),
        )
    }

    /// Curvature `𝕂(X,Y)Z` of a π-vector field `Z`.
    pub fn curvature_op(&self, x: &TmField, y: &TmField, z: &JVec) -> JVec {
        let dxdy = self.cov_deriv(x, &self.cov_deriv(y, z));
        let dydx = self.cov_deriv(y, &self.cov_deriv(x, z));
        let br = self.cov_deriv(&bracket(x, y), z);
        JVec(
            dxdy.0
                .iter()
                .zip(&dydx.0)
                .zip(&br.0)
                .map(|((a, b), c)| b - a + c)
                .collect(),
        )
    }

    /// Metric deficits `(D_{δ̄_j} g)(e_k, e_l)` and `(D_{∂y^j} g)(e_k, e_l)`,
    /// stored `[j][k][l]`.
    pub fn metric_deficit(&self, g: &PiTensor) -> (PiTensor, PiTensor) {
        let n = self.dim();
        let deficit = |dir: fn(usize) -> Direction| {
            let per: Vec<PiTensor> = (0..n)
                .map(|j| self.cov_deriv_tensor(&self.frame(dir(j)), g))
                .collect();
            PiTensor::from_fn(n, 0, 3, |ix| per[ix[0]].get(&[ix[1], ix[2]]).clone())
        };
        (deficit(Direction::Horizontal), deficit(Direction::Vertical))
    }

    /// Torsions evaluated on the frames.
    pub fn torsions(&self, eta: &JVec) -> TorsionBundle {
        torsion::torsions(self, eta)
    }

    /// Full curvature tensor of one kind.
    pub fn curvature(&self, kind: CurvatureKind) -> CurvatureValue {
        curvature::curvature(self, kind)
    }

    /// `𝕂(frame_j, frame_k) Z` for a π-vector field `Z`.
    pub fn curvature_on(&self, kind: CurvatureKind, j: usize, k: usize, z: &JVec) -> JVec {
        let (a, b) = kind.frames(j, k);
        self.curvature_op(&self.frame(a), &self.frame(b), z)
    }

    /// Contracted curvature `𝕂(frame_j, frame_k) η̄`, stored `[i][j][k]`.
    pub fn contracted(&self, kind: CurvatureKind, eta: &JVec) -> PiTensor {
        let n = self.dim();
        let vals: Vec<Vec<JVec>> = (0..n)
            .map(|j| (0..n).map(|k| self.curvature_on(kind, j, k, eta)).collect())
            .collect();
        PiTensor::from_pairs(&vals)
    }
}

/// Horizontal Ricci tensor as a `(1,1)` tensor: `Ric_jk = Σ_i Rⁱ(e_j, e_i) e_k`
/// raised with `g⁻¹` on the first index.
pub fn ricci_horizontal(h_curv: &CurvatureValue, g_inv: &PiTensor) -> PiTensor {
    let n = h_curv.comps.dim();
    let ric = PiTensor::from_fn(n, 0, 2, |ix| {
        let (j, k) = (ix[0], ix[1]);
        let mut acc = h_curv.comps.get(&[0, j, 0, k]).clone();
        for i in 1..n {
            acc = acc + h_curv.comps.get(&[i, j, i, k]);
        }
        acc
    });
    PiTensor::from_fn(n, 1, 1, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut acc = g_inv.get(&[i, 0]) * ric.get(&[j, 0]);
        for k in 1..n {
            acc = acc + g_inv.get(&[i, k]) * ric.get(&[j, k]);
        }
        acc
    })
}
