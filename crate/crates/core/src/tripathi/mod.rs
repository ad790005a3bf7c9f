//! The generalized Tripathi connection built from the Cartan connection.

pub mod bianchi;
mod params;
pub mod relations;

pub use params::{EndoParam, FormParam, ParamValues, Part, TripathiParams};

use crate::ad::tensor::mat_vec;
use crate::ad::{JVec, Jet, PiTensor};
use crate::connection::ConnectionCoefficients;
use crate::error::Result;
use crate::finsler::{ChartPoint, FinslerStructure, LocalGeometry};
use params::lowered_endo;

/// Symmetric and antisymmetric parts of `φ` with respect to `g`.
#[derive(Clone, Debug)]
pub struct PhiSplit {
    pub phi1: PiTensor,
    pub phi2: PiTensor,
}

/// `ā`, `b̄`, `ū` with `g(ā, X) = A(X)` and so on.
#[derive(Clone, Debug)]
pub struct RaisedVectors {
    pub a: JVec,
    pub b: JVec,
    pub u: JVec,
}

/// Split `φ` so that `g(φ₁X, Y)` is symmetric and `g(φ₂X, Y)` antisymmetric.
pub fn split_phi(phi: &PiTensor, g: &PiTensor, g_inv: &PiTensor) -> PhiSplit {
    let n = phi.dim();
    let m = lowered_endo(phi, g);
    let part = |sign: f64| {
        let half = PiTensor::from_fn(n, 0, 2, |ix| {
            (m.get(&[ix[0], ix[1]]) + m.get(&[ix[1], ix[0]]).scale(sign)).scale(0.5)
        });
        // φᵐ_j = gᵐᵏ M_jk
        PiTensor::from_fn(n, 1, 1, |ix| {
            let mut acc = g_inv.get(&[ix[0], 0]) * half.get(&[ix[1], 0]);
            for k in 1..n {
                acc = acc + g_inv.get(&[ix[0], k]) * half.get(&[ix[1], k]);
            }
            acc
        })
    };
    PhiSplit {
        phi1: part(1.0),
        phi2: part(-1.0),
    }
}

/// `S(e_a, e_b) e_c` of the Cartan connection, `Sⁱ_abc = Tⁱ_am Tᵐ_bc − Tⁱ_bm Tᵐ_ac`.
pub fn cartan_v_curvature(t: &PiTensor) -> PiTensor {
    let n = t.dim();
    PiTensor::from_fn(n, 1, 3, |ix| {
        let (i, a, b, c) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = t.get(&[i, a, 0]) * t.get(&[0, b, c]) - t.get(&[i, b, 0]) * t.get(&[0, a, c]);
        for m in 1..n {
            acc =
                acc + t.get(&[i, a, m]) * t.get(&[m, b, c]) - t.get(&[i, b, m]) * t.get(&[m, a, c]);
        }
        acc
    })
}

/// Everything needed to evaluate the Tripathi formulas about one point.
#[derive(Clone, Debug)]
pub struct Tripathi<'g> {
    pub geo: &'g LocalGeometry,
    pub values: ParamValues,
    pub split: PhiSplit,
    pub raised: RaisedVectors,
    /// Cartan v-curvature `S`.
    pub s: PiTensor,
    eta: JVec,
}

impl<'g> Tripathi<'g> {
    pub fn new(geo: &'g LocalGeometry, params: &TripathiParams) -> Result<Tripathi<'g>> {
        let values = params.eval(geo)?;
        let split = split_phi(&values.phi, &geo.g, &geo.g_inv);
        let raised = RaisedVectors {
            a: geo.raise(&values.a),
            b: geo.raise(&values.b),
            u: geo.raise(&values.u),
        };
        Ok(Tripathi {
            geo,
            values,
            split,
            raised,
            s: cartan_v_curvature(&geo.t),
            eta: geo.eta(),
        })
    }

    pub fn eta(&self) -> &JVec {
        &self.eta
    }

    pub(crate) fn l(&self) -> &Jet {
        &self.geo.l
    }

    pub(crate) fn t(&self, x: &JVec, y: &JVec) -> JVec {
        self.geo.t.apply(&[x, y])
    }

    /// The totally symmetric Cartan tensor `𝐓(X, Y, Z) = g(T(X, Y), Z)`.
    pub(crate) fn tt(&self, x: &JVec, y: &JVec, z: &JVec) -> Jet {
        self.geo.c.eval(&[x, y, z])
    }

    pub(crate) fn s(&self, x: &JVec, y: &JVec, z: &JVec) -> JVec {
        self.s.apply(&[x, y, z])
    }

    pub(crate) fn g(&self, x: &JVec, y: &JVec) -> Jet {
        self.geo.inner(x, y)
    }

    pub(crate) fn ell(&self, x: &JVec) -> Jet {
        self.geo.ell_of(x)
    }

    pub fn phi1(&self, x: &JVec) -> JVec {
        mat_vec(&self.split.phi1, x)
    }

    pub fn phi2(&self, x: &JVec) -> JVec {
        mat_vec(&self.split.phi2, x)
    }

    pub(crate) fn a_of(&self, x: &JVec) -> Jet {
        self.values.a.dot(x)
    }

    pub(crate) fn u_of(&self, x: &JVec) -> Jet {
        self.values.u.dot(x)
    }

    /// `η̄_t`, the deformation of the position vector.
    pub fn eta_t(&self) -> JVec {
        let (eta, l) = (&self.eta, self.l());
        let l2 = l * l;
        let RaisedVectors { a, b, u } = &self.raised;
        let p1e = self.phi1(eta);
        let p2e = self.phi2(eta);
        let f1_part = (eta * (self.a_of(eta) * 2.0) - a * &l2) * &self.values.f1;
        let f2_part = b * (&l2 * &self.values.f2);
        f1_part + f2_part + u * (l * self.ell(&p1e)) - (p1e - p2e) * self.u_of(eta)
    }

    /// The deformation `X_t` with `β̄X = βX + γX_t`.
    pub fn x_t(&self, x: &JVec) -> JVec {
        let (eta, l) = (&self.eta, self.l());
        let l2 = l * l;
        let RaisedVectors { a, b, u } = &self.raised;
        let (f1, f2) = (&self.values.f1, &self.values.f2);
        let lx = l * self.ell(x);
        let f1_part = (eta * self.a_of(x) + x * self.a_of(eta) - a * &lx + self.t(a, x) * &l2) * f1;
        let f2_part = (b * &lx - self.t(b, x) * &l2) * f2;
        let p1e = self.phi1(eta);
        let mixed = &self.phi2(eta) - &p1e;
        let u_eta = (self.phi1(x) + self.t(&mixed, x)) * self.u_of(eta);
        let l_part = (u * self.ell(&self.phi1(x)) - self.t(u, x) * self.ell(&p1e)) * l;
        f1_part + f2_part - u_eta + l_part + self.phi2(eta) * self.u_of(x)
    }

    /// Shared groups of the difference tensor; `sign` is the sign of the
    /// `u(η̄)φ₁(T(X, Y))` term.
    fn difference_with(&self, x: &JVec, y: &JVec, sign: f64) -> JVec {
        let (eta, l) = (&self.eta, self.l());
        let l2 = l * l;
        let RaisedVectors { a, b, u } = &self.raised;
        let (f1, f2) = (&self.values.f1, &self.values.f2);
        let gxy = self.g(x, y);
        let ly = l * self.ell(y);

        let f1_part = a * &gxy - y * self.a_of(x) - x * self.a_of(y) - self.t(a, x) * &ly
            + eta * self.tt(a, x, y)
            + self.s(x, a, y) * &l2;
        let f2_part =
            b * &gxy - self.t(b, x) * &ly + eta * self.tt(b, x, y) + self.s(x, b, y) * &l2;

        let p1e = self.phi1(eta);
        let p2e = self.phi2(eta);
        let p1x = self.phi1(x);
        let p1y = self.phi1(y);
        let mixed = &p1e - &p2e;

        let u_coef = self.g(&p1x, y) + self.tt(&p2e, x, y);
        let u_eta_group = self.s(&mixed, x, y) + self.t(&p1y, x) - self.phi1(&self.t(x, y)) * sign;
        let u_y_group = self.t(&p2e, x) + p1x;

        f1_part * f1 - f2_part * f2 - u * u_coef - self.phi2(y) * self.u_of(x)
            + self.t(u, x) * (l * self.ell(&p1y))
            - u_eta_group * self.u_of(eta)
            + u_y_group * self.u_of(y)
            + self.s(u, x, y) * (l * self.ell(&p1e))
            - p1e * self.tt(u, x, y)
    }

    /// The difference tensor `N(X, Y) = D̄_{β̄X} Y − ∇_{β̄X} Y`.
    pub fn difference(&self, x: &JVec, y: &JVec) -> JVec {
        self.difference_with(x, y, 1.0)
    }

    /// The difference tensor read literally from the expanded `D̄` display,
    /// which carries the opposite sign on `u(η̄)φ₁(T(X, Y))`.
    pub fn difference_expanded(&self, x: &JVec, y: &JVec) -> JVec {
        self.difference_with(x, y, -1.0)
    }

    pub(crate) fn axis(&self, j: usize) -> JVec {
        JVec::axis(self.geo.n, j, self.geo.like())
    }

    /// `N(e_j, e_k)ⁱ` as `[i][j][k]`.
    pub fn difference_tensor(&self) -> PiTensor {
        let n = self.geo.n;
        let cols: Vec<Vec<JVec>> = (0..n)
            .map(|j| {
                let ej = self.axis(j);
                (0..n)
                    .map(|k| self.difference(&ej, &self.axis(k)))
                    .collect()
            })
            .collect();
        PiTensor::from_pairs(&cols)
    }

    /// `(e_j)_tⁱ` as `[i][j]`.
    pub fn deformation(&self) -> PiTensor {
        let cols: Vec<JVec> = (0..self.geo.n).map(|j| self.x_t(&self.axis(j))).collect();
        PiTensor::from_columns(&cols)
    }

    /// Coefficients of `D̄`: `V̄ = T`, `N̄ = N − X_t`, `H̄ = Γ* + X_t·T + N`.
    pub fn build(&self) -> ConnectionCoefficients {
        let n = self.geo.n;
        let xt = self.deformation();
        let diff = self.difference_tensor();
        let nl = &self.geo.barthel - &xt;
        let t = &self.geo.t;
        let h = PiTensor::from_fn(n, 1, 2, |ix| {
            let (i, j, k) = (ix[0], ix[1], ix[2]);
            let mut acc = self.geo.gamma.get(ix) + diff.get(ix);
            for m in 0..n {
                acc = acc + xt.get(&[m, j]) * t.get(&[i, m, k]);
            }
            acc
        });
        ConnectionCoefficients::new(nl, h, t.clone())
    }

    /// `Ḡ = G − ½ η̄_t`.
    pub fn spray(&self) -> JVec {
        &self.geo.spray - &(self.eta_t() * 0.5)
    }

    /// `N̄ⁱ_j` expanded term by term from the deformed horizontal map.
    pub fn nonlinear_expanded(&self) -> PiTensor {
        let n = self.geo.n;
        let (eta, l) = (&self.eta, self.l());
        let l2 = l * l;
        let RaisedVectors { a, b, u } = &self.raised;
        let (f1, f2) = (&self.values.f1, &self.values.f2);
        let p1e = self.phi1(eta);
        let p2e = self.phi2(eta);
        let u_eta = self.u_of(eta);
        let cols: Vec<JVec> = (0..n)
            .map(|j| {
                let x = self.axis(j);
                let lx = l * self.ell(&x);
                let terms = [
                    eta * (f1 * self.a_of(&x)),
                    &x * (f1 * self.a_of(eta)),
                    -(a * (f1 * &lx)),
                    self.t(a, &x) * (f1 * &l2),
                    b * (f2 * &lx),
                    -(self.t(b, &x) * (f2 * &l2)),
                    -(self.phi1(&x) * &u_eta),
                    self.t(&p1e, &x) * &u_eta,
                    -(self.t(&p2e, &x) * &u_eta),
                    u * (l * self.ell(&self.phi1(&x))),
                    -(self.t(u, &x) * (l * self.ell(&p1e))),
                    &p2e * self.u_of(&x),
                ];
                let mut col = self.geo.barthel.apply(&[&x]);
                for term in terms {
                    col = col - term;
                }
                col
            })
            .collect();
        PiTensor::from_columns(&cols)
    }
}

/// Build `D̄` about `p` from an `L` jet of the given order.
pub fn build_at(
    f: &FinslerStructure,
    params: &TripathiParams,
    p: &ChartPoint,
    order: usize,
) -> Result<ConnectionCoefficients> {
    let geo = LocalGeometry::new(f, p, order)?;
    Ok(Tripathi::new(&geo, params)?.build())
}
