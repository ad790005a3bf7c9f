use super::{check_positive, ChartPoint, FinslerStructure};
use crate::ad::tensor::{coordinate_jets, mat_inverse, mat_vec};
use crate::ad::{JVec, Jet, PiTensor, Table, MAX_ORDER};
use crate::connection::ConnectionCoefficients;
use crate::error::{Error, Result};

/// Metric-level data about one point as jets in the chart offsets.
///
/// With `K` the order of the jet of `L`: `g` and `ℓ` have order `K − 2`,
/// the spray `K − 2`, and `C`, `T`, `N`, `Γ*` order `K − 3`.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub n: usize,
    pub order: usize,
    pub point: ChartPoint,
    /// Coordinate jets `(x, y)`.
    pub vars: Vec<Jet>,
    pub l: Jet,
    pub g: PiTensor,
    /// Inverse metric, stored with the layout of `g`.
    pub g_inv: PiTensor,
    /// `ℓ_i = g_ij yʲ / L`.
    pub ell: JVec,
    pub c: PiTensor,
    pub t: PiTensor,
    pub spray: JVec,
    pub barthel: PiTensor,
    pub gamma: PiTensor,
}

impl LocalGeometry {
    pub fn new(f: &FinslerStructure, p: &ChartPoint, order: usize) -> Result<LocalGeometry> {
        f.check_point(p)?;
        if order < 2 {
            return Err(Error::Config(
                "local geometry needs an L jet of order at least 2".into(),
            ));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                requested: order,
                max: MAX_ORDER,
            });
        }
        let n = f.dim();
        let table = Table::get(2 * n);
        let vars = coordinate_jets(table, order, &p.coords());
        let l = f.function().jet(&vars)?;
        let l2 = &l * &l;
        let dy: Vec<Jet> = (0..n).map(|i| l2.d(n + i)).collect();

        let g = PiTensor::from_fn(n, 0, 2, |ix| dy[ix[0]].d(n + ix[1]).scale(0.5));
        check_positive(&g.matrix_values(), p)?;
        let g_inv = mat_inverse(&g).ok_or_else(|| Error::Degenerate {
            point: p.to_string(),
            message: "fundamental tensor is singular".into(),
        })?;

        let y = JVec(vars[n..].to_vec());
        let ell = {
            let gy = mat_vec(&g, &y);
            JVec(gy.0.iter().map(|c| c / &l).collect())
        };

        // Gⁱ = ¼ gⁱˡ (yᵐ ∂²L²/∂yˡ∂xᵐ − ∂L²/∂xˡ)
        let inner = JVec(
            (0..n)
                .map(|lo| {
                    let mut acc = -l2.d(lo);
                    for m in 0..n {
                        acc = acc + &y.0[m] * dy[lo].d(m);
                    }
                    acc.scale(0.25)
                })
                .collect(),
        );
        let spray = mat_vec(&g_inv, &inner);

        let high = order >= 3;
        let like = g.get(&[0, 0]).truncate(order.saturating_sub(3));
        let c = PiTensor::from_fn(n, 0, 3, |ix| {
            if high {
                g.get(&[ix[0], ix[1]]).d(n + ix[2]).scale(0.5)
            } else {
                like.zero_like()
            }
        });
        let t = raise_first(&g_inv, &c);
        let barthel = PiTensor::from_fn(n, 1, 1, |ix| {
            if high {
                spray.0[ix[0]].d(n + ix[1])
            } else {
                like.zero_like()
            }
        });

        // δ_j g_lk with δ_j = ∂x^j − Nᵐ_j ∂y^m
        let delta_g = PiTensor::from_fn(n, 0, 3, |ix| {
            let (j, a, b) = (ix[0], ix[1], ix[2]);
            if !high {
                return like.zero_like();
            }
            let gab = g.get(&[a, b]);
            let mut acc = gab.d(j);
            for m in 0..n {
                acc = acc - barthel.get(&[m, j]) * gab.d(n + m);
            }
            acc
        });
        let lowered = PiTensor::from_fn(n, 0, 3, |ix| {
            let (l_, j, k) = (ix[0], ix[1], ix[2]);
            (delta_g.get(&[j, l_, k]) + delta_g.get(&[k, j, l_]) - delta_g.get(&[l_, j, k]))
                .scale(0.5)
        });
        let gamma = raise_first(&g_inv, &lowered);

        Ok(LocalGeometry {
            n,
            order,
            point: p.clone(),
            vars,
            l,
            g,
            g_inv,
            ell,
            c,
            t,
            spray,
            barthel,
            gamma,
        })
    }

    /// The position vector `η̄` with components `yⁱ`.
    pub fn eta(&self) -> JVec {
        JVec(self.vars[self.n..].to_vec())
    }

    /// `g⁻¹ ω` for a covector `ω`.
    pub fn raise(&self, form: &JVec) -> JVec {
        mat_vec(&self.g_inv, form)
    }

    /// `g X` as a covector.
    pub fn lower(&self, v: &JVec) -> JVec {
        mat_vec(&self.g, v)
    }

    /// `g(X, Y)`.
    pub fn inner(&self, a: &JVec, b: &JVec) -> Jet {
        self.g.eval(&[a, b])
    }

    /// `ℓ(X)`.
    pub fn ell_of(&self, v: &JVec) -> Jet {
        self.ell.dot(v)
    }

    pub fn cartan(&self) -> ConnectionCoefficients {
        ConnectionCoefficients::new(self.barthel.clone(), self.gamma.clone(), self.t.clone())
    }

    /// Berwald coefficients `Gⁱ_jk = ∂Nⁱ_j/∂yᵏ`, stored `[i][j][k]`.
    pub fn berwald(&self) -> PiTensor {
        let n = self.n;
        PiTensor::from_fn(n, 1, 2, |ix| self.barthel.get(&[ix[0], ix[1]]).d(n + ix[2]))
    }

    /// The coordinate jets at full order, a template for constants.
    pub fn like(&self) -> &Jet {
        &self.vars[0]
    }
}

/// `Tⁱ_jk = gⁱˡ C_ljk` for a rank-3 covariant tensor.
pub(crate) fn raise_first(g_inv: &PiTensor, c: &PiTensor) -> PiTensor {
    let n = c.dim();
    PiTensor::from_fn(n, 1, c.down() - 1, |ix| {
        let mut acc: Option<Jet> = None;
        for l in 0..n {
            let gil = g_inv.get(&[ix[0], l]);
            let mut idx = ix.to_vec();
            idx[0] = l;
            let term = gil * c.get(&idx);
            acc = Some(match acc {
                Some(a) => a + term,
                None => term,
            });
        }
        acc.expect("dimension is positive")
    })
}
