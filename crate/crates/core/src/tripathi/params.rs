use crate::ad::tensor::mat_mul;
use crate::ad::{CovectorField, JVec, Jet, MatrixField, PiTensor, ScalarField};
use crate::connection::{ricci_horizontal, CurvatureKind};
use crate::error::{Error, Result};
use crate::finsler::LocalGeometry;

/// A scalar 1-form parameter (`A`, `B` or `u`).
#[derive(Clone, Debug, PartialEq)]
pub enum FormParam {
    Field(CovectorField),
    /// `ℓ = L⁻¹ g(η̄, ·)`.
    Ell,
}

/// Which part of a lowered matrix is kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Symmetric,
    Antisymmetric,
}

/// The vector 1-form parameter `φ`.
#[derive(Clone, Debug, PartialEq)]
pub enum EndoParam {
    /// Components `φⁱ_j`.
    Field(MatrixField),
    Identity,
    /// `φ = g⁻¹ M` with `M_jk = g(φ e_j, e_k)` the symmetric or antisymmetric
    /// part of the given matrix, so `φ` is purely of that type.
    Lowered {
        m: MatrixField,
        part: Part,
    },
    /// The horizontal Ricci tensor of the Cartan connection.
    RicciCartan,
}

/// The six defining fields `(f₁, f₂, A, B, u, φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripathiParams {
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub a: FormParam,
    pub b: FormParam,
    pub u: FormParam,
    pub phi: EndoParam,
}

/// Parameter fields as jets about a point.
#[derive(Clone, Debug)]
pub struct ParamValues {
    pub f1: Jet,
    pub f2: Jet,
    pub a: JVec,
    pub b: JVec,
    pub u: JVec,
    pub phi: PiTensor,
}

impl FormParam {
    pub fn zero(n: usize) -> FormParam {
        FormParam::constant(&vec![0.0; n])
    }

    pub fn constant(values: &[f64]) -> FormParam {
        let src: Vec<String> = values.iter().map(|v| format_num(*v)).collect();
        FormParam::Field(CovectorField::parse(values.len(), &src).expect("numeric literals parse"))
    }

    fn dim(&self) -> Option<usize> {
        match self {
            FormParam::Field(f) => Some(f.dim()),
            FormParam::Ell => None,
        }
    }

    fn eval(&self, geo: &LocalGeometry) -> Result<JVec> {
        match self {
            FormParam::Field(f) => f.jet(&geo.vars),
            FormParam::Ell => Ok(geo.ell.clone()),
        }
    }
}

impl EndoParam {
    pub fn zero(n: usize) -> EndoParam {
        EndoParam::Field(MatrixField::parse(n, &vec!["0"; n * n]).expect("zero parses"))
    }

    fn dim(&self) -> Option<usize> {
        match self {
            EndoParam::Field(m) | EndoParam::Lowered { m, .. } => Some(m.dim()),
            EndoParam::Identity | EndoParam::RicciCartan => None,
        }
    }

    /// Whether evaluation needs the Cartan curvature, one order deeper.
    pub fn needs_curvature(&self) -> bool {
        matches!(self, EndoParam::RicciCartan)
    }

    fn eval(&self, geo: &LocalGeometry) -> Result<PiTensor> {
        let n = geo.n;
        let like = geo.like();
        Ok(match self {
            EndoParam::Field(m) => m.jet(&geo.vars)?,
            EndoParam::Identity => PiTensor::from_fn(n, 1, 1, |ix| {
                like.lift(if ix[0] == ix[1] { 1.0 } else { 0.0 })
            }),
            EndoParam::Lowered { m, part } => {
                let raw = m.jet(&geo.vars)?;
                let sign = match part {
                    Part::Symmetric => 1.0,
                    Part::Antisymmetric => -1.0,
                };
                let lowered = PiTensor::from_fn(n, 0, 2, |ix| {
                    (raw.get(&[ix[0], ix[1]]) + raw.get(&[ix[1], ix[0]]).scale(sign)).scale(0.5)
                });
                // φⁱ_j = gⁱᵏ M_jk
                PiTensor::from_fn(n, 1, 1, |ix| {
                    let (i, j) = (ix[0], ix[1]);
                    let mut acc = geo.g_inv.get(&[i, 0]) * lowered.get(&[j, 0]);
                    for k in 1..n {
                        acc = acc + geo.g_inv.get(&[i, k]) * lowered.get(&[j, k]);
                    }
                    acc
                })
            }
            EndoParam::RicciCartan => {
                if geo.order < 4 {
                    return Err(Error::OrderTooHigh {
                        requested: 4,
                        max: geo.order,
                    });
                }
                let curv = geo.cartan().curvature(CurvatureKind::H);
                ricci_horizontal(&curv, &geo.g_inv)
            }
        })
    }
}

fn format_num(v: f64) -> String {
    if v < 0.0 {
        format!("(0 - {})", -v)
    } else {
        format!("{v}")
    }
}

impl TripathiParams {
    /// The vanishing condition `f₁ = f₂ = u = 0` (with `A = B = 0`, `φ = 0`).
    pub fn vc(n: usize) -> TripathiParams {
        TripathiParams {
            f1: ScalarField::parse(n, "0").expect("literal"),
            f2: ScalarField::parse(n, "0").expect("literal"),
            a: FormParam::zero(n),
            b: FormParam::zero(n),
            u: FormParam::zero(n),
            phi: EndoParam::zero(n),
        }
    }

    /// Check that every explicit field has dimension `n`.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        let dims = [
            Some(self.f1.dim()),
            Some(self.f2.dim()),
            self.a.dim(),
            self.b.dim(),
            self.u.dim(),
            self.phi.dim(),
        ];
        if let Some(d) = dims.iter().flatten().find(|&&d| d != n) {
            return Err(Error::Dimension(format!(
                "parameter field of dimension {d} used with dimension {n}"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, geo: &LocalGeometry) -> Result<ParamValues> {
        self.check_dim(geo.n)?;
        Ok(ParamValues {
            f1: self.f1.jet(&geo.vars)?,
            f2: self.f2.jet(&geo.vars)?,
            a: self.a.eval(geo)?,
            b: self.b.eval(geo)?,
            u: self.u.eval(geo)?,
            phi: self.phi.eval(geo)?,
        })
    }
}

/// `g(φ ·, ·)` as a covariant matrix `M_jk = Σ_i φⁱ_j g_ik`.
pub(crate) fn lowered_endo(phi: &PiTensor, g: &PiTensor) -> PiTensor {
    let n = phi.dim();
    let t = PiTensor::from_fn(n, 1, 1, |ix| phi.get(&[ix[1], ix[0]]).clone());
    // (φᵀ g)_jk
    let m = mat_mul(&t, g);
    PiTensor::from_fn(n, 0, 2, |ix| m.get(ix).clone())
}
