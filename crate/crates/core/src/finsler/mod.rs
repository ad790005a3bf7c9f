//! Metric data derived from a Finsler function `L(x, y)` on one chart.

mod local;

pub use local::LocalGeometry;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::ad::ScalarField;
use crate::connection::ConnectionCoefficients;
use crate::error::{Error, Result};

/// A point `(x, y)` of the slit tangent bundle in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ChartPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<ChartPoint> {
        if x.len() != y.len() || x.is_empty() {
            return Err(Error::InvalidPoint(format!(
                "x has {} and y has {} components",
                x.len(),
                y.len()
            )));
        }
        if !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if y.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidPoint("y is the zero vector".into()));
        }
        Ok(ChartPoint { x, y })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `(x1..xn, y1..yn)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    /// Same base point with `y` scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> ChartPoint {
        ChartPoint {
            x: self.x.clone(),
            y: self.y.iter().map(|v| v * lambda).collect(),
        }
    }
}

impl std::fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(x={:?}, y={:?})", self.x, self.y)
    }
}

/// Closed coordinate box for the base point `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ChartBox {
    pub fn cube(n: usize, half: f64) -> ChartBox {
        ChartBox {
            lo: vec![-half; n],
            hi: vec![half; n],
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }
}

/// The Finsler function with its dimension and chart.
#[derive(Clone, Debug, PartialEq)]
pub struct FinslerStructure {
    pub name: String,
    l: ScalarField,
    chart: ChartBox,
}

/// Relative tolerance for the homogeneity check of `L`.
const HOMOGENEITY_TOL: f64 = 1e-9;
/// Smallest admissible eigenvalue of `g`.
const MIN_EIGENVALUE: f64 = 1e-10;

impl FinslerStructure {
    pub fn new(name: impl Into<String>, l: ScalarField, chart: ChartBox) -> Result<Self> {
        if chart.lo.len() != l.dim() || chart.hi.len() != l.dim() {
            return Err(Error::Dimension(format!(
                "chart box has {} coordinates for dimension {}",
                chart.lo.len(),
                l.dim()
            )));
        }
        if chart.lo.iter().zip(&chart.hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::Config("chart box has lo > hi".into()));
        }
        Ok(FinslerStructure {
            name: name.into(),
            l,
            chart,
        })
    }

    pub fn parse(name: impl Into<String>, n: usize, source: &str, chart: ChartBox) -> Result<Self> {
        Self::new(name, ScalarField::parse(n, source)?, chart)
    }

    pub fn dim(&self) -> usize {
        self.l.dim()
    }

    pub fn function(&self) -> &ScalarField {
        &self.l
    }

    pub fn chart(&self) -> &ChartBox {
        &self.chart
    }

    pub fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::InvalidPoint(format!(
                "point {p} has dimension {}, structure has {}",
                p.dim(),
                self.dim()
            )));
        }
        if !self.chart.contains(&p.x) {
            return Err(Error::InvalidPoint(format!(
                "{p} lies outside the chart box"
            )));
        }
        Ok(())
    }

    /// Positive 1-homogeneity in `y` and positive definiteness of `g` at `p`.
    pub fn validate_at(&self, p: &ChartPoint) -> Result<()> {
        self.check_point(p)?;
        let base = self.l.value(p)?;
        if !(base > 0.0) {
            return Err(Error::Degenerate {
                point: p.to_string(),
                message: format!("L = {base} is not positive"),
            });
        }
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = self.l.value(&p.scaled(lambda))?;
            let rel = (scaled - lambda * base).abs() / (lambda * base);
            if rel > HOMOGENEITY_TOL {
                return Err(Error::Degenerate {
                    point: p.to_string(),
                    message: format!(
                        "L is not 1-homogeneous in y (λ={lambda}, rel. err {rel:.3e})"
                    ),
                });
            }
        }
        fundamental_tensor(self, p).map(|_| ())
    }
}

/// `g`, its inverse, and `L` at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub g: Vec<Vec<f64>>,
    pub g_inv: Vec<Vec<f64>>,
    pub l_val: f64,
}

/// Cartan tensor `C_ijk` (all indices down) and `Tⁱ_jk = gⁱˡ C_ljk`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanTensorValue {
    pub c: Vec<Vec<Vec<f64>>>,
    pub t_mixed: Vec<Vec<Vec<f64>>>,
}

pub(crate) fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Reject `g` unless it is symmetric positive definite.
pub(crate) fn check_positive(g: &DMatrix<f64>, p: &ChartPoint) -> Result<()> {
    let eig = SymmetricEigen::new(g.clone());
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min > MIN_EIGENVALUE) {
        return Err(Error::Degenerate {
            point: p.to_string(),
            message: format!(
                "fundamental tensor is not positive definite (min eigenvalue {min:.3e})"
            ),
        });
    }
    Ok(())
}

pub fn fundamental_tensor(f: &FinslerStructure, p: &ChartPoint) -> Result<MetricValue> {
    let geo = LocalGeometry::new(f, p, 2)?;
    Ok(MetricValue {
        g: to_rows(&geo.g.matrix_values()),
        g_inv: to_rows(&geo.g_inv.matrix_values()),
        l_val: geo.l.value(),
    })
}

pub fn cartan_tensor(f: &FinslerStructure, p: &ChartPoint) -> Result<CartanTensorValue> {
    let geo = LocalGeometry::new(f, p, 3)?;
    let n = f.dim();
    let cube = |t: &crate::ad::PiTensor| {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| t.get(&[i, j, k]).value()).collect())
                    .collect()
            })
            .collect()
    };
    Ok(CartanTensorValue {
        c: cube(&geo.c),
        t_mixed: cube(&geo.t),
    })
}

/// `ℓ(X) = g_ij yⁱ Xʲ / L`.
pub fn ell(f: &FinslerStructure, p: &ChartPoint, x: &[f64]) -> Result<f64> {
    let m = fundamental_tensor(f, p)?;
    if x.len() != p.dim() {
        return Err(Error::Dimension("ℓ argument has the wrong length".into()));
    }
    let mut acc = 0.0;
    for i in 0..p.dim() {
        for j in 0..p.dim() {
            acc += m.g[i][j] * p.y[i] * x[j];
        }
    }
    Ok(acc / m.l_val)
}

/// Geodesic spray coefficients `Gⁱ`.
pub fn geodesic_spray(f: &FinslerStructure, p: &ChartPoint) -> Result<Vec<f64>> {
    Ok(LocalGeometry::new(f, p, 2)?.spray.values())
}

/// Barthel nonlinear connection `Nⁱ_j = ∂Gⁱ/∂yʲ`, rows indexed by `i`.
pub fn barthel(f: &FinslerStructure, p: &ChartPoint) -> Result<Vec<Vec<f64>>> {
    Ok(to_rows(
        &LocalGeometry::new(f, p, 3)?.barthel.matrix_values(),
    ))
}

/// The Cartan connection `(N, Γ*, T)` as jets of order `order − 3` about `p`,
/// where `order` is the order of the jet of `L`.
pub fn cartan_connection(
    f: &FinslerStructure,
    p: &ChartPoint,
    order: usize,
) -> Result<ConnectionCoefficients> {
    Ok(LocalGeometry::new(f, p, order)?.cartan())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euclid() -> FinslerStructure {
        FinslerStructure::parse("euclid", 2, "sqrt(y1^2 + y2^2)", ChartBox::cube(2, 1.0)).unwrap()
    }

    fn pt(x: &[f64], y: &[f64]) -> ChartPoint {
        ChartPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(ChartPoint::new(vec![0.0], vec![0.0]).is_err());
        assert!(ChartPoint::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(ChartPoint::new(vec![f64::NAN], vec![1.0]).is_err());
        let f = euclid();
        assert!(f.check_point(&pt(&[2.0, 0.0], &[1.0, 0.0])).is_err());
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let m = fundamental_tensor(&euclid(), &pt(&[0.1, 0.2], &[3.0, 4.0])).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m.g[i][j] - want).abs() < 1e-14);
            }
        }
        assert!((m.l_val - 5.0).abs() < 1e-14);
    }

    #[test]
    fn ell_values() {
        let f = euclid();
        let p = pt(&[0.0, 0.0], &[3.0, 4.0]);
        assert!((ell(&f, &p, &[1.0, 0.0]).unwrap() - 0.6).abs() < 1e-14);
        assert!((ell(&f, &p, &[3.0, 4.0]).unwrap() - 5.0).abs() < 1e-14);
        assert!(ell(&f, &p, &[-4.0, 3.0]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn conformal_metric() {
        let f = FinslerStructure::parse(
            "conf",
            2,
            "sqrt(exp(2*x1)*y1^2 + y2^2)",
            ChartBox::cube(2, 1.0),
        )
        .unwrap();
        let m = fundamental_tensor(&f, &pt(&[0.3, 0.0], &[0.7, -1.2])).unwrap();
        assert!((m.g[0][0] - 0.6f64.exp()).abs() < 1e-12);
        assert!(m.g[0][1].abs() < 1e-12);
        assert!((m.g[1][1] - 1.0).abs() < 1e-12);
        let c = cartan_tensor(&f, &pt(&[0.3, 0.0], &[0.7, -1.2])).unwrap();
        assert!(c.c.iter().flatten().flatten().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn indefinite_metric_rejected() {
        let f = FinslerStructure::parse("bad", 2, "sqrt(y1^2 - 0.5*y2^2)", ChartBox::cube(2, 1.0))
            .unwrap();
        let err = f.validate_at(&pt(&[0.0, 0.0], &[2.0, 1.0])).unwrap_err();
        assert!(matches!(err, Error::Degenerate { .. }), "{err}");
    }

    #[test]
    fn non_homogeneous_rejected() {
        let f = FinslerStructure::parse("bad", 2, "y1^2 + y2^2", ChartBox::cube(2, 1.0)).unwrap();
        assert!(matches!(
            f.validate_at(&pt(&[0.0, 0.0], &[1.0, 1.0])),
            Err(Error::Degenerate { .. })
        ));
    }
}
