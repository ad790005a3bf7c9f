//! Expression-backed fields evaluable as jets at a chart point.

use super::jet::{Jet, Table, MAX_ORDER};
use super::tensor::{coordinate_jets, JVec, PiTensor};
use crate::error::{Error, Result};
use crate::expr::{eval_f64, eval_jet, Expr, FieldKind, FieldSpec};
use crate::finsler::ChartPoint;

fn check_kind(spec: &FieldSpec, kind: FieldKind) -> Result<()> {
    if spec.kind != kind {
        return Err(Error::Dimension(format!(
            "expected a {kind:?} field, got {:?}",
            spec.kind
        )));
    }
    Ok(())
}

fn check_vars(vars: &[Jet], n: usize) -> Result<()> {
    if vars.len() != 2 * n {
        return Err(Error::Dimension(format!(
            "field of dimension {n} evaluated with {} chart variables",
            vars.len()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    spec: FieldSpec,
}

impl ScalarField {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        check_kind(&spec, FieldKind::Scalar)?;
        Ok(ScalarField { spec })
    }

    pub fn from_expr(dim: usize, e: Expr) -> Result<Self> {
        Self::new(FieldSpec::new(FieldKind::Scalar, dim, vec![e])?)
    }

    pub fn parse(dim: usize, source: &str) -> Result<Self> {
        Self::new(FieldSpec::parse(FieldKind::Scalar, dim, &[source])?)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.spec.exprs[0]
    }

    pub fn value(&self, p: &ChartPoint) -> Result<f64> {
        eval_f64(self.expr(), &p.coords())
    }

    /// Evaluate on coordinate jets `(x, y)` centred at some point.
    pub fn jet(&self, vars: &[Jet]) -> Result<Jet> {
        check_vars(vars, self.dim())?;
        eval_jet(self.expr(), vars)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovectorField {
    spec: FieldSpec,
}

impl CovectorField {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        check_kind(&spec, FieldKind::Covector)?;
        Ok(CovectorField { spec })
    }

    pub fn parse<S: AsRef<str>>(dim: usize, sources: &[S]) -> Result<Self> {
        Self::new(FieldSpec::parse(FieldKind::Covector, dim, sources)?)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.spec.exprs
    }

    /// Components `A_i` as jets.
    pub fn jet(&self, vars: &[Jet]) -> Result<JVec> {
        check_vars(vars, self.dim())?;
        Ok(JVec(
            self.spec
                .exprs
                .iter()
                .map(|e| eval_jet(e, vars))
                .collect::<Result<_>>()?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    spec: FieldSpec,
}

impl MatrixField {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        check_kind(&spec, FieldKind::Matrix)?;
        Ok(MatrixField { spec })
    }

    /// Row-major sources, `φⁱ_j` at position `i*n + j`.
    pub fn parse<S: AsRef<str>>(dim: usize, sources: &[S]) -> Result<Self> {
        Self::new(FieldSpec::parse(FieldKind::Matrix, dim, sources)?)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.spec.exprs
    }

    /// The mixed `(1,1)` tensor `φⁱ_j` as jets.
    pub fn jet(&self, vars: &[Jet]) -> Result<PiTensor> {
        check_vars(vars, self.dim())?;
        let n = self.dim();
        let vals = self
            .spec
            .exprs
            .iter()
            .map(|e| eval_jet(e, vars))
            .collect::<Result<Vec<_>>>()?;
        Ok(PiTensor::from_fn(n, 1, 1, |ix| {
            vals[ix[0] * n + ix[1]].clone()
        }))
    }
}

fn jet_at(field: &ScalarField, p: &ChartPoint, order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh {
            requested: order,
            max: MAX_ORDER,
        });
    }
    if p.dim() != field.dim() {
        return Err(Error::Dimension(format!(
            "point of dimension {} for a field of dimension {}",
            p.dim(),
            field.dim()
        )));
    }
    let vars = coordinate_jets(Table::get(2 * p.dim()), order, &p.coords());
    field.jet(&vars)
}

/// Mixed partial derivative; `slots` lists chart variables, `x_i` as `i` and
/// `y_i` as `n + i`, repeated for higher order.
pub fn partial(field: &ScalarField, p: &ChartPoint, slots: &[usize]) -> Result<f64> {
    let n2 = 2 * field.dim();
    let mut alpha = vec![0u8; n2];
    for &s in slots {
        if s >= n2 {
            return Err(Error::Dimension(format!(
                "derivative slot {s} outside the {n2} chart variables"
            )));
        }
        alpha[s] += 1;
    }
    Ok(jet_at(field, p, slots.len())?.partial(&alpha))
}

fn y_alpha(n: usize, ys: &[usize]) -> Vec<u8> {
    let mut alpha = vec![0u8; 2 * n];
    for &i in ys {
        alpha[n + i] += 1;
    }
    alpha
}

/// `∂²f/∂yⁱ∂yʲ`.
pub fn hessian_y(field: &ScalarField, p: &ChartPoint) -> Result<Vec<Vec<f64>>> {
    let n = field.dim();
    let j = jet_at(field, p, 2)?;
    Ok((0..n)
        .map(|a| (0..n).map(|b| j.partial(&y_alpha(n, &[a, b]))).collect())
        .collect())
}

/// `∂³f/∂yⁱ∂yʲ∂yᵏ`.
pub fn third_y(field: &ScalarField, p: &ChartPoint) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = field.dim();
    let j = jet_at(field, p, 3)?;
    Ok((0..n)
        .map(|a| {
            (0..n)
                .map(|b| (0..n).map(|c| j.partial(&y_alpha(n, &[a, b, c]))).collect())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], y: &[f64]) -> ChartPoint {
        ChartPoint::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn polynomial_partials() {
        let f = ScalarField::parse(2, "y1^2 + y2^2").unwrap();
        assert_eq!(
            partial(&f, &pt(&[0.1, 0.2], &[0.3, 0.4]), &[2, 2]).unwrap(),
            2.0
        );
        let f = ScalarField::parse(1, "x1*y1").unwrap();
        assert_eq!(partial(&f, &pt(&[0.5], &[2.0]), &[0, 1]).unwrap(), 1.0);
    }

    #[test]
    fn mixed_partial_of_norm() {
        // ∂y1∂y2 sqrt(y1²+y2²) = −y1 y2 / r³
        let f = ScalarField::parse(2, "sqrt(y1^2 + y2^2)").unwrap();
        let v = partial(&f, &pt(&[0.0, 0.0], &[3.0, 4.0]), &[2, 3]).unwrap();
        let oracle = -3.0 * 4.0 / 125.0;
        assert!(((v - oracle) / oracle).abs() < 1e-9);
    }

    #[test]
    fn clairaut_symmetry() {
        let f = ScalarField::parse(2, "exp(x1*y2) * sin(x2 + y1^2) / (2 + cos(y2))").unwrap();
        let p = pt(&[0.3, -0.4], &[0.8, 1.1]);
        let a = partial(&f, &p, &[0, 3, 2, 2]).unwrap();
        for perm in [[3, 0, 2, 2], [2, 2, 3, 0], [2, 3, 0, 2]] {
            let b = partial(&f, &p, &perm).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn hessians() {
        let f = ScalarField::parse(2, "exp(2*x1)*y1^2 + y2^2").unwrap();
        let h = hessian_y(&f, &pt(&[0.3, 0.0], &[1.0, 1.0])).unwrap();
        assert!((h[0][0] - 2.0 * 0.6f64.exp()).abs() < 1e-14);
        assert_eq!(h[0][1], 0.0);
        assert_eq!(h[1][0], 0.0);
        assert_eq!(h[1][1], 2.0);
        let t = third_y(&f, &pt(&[0.3, 0.0], &[1.0, 1.0])).unwrap();
        assert!(t.iter().flatten().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn order_limit() {
        let f = ScalarField::parse(1, "y1").unwrap();
        let slots = vec![1; MAX_ORDER + 1];
        assert!(matches!(
            partial(&f, &pt(&[0.0], &[1.0]), &slots),
            Err(Error::OrderTooHigh { .. })
        ));
    }
}
