use super::{Expr, Func};
use crate::ad::jet::Jet;
use crate::error::{Error, Result};

/// Arithmetic needed by the evaluator, shared by plain floats and jets.
trait Scalar: Sized + Clone {
    fn value(&self) -> f64;
    /// Whether derivatives are carried (abs, sqrt are not differentiable at 0).
    fn differentiable(&self) -> bool;
    fn constant(&self, v: f64) -> Self;
    fn neg(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn powi(&self, n: i32) -> Self;
    fn powf(&self, r: f64) -> Self;
    fn apply(&self, f: Func) -> Self;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn differentiable(&self) -> bool {
        false
    }
    fn constant(&self, v: f64) -> Self {
        v
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn powf(&self, r: f64) -> Self {
        f64::powf(*self, r)
    }
    fn apply(&self, f: Func) -> Self {
        match f {
            Func::Sqrt => self.sqrt(),
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Abs => self.abs(),
        }
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        Jet::value(self)
    }
    fn differentiable(&self) -> bool {
        self.order() > 0
    }
    fn constant(&self, v: f64) -> Self {
        self.lift(v)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn powi(&self, n: i32) -> Self {
        Jet::powi(self, n)
    }
    fn powf(&self, r: f64) -> Self {
        Jet::powf(self, r)
    }
    fn apply(&self, f: Func) -> Self {
        match f {
            Func::Sqrt => Jet::sqrt(self),
            Func::Exp => Jet::exp(self),
            Func::Log => self.ln(),
            Func::Sin => Jet::sin(self),
            Func::Cos => Jet::cos(self),
            Func::Abs => Jet::abs(self),
        }
    }
}

fn eval<S: Scalar>(e: &Expr, vars: &[S], like: &S) -> Result<S> {
    let n = vars.len() / 2;
    Ok(match e {
        Expr::Num(v) => like.constant(*v),
        Expr::Var(v) => {
            let slot = v.slot(n);
            vars.get(slot).cloned().ok_or_else(|| {
                Error::Dimension(format!(
                    "variable `{e}` needs {} chart values",
                    2 * (v.index + 1)
                ))
            })?
        }
        Expr::Neg(a) => eval(a, vars, like)?.neg(),
        Expr::Add(a, b) => eval(a, vars, like)?.add(&eval(b, vars, like)?),
        Expr::Sub(a, b) => eval(a, vars, like)?.sub(&eval(b, vars, like)?),
        Expr::Mul(a, b) => eval(a, vars, like)?.mul(&eval(b, vars, like)?),
        Expr::Div(a, b) => {
            let num = eval(a, vars, like)?;
            let den = eval(b, vars, like)?;
            if den.value() == 0.0 {
                return Err(Error::domain(e.to_string(), "division by zero"));
            }
            num.div(&den)
        }
        Expr::Pow(a, b) => {
            let base = eval(a, vars, like)?;
            let r = eval(b, &[] as &[f64], &0.0)?;
            power(e, &base, r)?
        }
        Expr::Func(f, a) => {
            let arg = eval(a, vars, like)?;
            let v = arg.value();
            let bad = match f {
                Func::Sqrt if v < 0.0 => Some("square root of a negative value"),
                Func::Sqrt if v == 0.0 && arg.differentiable() => {
                    Some("square root is not differentiable at zero")
                }
                Func::Log if v <= 0.0 => Some("logarithm of a non-positive value"),
                Func::Abs if v == 0.0 && arg.differentiable() => {
                    Some("absolute value is not differentiable at zero")
                }
                _ => None,
            };
            if let Some(msg) = bad {
                return Err(Error::domain(e.to_string(), msg));
            }
            arg.apply(*f)
        }
    })
    .and_then(|s: S| {
        if s.value().is_finite() {
            Ok(s)
        } else {
            Err(Error::domain(e.to_string(), "non-finite value"))
        }
    })
}

fn power<S: Scalar>(e: &Expr, base: &S, r: f64) -> Result<S> {
    let v = base.value();
    if r.fract() == 0.0 && r.abs() <= i32::MAX as f64 {
        if v == 0.0 && r < 0.0 {
            return Err(Error::domain(e.to_string(), "division by zero"));
        }
        return Ok(base.powi(r as i32));
    }
    if v < 0.0 {
        return Err(Error::domain(
            e.to_string(),
            "fractional power of a negative value",
        ));
    }
    if v == 0.0 && (r < 0.0 || base.differentiable()) {
        return Err(Error::domain(
            e.to_string(),
            "fractional power is singular at zero",
        ));
    }
    Ok(base.powf(r))
}

/// Plain evaluation; `vars` holds `(x1..xn, y1..yn)`.
pub fn eval_f64(e: &Expr, vars: &[f64]) -> Result<f64> {
    eval(e, vars, &0.0)
}

/// Jet evaluation; `vars` holds one jet per chart variable, all over the same
/// table. Constants are lifted to the order of the first variable.
pub fn eval_jet(e: &Expr, vars: &[Jet]) -> Result<Jet> {
    let like = vars
        .first()
        .ok_or_else(|| Error::Dimension("jet evaluation needs chart variables".into()))?
        .clone();
    eval(e, vars, &like)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ad::jet::Table;
    use crate::ad::tensor::coordinate_jets;
    use crate::expr::parse_expr;

    fn jets(base: &[f64], order: usize) -> Vec<Jet> {
        coordinate_jets(Table::get(base.len()), order, base)
    }

    #[test]
    fn product_value() {
        let e = parse_expr("y1*y2", 2).unwrap();
        assert_eq!(eval_f64(&e, &[0.0, 0.0, 3.0, 4.0]).unwrap(), 12.0);
    }

    #[test]
    fn second_derivative_of_square() {
        let e = parse_expr("y1^2+y2^2", 2).unwrap();
        let v = eval_jet(&e, &jets(&[0.2, -0.1, 0.7, 1.3], 2)).unwrap();
        assert_eq!(v.partial(&[0, 0, 2, 0]), 2.0);
        assert_eq!(v.partial(&[0, 0, 1, 1]), 0.0);
    }

    #[test]
    fn exp_matches_central_difference() {
        let e = parse_expr("exp(x1*y1)", 2).unwrap();
        let base = [1.0, 0.0, 2.0, 1.0];
        let v = eval_jet(&e, &jets(&base, 1)).unwrap();
        let h = 1e-6;
        let f = |x1: f64| eval_f64(&e, &[x1, 0.0, 2.0, 1.0]).unwrap();
        let fd = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
        let ad = v.partial(&[1, 0, 0, 0]);
        assert!(((ad - fd) / ad).abs() < 1e-8, "{ad} vs {fd}");
    }

    #[test]
    fn order_zero_matches_plain_evaluation() {
        let e = parse_expr(
            "sqrt(y1^2 + exp(2*x1)*y2^2) / (1 + sin(x2)) - log(y1^2) * cos(y2)^-3",
            2,
        )
        .unwrap();
        let base = [0.3, -0.2, 0.9, 1.4];
        let plain = eval_f64(&e, &base).unwrap();
        let jet = eval_jet(&e, &jets(&base, 0)).unwrap();
        assert_eq!(jet.value().to_bits(), plain.to_bits());
        let jet4 = eval_jet(&e, &jets(&base, 4)).unwrap();
        assert_eq!(jet4.value().to_bits(), plain.to_bits());
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let e = parse_expr("1 + sqrt(x1 - 1)", 1).unwrap();
        match eval_f64(&e, &[0.0, 1.0]) {
            Err(Error::Domain { expr, .. }) => assert_eq!(expr, "sqrt(x1 - 1)"),
            other => panic!("{other:?}"),
        }
        let e = parse_expr("y1 / x1", 1).unwrap();
        assert!(matches!(
            eval_f64(&e, &[0.0, 1.0]),
            Err(Error::Domain { .. })
        ));
        let e = parse_expr("log(x1)", 1).unwrap();
        assert!(matches!(
            eval_f64(&e, &[0.0, 1.0]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn abs_at_zero_only_fails_with_derivatives() {
        let e = parse_expr("abs(x1)", 1).unwrap();
        assert_eq!(eval_f64(&e, &[0.0, 1.0]).unwrap(), 0.0);
        assert!(eval_jet(&e, &jets(&[0.0, 1.0], 0)).is_ok());
        assert!(matches!(
            eval_jet(&e, &jets(&[0.0, 1.0], 1)),
            Err(Error::Domain { .. })
        ));
        let v = eval_jet(&e, &jets(&[-2.0, 1.0], 1)).unwrap();
        assert_eq!(v.partial(&[1, 0]), -1.0);
    }

    #[test]
    fn rational_powers() {
        let e = parse_expr("y1^(3/2)", 1).unwrap();
        let v = eval_jet(&e, &jets(&[0.0, 4.0], 2)).unwrap();
        assert!((v.value() - 8.0).abs() < 1e-14);
        assert!((v.partial(&[0, 1]) - 3.0).abs() < 1e-14);
        assert!((v.partial(&[0, 2]) - 0.375).abs() < 1e-14);
        assert!(eval_f64(&e, &[0.0, -1.0]).is_err());
    }
}
