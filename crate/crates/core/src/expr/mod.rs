//! The metric-definition DSL: expressions over `x1..xn`, `y1..yn`.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-' exponent | atom ('^' exponent)?      (must be constant)
//! atom     := number | var | func '(' expr ')' | '(' expr ')'
//! ```

mod eval;
mod parser;
mod printer;

pub use eval::{eval_f64, eval_jet};
pub use parser::parse_expr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half of the chart coordinates a variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    X,
    Y,
}

/// A chart variable; `index` is zero-based (`y1` is `Y, 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

impl Var {
    /// Position in the `(x1..xn, y1..yn)` variable list.
    pub fn slot(&self, n: usize) -> usize {
        match self.kind {
            VarKind::X => self.index,
            VarKind::Y => n + self.index,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant exponent expression.
    Pow(Box<Expr>, Box<Expr>),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn x(i: usize) -> Expr {
        Expr::Var(Var {
            kind: VarKind::X,
            index: i,
        })
    }

    pub fn y(i: usize) -> Expr {
        Expr::Var(Var {
            kind: VarKind::Y,
            index: i,
        })
    }

    /// Largest variable index referenced plus one, or 0 for constants.
    pub fn max_index(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(v) => v.index + 1,
            Expr::Neg(a) | Expr::Func(_, a) => a.max_index(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_index().max(b.max_index()),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var(_) | Expr::Func(..) => false,
            Expr::Neg(a) => a.is_constant(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Value of a variable-free expression.
    pub fn constant_value(&self) -> Result<f64> {
        if !self.is_constant() {
            return Err(Error::domain(
                self.to_string(),
                "expression is not constant",
            ));
        }
        eval_f64(self, &[])
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&printer::print(self))
    }
}

/// Shape of a user-supplied field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Scalar,
    Covector,
    Matrix,
}

impl FieldKind {
    pub fn components(self, n: usize) -> usize {
        match self {
            FieldKind::Scalar => 1,
            FieldKind::Covector => n,
            FieldKind::Matrix => n * n,
        }
    }
}

/// One expression per component; matrices are row-major (`φⁱ_j` at `i*n + j`).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSpec {
    pub kind: FieldKind,
    pub dim: usize,
    pub exprs: Vec<Expr>,
}

impl FieldSpec {
    pub fn new(kind: FieldKind, dim: usize, exprs: Vec<Expr>) -> Result<FieldSpec> {
        let want = kind.components(dim);
        if exprs.len() != want {
            return Err(Error::Dimension(format!(
                "{kind:?} field in dimension {dim} needs {want} components, got {}",
                exprs.len()
            )));
        }
        if let Some(e) = exprs.iter().find(|e| e.max_index() > dim) {
            return Err(Error::Dimension(format!("`{e}` exceeds dimension {dim}")));
        }
        Ok(FieldSpec { kind, dim, exprs })
    }

    /// Parse one source text per component.
    pub fn parse<S: AsRef<str>>(kind: FieldKind, dim: usize, sources: &[S]) -> Result<FieldSpec> {
        let exprs = sources
            .iter()
            .map(|s| parse_expr(s.as_ref(), dim))
            .collect::<Result<Vec<_>>>()?;
        FieldSpec::new(kind, dim, exprs)
    }
}
