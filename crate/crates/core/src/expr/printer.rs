//! Canonical printer with minimal parentheses; output parses back to the
//! same tree.

use super::Expr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Pow(..) => 4,
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => UNARY,
        Expr::Num(_) | Expr::Var(_) | Expr::Func(..) => ATOM,
    }
}

pub(super) fn print(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

fn write(e: &Expr, min: u8, out: &mut String) {
    if prec(e) < min {
        out.push('(');
        write(e, 0, out);
        out.push(')');
        return;
    }
    match e {
        Expr::Num(v) => {
            if v.is_sign_negative() {
                out.push_str(&format!("({v})"));
            } else {
                out.push_str(&format!("{v}"));
            }
        }
        Expr::Var(v) => {
            let c = match v.kind {
                super::VarKind::X => 'x',
                super::VarKind::Y => 'y',
            };
            out.push_str(&format!("{c}{}", v.index + 1));
        }
        Expr::Neg(a) => {
            out.push('-');
            write(a, UNARY, out);
        }
        Expr::Add(a, b) => binary(a, " + ", b, SUM, out),
        Expr::Sub(a, b) => binary(a, " - ", b, SUM, out),
        Expr::Mul(a, b) => binary(a, " * ", b, PRODUCT, out),
        Expr::Div(a, b) => binary(a, " / ", b, PRODUCT, out),
        Expr::Pow(a, b) => {
            write(a, ATOM, out);
            out.push('^');
            write_exponent(b, out);
        }
        Expr::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write(a, 0, out);
            out.push(')');
        }
    }
}

fn binary(a: &Expr, op: &str, b: &Expr, level: u8, out: &mut String) {
    write(a, level, out);
    out.push_str(op);
    write(b, level + 1, out);
}

fn write_exponent(e: &Expr, out: &mut String) {
    match e {
        Expr::Neg(a) => {
            out.push('-');
            write_exponent(a, out);
        }
        Expr::Pow(a, b) => {
            write(a, ATOM, out);
            out.push('^');
            write_exponent(b, out);
        }
        _ => write(e, ATOM, out),
    }
}
