//! Truncated multivariate Taylor expansions ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients `c[α]` of a smooth function about
//! a base point, for every multi-index `α` with `|α| <= order`, so that
//! `∂^α f = α! · c[α]`. Monomials are kept in graded order, which makes a
//! lower-order jet a prefix of a higher-order one: truncation is a slice.
//!
//! Arithmetic between jets of different orders yields the smaller order.
//! Differentiating a jet consumes one order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

/// Highest jet order any table is built for.
pub const MAX_ORDER: usize = 7;

const NONE: u32 = u32::MAX;

/// Monomial bookkeeping shared by every jet over the same number of variables.
pub struct Table {
    nvars: usize,
    monos: Vec<Vec<u8>>,
    count: Vec<usize>,
    up: Vec<u32>,
    pair_off: Vec<u32>,
    pairs: Vec<(u32, u32)>,
    fact: Vec<f64>,
    index: HashMap<Vec<u8>, u32>,
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Table")
            .field("nvars", &self.nvars)
            .field("monomials", &self.monos.len())
            .finish()
    }
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if parts == 1 {
        prefix.push(total as u8);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first as u8);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

impl Table {
    fn build(nvars: usize) -> Table {
        let mut monos = Vec::new();
        let mut count = Vec::with_capacity(MAX_ORDER + 1);
        for d in 0..=MAX_ORDER {
            compositions(d, nvars, &mut Vec::new(), &mut monos);
            if nvars == 0 && d > 0 {
                // only the empty monomial exists
                monos.truncate(1);
            }
            count.push(monos.len());
        }
        let index: HashMap<Vec<u8>, u32> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();

        let mut up = vec![NONE; monos.len() * nvars.max(1)];
        for (i, m) in monos.iter().enumerate() {
            for v in 0..nvars {
                let mut next = m.clone();
                next[v] += 1;
                if let Some(&j) = index.get(&next) {
                    up[i * nvars + v] = j;
                }
            }
        }

        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();
        let mut pair_off = Vec::with_capacity(monos.len() + 1);
        let mut pairs = Vec::new();
        pair_off.push(0u32);
        for r in monos.iter() {
            let dr = degree(r);
            for (i, a) in monos.iter().enumerate() {
                if degree(a) > dr {
                    break;
                }
                if a.iter().zip(r).all(|(x, y)| x <= y) {
                    let b: Vec<u8> = r.iter().zip(a).map(|(y, x)| y - x).collect();
                    pairs.push((i as u32, index[&b]));
                }
            }
            pair_off.push(pairs.len() as u32);
        }

        let fact = monos
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&e| (1..=e as u64).product::<u64>() as f64)
                    .product()
            })
            .collect();

        Table {
            nvars,
            monos,
            count,
            up,
            pair_off,
            pairs,
            fact,
            index,
        }
    }

    /// Shared table for `nvars` variables.
    pub fn get(nvars: usize) -> &'static Table {
        static TABLES: OnceLock<Mutex<HashMap<usize, &'static Table>>> = OnceLock::new();
        let map = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().expect("jet table cache poisoned");
        guard
            .entry(nvars)
            .or_insert_with(|| Box::leak(Box::new(Table::build(nvars))))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len(&self, order: usize) -> usize {
        self.count[order]
    }

    pub fn monomial(&self, idx: usize) -> &[u8] {
        &self.monos[idx]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).map(|&i| i as usize)
    }
}

/// Truncated Taylor expansion about a base point.
#[derive(Clone)]
pub struct Jet {
    table: &'static Table,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("value", &self.c[0])
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && std::ptr::eq(self.table, other.table) && self.c == other.c
    }
}

impl Jet {
    pub fn constant(table: &'static Table, order: usize, value: f64) -> Jet {
        assert!(order <= MAX_ORDER, "jet order {order} above {MAX_ORDER}");
        let mut c = vec![0.0; table.len(order)];
        c[0] = value;
        Jet { table, order, c }
    }

    /// The coordinate function `t_var` shifted to `value` at the base point.
    pub fn variable(table: &'static Table, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < table.nvars, "variable {var} outside jet space");
        let mut j = Jet::constant(table, order, value);
        if order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    /// A constant over the same table and order as `self`.
    pub fn lift(&self, value: f64) -> Jet {
        Jet::constant(self.table, self.order, value)
    }

    pub fn zero_like(&self) -> Jet {
        self.lift(0.0)
    }

    pub fn table(&self) -> &'static Table {
        self.table
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Taylor coefficient of `t^α`, zero when `|α|` exceeds the order.
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        match self.table.index_of(alpha) {
            Some(i) if i < self.c.len() => self.c[i],
            _ => 0.0,
        }
    }

    /// The mixed partial `∂^α f` at the base point.
    ///
    /// Panics when `|α|` exceeds the jet order.
    pub fn partial(&self, alpha: &[u8]) -> f64 {
        let i = self
            .table
            .index_of(alpha)
            .filter(|&i| i < self.c.len())
            .unwrap_or_else(|| panic!("partial {alpha:?} beyond jet order {}", self.order));
        self.c[i] * self.table.fact[i]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            table: self.table,
            order,
            c: self.c[..self.table.len(order)].to_vec(),
        }
    }

    /// `∂f/∂t_var` as a jet of one lower order.
    pub fn d(&self, var: usize) -> Jet {
        assert!(self.order >= 1, "derivative of an order-0 jet");
        let t = self.table;
        let n = t.nvars;
        let len = t.len(self.order - 1);
        let c = (0..len)
            .map(|r| {
                let j = t.up[r * n + var] as usize;
                self.c[j] * (t.monos[r][var] as f64 + 1.0)
            })
            .collect();
        Jet {
            table: t,
            order: self.order - 1,
            c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    fn common(&self, other: &Jet) -> usize {
        assert!(
            std::ptr::eq(self.table, other.table),
            "jets over different variable sets"
        );
        self.order.min(other.order)
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.common(other);
        let len = self.table.len(order);
        let c = self.c[..len]
            .iter()
            .zip(&other.c[..len])
            .map(|(&a, &b)| f(a, b))
            .collect();
        Jet {
            table: self.table,
            order,
            c,
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            table: self.table,
            order: self.order,
            c: self.c.iter().map(|&a| f(a)).collect(),
        }
    }

    fn product(&self, other: &Jet) -> Jet {
        let order = self.common(other);
        let t = self.table;
        let len = t.len(order);
        let mut c = vec![0.0; len];
        for (r, out) in c.iter_mut().enumerate() {
            let (s, e) = (t.pair_off[r] as usize, t.pair_off[r + 1] as usize);
            let mut acc = 0.0;
            for &(i, j) in &t.pairs[s..e] {
                acc += self.c[i as usize] * other.c[j as usize];
            }
            *out = acc;
        }
        Jet { table: t, order, c }
    }

    /// `Σ_k taylor[k] · (self − self(0))^k`, the composition with a univariate
    /// function whose scaled derivatives at the base value are `taylor`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        debug_assert!(taylor.len() > self.order);
        let mut h = self.clone();
        h.c[0] = 0.0;
        let mut acc = self.lift(taylor[self.order]);
        for k in (0..self.order).rev() {
            acc = acc.product(&h);
            acc.c[0] += taylor[k];
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        let mut t = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(e / fact);
        }
        self.compose(&t)
    }

    /// Natural log; the caller guarantees a positive base value.
    pub fn ln(&self) -> Jet {
        let a = self.value();
        let mut t = vec![a.ln()];
        for k in 1..=self.order {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&t)
    }

    /// Real power with a constant exponent.
    pub fn powf(&self, r: f64) -> Jet {
        let a = self.value();
        let mut t = vec![a.powf(r)];
        let mut binom = 1.0;
        for k in 1..=self.order {
            binom *= (r - k as f64 + 1.0) / k as f64;
            t.push(binom * a.powf(r - k as f64));
        }
        self.compose(&t)
    }

    /// Integer power; exact zero coefficients beyond the degree of a monomial.
    pub fn powi(&self, n: i32) -> Jet {
        let a = self.value();
        let mut t = vec![a.powi(n)];
        let mut binom = 1.0;
        for k in 1..=self.order {
            if n >= 0 && k as i32 > n {
                t.push(0.0);
                continue;
            }
            binom *= (n as f64 - k as f64 + 1.0) / k as f64;
            t.push(binom * a.powi(n - k as i32));
        }
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Jet {
        let a = self.value();
        let s = a.sqrt();
        let mut t = vec![s];
        let mut binom = 1.0;
        for k in 1..=self.order {
            binom *= (0.5 - k as f64 + 1.0) / k as f64;
            t.push(binom * s / a.powi(k as i32));
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Jet {
        self.lift(1.0).quotient(self)
    }

    /// `self / other` by the recurrence `q·b = a`, so the base value is the
    /// plain floating-point quotient.
    fn quotient(&self, other: &Jet) -> Jet {
        let order = self.common(other);
        let t = self.table;
        let len = t.len(order);
        let b0 = other.c[0];
        let mut q = vec![0.0; len];
        for r in 0..len {
            let (s, e) = (t.pair_off[r] as usize, t.pair_off[r + 1] as usize);
            let mut acc = self.c[r];
            for &(i, j) in &t.pairs[s..e] {
                if j != 0 {
                    acc -= q[i as usize] * other.c[j as usize];
                }
            }
            q[r] = acc / b0;
        }
        Jet {
            table: t,
            order,
            c: q,
        }
    }

    pub fn sin(&self) -> Jet {
        self.trig(false)
    }

    pub fn cos(&self) -> Jet {
        self.trig(true)
    }

    fn trig(&self, cosine: bool) -> Jet {
        let (s, c) = self.value().sin_cos();
        let cycle = if cosine {
            [c, -s, -c, s]
        } else {
            [s, c, -s, -c]
        };
        let mut t = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for k in 0..=self.order {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(cycle[k % 4] / fact);
        }
        // keep the order-0 value bit-identical to the plain functions
        t[0] = if cosine {
            self.value().cos()
        } else {
            self.value().sin()
        };
        self.compose(&t)
    }

    /// `|f|`, valid away from zero (or at zero for order 0).
    pub fn abs(&self) -> Jet {
        if self.value() < 0.0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.map(|a| a * s)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map(|a| -a)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

macro_rules! jet_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_binop!(Add, add, |a, b| a.zip(b, |x, y| x + y));
jet_binop!(Sub, sub, |a, b| a.zip(b, |x, y| x - y));
jet_binop!(Mul, mul, |a, b| a.product(b));
jet_binop!(Div, div, |a, b| a.quotient(b));

macro_rules! jet_scalar_op {
    ($tr:ident, $method:ident, $f:expr, $g:expr) => {
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                let f: fn(&Jet, f64) -> Jet = $f;
                f(self, rhs)
            }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                (&self).$method(rhs)
            }
        }
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let g: fn(f64, &Jet) -> Jet = $g;
                g(self, rhs)
            }
        }
        impl $tr<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self.$method(&rhs)
            }
        }
    };
}

jet_scalar_op!(
    Add,
    add,
    |a, s| {
        let mut r = a.clone();
        r.c[0] += s;
        r
    },
    |s, a| {
        let mut r = a.clone();
        r.c[0] += s;
        r
    }
);
jet_scalar_op!(
    Sub,
    sub,
    |a, s| {
        let mut r = a.clone();
        r.c[0] -= s;
        r
    },
    |s, a| {
        let mut r = -a;
        r.c[0] += s;
        r
    }
);
jet_scalar_op!(Mul, mul, |a, s| a.scale(s), |s, a| a.scale(s));
jet_scalar_op!(Div, div, |a, s| a.scale(1.0 / s), |s, a| a.recip().scale(s));
