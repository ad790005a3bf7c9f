//! Jet-valued vectors and component tensors over a chart.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::jet::{Jet, Table};

/// An `n`-component vector of jets (a π-vector field near a point).
#[derive(Clone, Debug, PartialEq)]
pub struct JVec(pub Vec<Jet>);

impl JVec {
    pub fn zeros(n: usize, like: &Jet) -> JVec {
        JVec(vec![like.zero_like(); n])
    }

    /// The constant basis vector `e_j`.
    pub fn axis(n: usize, j: usize, like: &Jet) -> JVec {
        let mut v = JVec::zeros(n, like);
        v.0[j] = like.lift(1.0);
        v
    }

    pub fn from_values(values: &[f64], like: &Jet) -> JVec {
        JVec(values.iter().map(|&v| like.lift(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &JVec) -> Jet {
        let mut acc = &self.0[0] * &other.0[0];
        for (a, b) in self.0.iter().zip(&other.0).skip(1) {
            acc = acc + a * b;
        }
        acc
    }

    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(Jet::value).collect()
    }

    pub fn d(&self, var: usize) -> JVec {
        JVec(self.0.iter().map(|c| c.d(var)).collect())
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn truncate(&self, order: usize) -> JVec {
        JVec(self.0.iter().map(|c| c.truncate(order)).collect())
    }
}

impl std::ops::Index<usize> for JVec {
    type Output = Jet;
    fn index(&self, i: usize) -> &Jet {
        &self.0[i]
    }
}

macro_rules! jvec_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&JVec> for &JVec {
            type Output = JVec;
            fn $method(self, rhs: &JVec) -> JVec {
                JVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a $op b).collect())
            }
        }
        impl $tr<JVec> for JVec {
            type Output = JVec;
            fn $method(self, rhs: JVec) -> JVec {
                &self $op &rhs
            }
        }
        impl $tr<&JVec> for JVec {
            type Output = JVec;
            fn $method(self, rhs: &JVec) -> JVec {
                &self $op rhs
            }
        }
        impl $tr<JVec> for &JVec {
            type Output = JVec;
            fn $method(self, rhs: JVec) -> JVec {
                self $op &rhs
            }
        }
    };
}

jvec_binop!(Add, add, +);
jvec_binop!(Sub, sub, -);

impl Neg for &JVec {
    type Output = JVec;
    fn neg(self) -> JVec {
        JVec(self.0.iter().map(|a| -a).collect())
    }
}

impl Neg for JVec {
    type Output = JVec;
    fn neg(self) -> JVec {
        -&self
    }
}

impl Mul<&Jet> for &JVec {
    type Output = JVec;
    fn mul(self, s: &Jet) -> JVec {
        JVec(self.0.iter().map(|a| a * s).collect())
    }
}

impl Mul<&Jet> for JVec {
    type Output = JVec;
    fn mul(self, s: &Jet) -> JVec {
        &self * s
    }
}

impl Mul<Jet> for JVec {
    type Output = JVec;
    fn mul(self, s: Jet) -> JVec {
        &self * &s
    }
}

impl Mul<Jet> for &JVec {
    type Output = JVec;
    fn mul(self, s: Jet) -> JVec {
        self * &s
    }
}

impl Mul<f64> for &JVec {
    type Output = JVec;
    fn mul(self, s: f64) -> JVec {
        JVec(self.0.iter().map(|a| a * s).collect())
    }
}

impl Mul<f64> for JVec {
    type Output = JVec;
    fn mul(self, s: f64) -> JVec {
        &self * s
    }
}

/// Component tensor with `up` (0 or 1) contravariant and `down` covariant
/// slots, stored row-major with the contravariant index first.
#[derive(Clone, Debug, PartialEq)]
pub struct PiTensor {
    n: usize,
    up: usize,
    down: usize,
    comps: Vec<Jet>,
}

impl PiTensor {
    pub fn from_fn(n: usize, up: usize, down: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let rank = up + down;
        let total = n.pow(rank as u32);
        let mut idx = vec![0usize; rank];
        let mut comps = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            for slot in (0..rank).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            comps.push(f(&idx));
        }
        PiTensor { n, up, down, comps }
    }

    pub fn zeros(n: usize, up: usize, down: usize, like: &Jet) -> Self {
        Self::from_fn(n, up, down, |_| like.zero_like())
    }

    /// Mixed `(1,1)` tensor from the columns `cols[j] = T(e_j)`.
    pub fn from_columns(cols: &[JVec]) -> Self {
        let n = cols.len();
        Self::from_fn(n, 1, 1, |ix| cols[ix[1]].0[ix[0]].clone())
    }

    /// `(1,2)` tensor from the vectors `vals[j][k] = T(e_j, e_k)`.
    pub fn from_pairs(vals: &[Vec<JVec>]) -> Self {
        let n = vals.len();
        Self::from_fn(n, 1, 2, |ix| vals[ix[1]][ix[2]].0[ix[0]].clone())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn up(&self) -> usize {
        self.up
    }

    pub fn down(&self) -> usize {
        self.down
    }

    pub fn rank(&self) -> usize {
        self.up + self.down
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Jet) {
        let f = self.flat(idx);
        self.comps[f] = value;
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn values(&self) -> Vec<f64> {
        self.comps.iter().map(Jet::value).collect()
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> PiTensor {
        PiTensor {
            n: self.n,
            up: self.up,
            down: self.down,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn zip(&self, other: &PiTensor, f: impl Fn(&Jet, &Jet) -> Jet) -> PiTensor {
        assert_eq!(
            (self.n, self.up, self.down),
            (other.n, other.up, other.down)
        );
        PiTensor {
            n: self.n,
            up: self.up,
            down: self.down,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn d(&self, var: usize) -> PiTensor {
        self.map(|c| c.d(var))
    }

    /// Contract every covariant slot with the given vectors. For `up == 1`
    /// returns the resulting vector; for `up == 0` a one-component vector.
    pub fn apply(&self, args: &[&JVec]) -> JVec {
        assert_eq!(args.len(), self.down, "wrong number of tensor arguments");
        let n = self.n;
        let like = &self.comps[0];
        let outer = if self.up == 1 { n } else { 1 };
        let inner = n.pow(self.down as u32);
        let mut out = Vec::with_capacity(outer);
        let mut idx = vec![0usize; self.down];
        for i in 0..outer {
            let mut acc: Option<Jet> = None;
            for flat in 0..inner {
                let mut rem = flat;
                for slot in (0..self.down).rev() {
                    idx[slot] = rem % n;
                    rem /= n;
                }
                let mut term = self.comps[i * inner + flat].clone();
                if term.is_zero() {
                    continue;
                }
                for (slot, a) in idx.iter().zip(args) {
                    term = term * &a.0[*slot];
                }
                acc = Some(match acc {
                    Some(s) => s + term,
                    None => term,
                });
            }
            out.push(acc.unwrap_or_else(|| {
                let ord = args.iter().map(|a| a.order()).min().unwrap_or(like.order());
                like.truncate(ord).zero_like()
            }));
        }
        JVec(out)
    }

    /// Scalar-valued contraction of a `(0, k)` tensor.
    pub fn eval(&self, args: &[&JVec]) -> Jet {
        assert_eq!(self.up, 0);
        self.apply(args).0.remove(0)
    }

    /// Largest component-wise difference of base values.
    pub fn max_abs_diff(&self, other: &PiTensor) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(0.0f64, |m, (a, b)| m.max((a.value() - b.value()).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .fold(0.0f64, |m, a| m.max(a.value().abs()))
    }

    /// Matrix of base values for a rank-2 tensor.
    pub fn matrix_values(&self) -> DMatrix<f64> {
        assert_eq!(self.rank(), 2);
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(&[i, j]).value())
    }

    pub fn truncate(&self, order: usize) -> PiTensor {
        self.map(|c| c.truncate(order))
    }
}

impl Add<&PiTensor> for &PiTensor {
    type Output = PiTensor;
    fn add(self, rhs: &PiTensor) -> PiTensor {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub<&PiTensor> for &PiTensor {
    type Output = PiTensor;
    fn sub(self, rhs: &PiTensor) -> PiTensor {
        self.zip(rhs, |a, b| a - b)
    }
}

/// `M · v` for a rank-2 tensor read as a matrix (first index = row).
pub fn mat_vec(m: &PiTensor, v: &JVec) -> JVec {
    assert_eq!(m.rank(), 2);
    let n = m.dim();
    JVec(
        (0..n)
            .map(|i| {
                let mut acc = m.get(&[i, 0]) * &v.0[0];
                for k in 1..n {
                    acc = acc + m.get(&[i, k]) * &v.0[k];
                }
                acc
            })
            .collect(),
    )
}

/// Product of two rank-2 tensors as matrices; the result keeps `a`'s
/// contravariance pattern on the row and `b`'s on the column.
pub fn mat_mul(a: &PiTensor, b: &PiTensor) -> PiTensor {
    let n = a.dim();
    let up = a.up().min(1);
    PiTensor::from_fn(n, up, 2 - up, |ix| {
        let (i, j) = (ix[0], ix[1]);
        let mut acc = a.get(&[i, 0]) * b.get(&[0, j]);
        for k in 1..n {
            acc = acc + a.get(&[i, k]) * b.get(&[k, j]);
        }
        acc
    })
}

/// Inverse of a matrix of jets, as a contravariant `(2,0)`-shaped tensor
/// stored with `up = 0` (index pattern is tracked by the caller).
///
/// Uses the constant inverse `M₀⁻¹` and the terminating Neumann series
/// `Σ_k (−M₀⁻¹ E)^k M₀⁻¹`, where `E = M − M₀` has no constant term.
/// Returns `None` when the constant part is singular.
pub fn mat_inverse(m: &PiTensor) -> Option<PiTensor> {
    let n = m.dim();
    let m0 = m.matrix_values();
    let inv0 = m0.clone().try_inverse()?;
    if !inv0.iter().all(|v| v.is_finite()) {
        return None;
    }
    let like = m.get(&[0, 0]);
    let order = m.order();
    let lift = |mat: &DMatrix<f64>| {
        PiTensor::from_fn(n, m.up(), m.down(), |ix| {
            like.truncate(order).lift(mat[(ix[0], ix[1])])
        })
    };
    let base = lift(&inv0);
    if order == 0 {
        return Some(base);
    }
    let e = PiTensor::from_fn(n, m.up(), m.down(), |ix| {
        let c = m.get(ix).truncate(order);
        c.clone() - c.value()
    });
    let step = mat_mul(&lift(&(-inv0.clone())), &e);
    let mut acc = base.clone();
    let mut term = base;
    for _ in 0..order {
        term = mat_mul(&step, &term);
        acc = &acc + &term;
    }
    Some(acc)
}

/// Jets of the coordinate functions `t_v + base[v]` for all variables.
pub fn coordinate_jets(table: &'static Table, order: usize, base: &[f64]) -> Vec<Jet> {
    base.iter()
        .enumerate()
        .map(|(v, &b)| Jet::variable(table, order, v, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_matches_closed_form_2x2() {
        let t = Table::get(2);
        let x = Jet::variable(t, 3, 0, 0.4);
        let y = Jet::variable(t, 3, 1, -0.2);
        let m = PiTensor::from_fn(2, 0, 2, |ix| match (ix[0], ix[1]) {
            (0, 0) => x.exp(),
            (1, 1) => 1.0 + &y * &y,
            _ => &x * &y,
        });
        let inv = mat_inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let c = prod.get(&[i, j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((c.value() - expect).abs() < 1e-14);
                for &v in &c.coeffs()[1..] {
                    assert!(v.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn apply_contracts_slots_in_order() {
        let t = Table::get(1);
        let one = Jet::constant(t, 0, 1.0);
        // T^i_{jk} = 1 only for (0,0,1)
        let tt = PiTensor::from_fn(2, 1, 2, |ix| {
            one.lift(if ix == [0, 0, 1] { 1.0 } else { 0.0 })
        });
        let a = JVec::from_values(&[2.0, 0.0], &one);
        let b = JVec::from_values(&[0.0, 3.0], &one);
        assert_eq!(tt.apply(&[&a, &b]).values(), vec![6.0, 0.0]);
        assert_eq!(tt.apply(&[&b, &a]).values(), vec![0.0, 0.0]);
    }
}
