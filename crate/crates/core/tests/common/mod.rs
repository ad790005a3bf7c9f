//! Shared sample metrics and independent oracles for the integration tests.
#![allow(dead_code)]

use finsler_core::ad::{CovectorField, MatrixField, ScalarField};
use finsler_core::connection::ConnectionCoefficients;
use finsler_core::finsler::{ChartBox, ChartPoint, FinslerStructure, LocalGeometry};
use finsler_core::tripathi::{EndoParam, FormParam, TripathiParams};
use nalgebra::{DMatrix, DVector};

pub fn structure(name: &str, n: usize, src: &str) -> FinslerStructure {
    FinslerStructure::parse(name, n, src, ChartBox::cube(n, 1.0)).unwrap()
}

pub fn euclidean(n: usize) -> FinslerStructure {
    let terms: Vec<String> = (1..=n).map(|i| format!("y{i}^2")).collect();
    structure("euclidean", n, &format!("sqrt({})", terms.join(" + ")))
}

/// `dx1² + e^{2x1} dx2²`, Gaussian curvature −1.
pub fn riemannian2() -> FinslerStructure {
    structure("riemannian", 2, "sqrt(y1^2 + exp(2*x1)*y2^2)")
}

pub fn riemannian2_matrix(x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, (2.0 * x[0]).exp()])
}

pub fn riemannian3() -> FinslerStructure {
    structure(
        "riemannian3",
        3,
        "sqrt(y1^2 + exp(2*x1)*y2^2 + (1 + x2^2)*y3^2 + 0.4*x3*y1*y2)",
    )
}

pub fn riemannian3_matrix(x: &[f64]) -> DMatrix<f64> {
    let c = 0.2 * x[2];
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0,
            c,
            0.0,
            c,
            (2.0 * x[0]).exp(),
            0.0,
            0.0,
            0.0,
            1.0 + x[1] * x[1],
        ],
    )
}

pub fn randers2() -> FinslerStructure {
    structure(
        "randers",
        2,
        "sqrt((1 + x2^2)*y1^2 + y2^2) + 0.5*sqrt(1 + x2^2)*y1",
    )
}

pub fn randers3() -> FinslerStructure {
    structure(
        "randers3",
        3,
        "sqrt((1 + x2^2)*y1^2 + y2^2 + exp(x1)*y3^2) + 0.5*sqrt(1 + x2^2)*y1",
    )
}

pub fn pt(x: &[f64], y: &[f64]) -> ChartPoint {
    ChartPoint::new(x.to_vec(), y.to_vec()).unwrap()
}

/// A few fixed points inside the unit chart with `|y|` near 1.
pub fn points(n: usize) -> Vec<ChartPoint> {
    let raw: [([f64; 3], [f64; 3]); 4] = [
        ([0.2, -0.3, 0.1], [0.9, 0.6, -0.7]),
        ([-0.4, 0.1, 0.3], [-0.5, 0.8, 0.4]),
        ([0.0, 0.45, -0.2], [0.3, -1.1, 0.2]),
        ([0.35, 0.05, 0.4], [-0.8, -0.4, -0.9]),
    ];
    raw.iter().map(|(x, y)| pt(&x[..n], &y[..n])).collect()
}

/// Fourth-order central difference of a scalar function.
pub fn diff4(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn idx3(n: usize, i: usize, j: usize, k: usize) -> usize {
    (i * n + j) * n + k
}

pub fn idx4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

/// Levi-Civita data of a Riemannian metric `a(x)` by finite differences.
pub struct RiemannOracle {
    pub n: usize,
    pub metric: fn(&[f64]) -> DMatrix<f64>,
}

const STEP: f64 = 1e-3;

impl RiemannOracle {
    fn shifted(x: &[f64], a: usize, t: f64) -> Vec<f64> {
        let mut z = x.to_vec();
        z[a] = t;
        z
    }

    /// `∂_a a_ij`.
    fn dmetric(&self, x: &[f64], a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            diff4(
                |t| (self.metric)(&Self::shifted(x, a, t))[(i, j)],
                x[a],
                STEP,
            )
        })
    }

    /// `Γⁱ_jk`, flattened `[i][j][k]`.
    pub fn christoffel(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let inv = (self.metric)(x).try_inverse().unwrap();
        let d: Vec<DMatrix<f64>> = (0..n).map(|a| self.dmetric(x, a)).collect();
        let mut out = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out[idx3(n, i, j, k)] = (0..n)
                        .map(|l| 0.5 * inv[(i, l)] * (d[j][(l, k)] + d[k][(j, l)] - d[l][(j, k)]))
                        .sum();
                }
            }
        }
        out
    }

    /// `Rⁱ_cab` with `R(e_a, e_b)e_c = ∇_a∇_b e_c − ∇_b∇_a e_c`, flattened `[i][c][a][b]`.
    pub fn riemann(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let gam = self.christoffel(x);
        let dgam: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                (0..n * n * n)
                    .map(|slot| {
                        diff4(
                            |t| self.christoffel(&Self::shifted(x, a, t))[slot],
                            x[a],
                            STEP,
                        )
                    })
                    .collect()
            })
            .collect();
        let g = |i, j, k| gam[idx3(n, i, j, k)];
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for c in 0..n {
                for a in 0..n {
                    for b in 0..n {
                        let mut v = dgam[a][idx3(n, i, b, c)] - dgam[b][idx3(n, i, a, c)];
                        for m in 0..n {
                            v += g(i, a, m) * g(m, b, c) - g(i, b, m) * g(m, a, c);
                        }
                        out[idx4(n, i, c, a, b)] = v;
                    }
                }
            }
        }
        out
    }

    /// `Ric_bc = Σ_i Rⁱ_cib`, flattened `[b][c]`.
    pub fn ricci(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let r = self.riemann(x);
        let mut out = vec![0.0; n * n];
        for b in 0..n {
            for c in 0..n {
                out[b * n + c] = (0..n).map(|i| r[idx4(n, i, c, i, b)]).sum();
            }
        }
        out
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn value(f: &ScalarField, p: &ChartPoint) -> f64 {
    f.value(p).unwrap()
}

fn form_values(f: &FormParam, n: usize, p: &ChartPoint) -> Vec<f64> {
    match f {
        FormParam::Field(c) => covector_values(c, p),
        other => panic!("oracle needs explicit covector fields, got {other:?} in dimension {n}"),
    }
}

fn covector_values(c: &CovectorField, p: &ChartPoint) -> Vec<f64> {
    c.exprs()
        .iter()
        .map(|e| {
            ScalarField::from_expr(c.dim(), e.clone())
                .unwrap()
                .value(p)
                .unwrap()
        })
        .collect()
}

fn matrix_values(m: &MatrixField, p: &ChartPoint) -> DMatrix<f64> {
    let n = m.dim();
    let vals: Vec<f64> = m
        .exprs()
        .iter()
        .map(|e| {
            ScalarField::from_expr(n, e.clone())
                .unwrap()
                .value(p)
                .unwrap()
        })
        .collect();
    DMatrix::from_row_slice(n, n, &vals)
}

/// Solution of the defining conditions as square linear systems, with the
/// smallest singular value of each system as a nondegeneracy witness.
pub struct UniqueSolution {
    /// `Hⁱ_jk` flattened `[i][j][k]`.
    pub h: Vec<f64>,
    /// `Nⁱ_j` flattened `[i][j]`.
    pub nl: Vec<f64>,
    /// `Vⁱ_jk` flattened `[i][j][k]`.
    pub v: Vec<f64>,
    pub min_singular_hn: f64,
    pub min_singular_v: f64,
}

fn solve_square(m: DMatrix<f64>, rhs: DVector<f64>) -> (Vec<f64>, f64) {
    assert_eq!(m.nrows(), m.ncols(), "system must be square");
    let svd = m.clone().svd(true, true);
    let min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sol = m.lu().solve(&rhs).expect("nonsingular system");
    (sol.iter().copied().collect(), min)
}

/// Solve horizontal metricity, quarter symmetry and regularity for
/// `(H, N)`, and vertical metricity with hv-torsion symmetry for `V`, at the
/// base point of `geo` (which needs an `L` jet of order at least 3).
pub fn solve_conditions(geo: &LocalGeometry, params: &TripathiParams) -> UniqueSolution {
    let n = geo.n;
    let p = &geo.point;
    let g = |k: usize, l: usize| geo.g.get(&[k, l]).value();
    let dg = |a: usize, k: usize, l: usize| geo.g.get(&[k, l]).d(a).value();
    let f1 = value(&params.f1, p);
    let f2 = value(&params.f2, p);
    let a = form_values(&params.a, n, p);
    let b = form_values(&params.b, n, p);
    let u = form_values(&params.u, n, p);
    let phi = match &params.phi {
        EndoParam::Field(m) => matrix_values(m, p),
        EndoParam::Identity => DMatrix::identity(n, n),
        other => panic!("oracle needs an explicit φ, got {other:?}"),
    };

    // unknowns: H at idx3, then N at n³ + i·n + j
    let nh = n * n * n;
    let size = nh + n * n;
    let mut m = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    let mut row = 0;
    for j in 0..n {
        for k in 0..n {
            for l in k..n {
                for mm in 0..n {
                    m[(row, idx3(n, mm, j, k))] += g(mm, l);
                    m[(row, idx3(n, mm, j, l))] += g(k, mm);
                    m[(row, nh + mm * n + j)] += dg(n + mm, k, l);
                }
                let expected = 2.0 * f1 * a[j] * g(k, l) + f2 * (b[k] * g(l, j) + b[l] * g(j, k));
                rhs[row] = dg(j, k, l) - expected;
                row += 1;
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            for i in 0..n {
                m[(row, idx3(n, i, j, k))] += 1.0;
                m[(row, idx3(n, i, k, j))] -= 1.0;
                rhs[row] = u[k] * phi[(i, j)] - u[j] * phi[(i, k)];
                row += 1;
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            m[(row, nh + i * n + j)] = 1.0;
            for k in 0..n {
                m[(row, idx3(n, i, j, k))] -= p.y[k];
            }
            row += 1;
        }
    }
    assert_eq!(row, size);
    let (sol, min_hn) = solve_square(m, rhs);

    let mut mv = DMatrix::zeros(nh, nh);
    let mut rv = DVector::zeros(nh);
    let mut row = 0;
    for j in 0..n {
        for k in 0..n {
            for l in k..n {
                for mm in 0..n {
                    mv[(row, idx3(n, mm, j, k))] += g(mm, l);
                    mv[(row, idx3(n, mm, j, l))] += g(k, mm);
                }
                rv[row] = dg(n + j, k, l);
                row += 1;
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            for l in k + 1..n {
                for i in 0..n {
                    mv[(row, idx3(n, i, j, k))] += g(i, l);
                    mv[(row, idx3(n, i, j, l))] -= g(i, k);
                }
                row += 1;
            }
        }
    }
    assert_eq!(row, nh);
    let (v, min_v) = solve_square(mv, rv);

    UniqueSolution {
        h: sol[..nh].to_vec(),
        nl: sol[nh..].to_vec(),
        v,
        min_singular_hn: min_hn,
        min_singular_v: min_v,
    }
}

/// Base values of a connection's coefficients, flattened like [`UniqueSolution`].
pub fn coefficient_values(conn: &ConnectionCoefficients) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let vals =
        |t: &finsler_core::ad::PiTensor| t.comps().iter().map(|c| c.value()).collect::<Vec<f64>>();
    (vals(&conn.h), vals(&conn.nl), vals(&conn.v))
}

/// Parameters with every field an explicit low-degree polynomial.
pub fn sample_params(n: usize) -> TripathiParams {
    let cov = |src: &[&str]| FormParam::Field(CovectorField::parse(n, &src[..n]).unwrap());
    let phi: Vec<&str> = [
        "0.3",
        "-0.8 + x1",
        "0.2",
        "0.5*y1",
        "1.1",
        "0.3*y2",
        "0.1",
        "x2*y1",
        "-0.4",
    ]
    .into_iter()
    .collect();
    let phi_src: Vec<&str> = if n == 2 {
        vec![phi[0], phi[1], phi[3], phi[4]]
    } else {
        phi[..n * n].to_vec()
    };
    TripathiParams {
        f1: ScalarField::parse(n, "0.3 + 0.1*x1").unwrap(),
        f2: ScalarField::parse(n, "-0.7 + 0.2*x2*y1").unwrap(),
        a: cov(&["0.4", "0.1*x1 - 0.3", "y1*0.2"]),
        b: cov(&["0.2*y2", "0.5", "x2"]),
        u: cov(&["-0.6 + x2", "0.25", "0.3*y1"]),
        phi: EndoParam::Field(MatrixField::parse(n, &phi_src).unwrap()),
    }
}
