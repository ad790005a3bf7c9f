mod common;

use common::*;
use finsler_core::ad::{JVec, ScalarField};
use finsler_core::config::random_params;
use finsler_core::connection::{Direction, TmField};
use finsler_core::finsler::{ChartPoint, LocalGeometry};
use finsler_core::tripathi::Tripathi;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chart_point() -> impl Strategy<Value = ChartPoint> {
    (
        prop::collection::vec(-0.4f64..0.4, 2),
        0.0f64..std::f64::consts::TAU,
        0.6f64..1.4,
    )
        .prop_map(|(x, th, r)| pt(&x, &[r * th.cos(), r * th.sin()]))
}

/// A vector field along the chart whose components are affine in `(x, y)`.
fn affine(geo: &LocalGeometry, coeffs: &[f64]) -> JVec {
    let m = geo.vars.len();
    JVec(
        (0..geo.n)
            .map(|i| {
                let c = &coeffs[i * (m + 1)..(i + 1) * (m + 1)];
                geo.vars
                    .iter()
                    .zip(&c[1..])
                    .fold(geo.l.lift(c[0]), |acc, (v, k)| &acc + &(v * *k))
            })
            .collect(),
    )
}

fn tm_field(geo: &LocalGeometry, coeffs: &[f64]) -> TmField {
    let h = affine(geo, &coeffs[..geo.n * 5]);
    let v = affine(geo, &coeffs[geo.n * 5..]);
    TmField(h.0.into_iter().chain(v.0).collect())
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

fn close(a: &JVec, b: &JVec, tol: f64) -> bool {
    let scale = a
        .values()
        .iter()
        .chain(&b.values())
        .fold(1.0f64, |m, v| m.max(v.abs()));
    a.values()
        .iter()
        .zip(b.values())
        .all(|(x, y)| (x - y).abs() <= tol * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torsions_read_off_the_coefficients(p in chart_point(), seed in any::<u64>()) {
        let f = randers2();
        let params = random_params(2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let geo = LocalGeometry::new(&f, &p, 5).unwrap();
        let built = Tripathi::new(&geo, &params).unwrap().build();
        let tors = built.torsions(&geo.eta());
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let q = tors.q.get(&[i, j, k]).value();
                    let h = built.h.get(&[i, j, k]).value() - built.h.get(&[i, k, j]).value();
                    prop_assert!((q - h).abs() < 1e-9 * h.abs().max(1.0));
                    let t = tors.tt.get(&[i, j, k]).value();
                    let v = built.v.get(&[i, j, k]).value();
                    prop_assert!((t - v).abs() < 1e-12 * v.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn covariant_derivative_obeys_leibniz(
        p in chart_point(),
        seed in any::<u64>(),
        x in coeffs(20),
        z in coeffs(10),
        s in coeffs(3),
    ) {
        let f = randers2();
        let params = random_params(2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let geo = LocalGeometry::new(&f, &p, 5).unwrap();
        let built = Tripathi::new(&geo, &params).unwrap().build();
        let scalar = ScalarField::parse(2, &format!("sin(({})*x1 + y2) + ({})*y1^2 + ({})*x2*y2", s[0], s[1], s[2])).unwrap();
        let fj = scalar.jet(&geo.vars).unwrap();
        let zf = affine(&geo, &z);
        let fz = JVec(zf.0.iter().map(|c| &fj * c).collect());
        let mut fields: Vec<TmField> = (0..2)
            .flat_map(|j| [Direction::Horizontal(j), Direction::Vertical(j)])
            .map(|d| built.frame(d))
            .collect();
        fields.push(tm_field(&geo, &x));
        for xf in &fields {
            let lhs = built.cov_deriv(xf, &fz);
            let xf_f = xf.apply(&fj);
            let dz = built.cov_deriv(xf, &zf);
            let rhs = JVec(zf.0.iter().zip(&dz.0).map(|(zc, dc)| &(&xf_f * zc) + &(&fj * dc)).collect());
            prop_assert!(close(&lhs, &rhs, 1e-10));
        }
    }

    #[test]
    fn curvature_is_tensorial_in_its_argument(
        p in chart_point(),
        seed in any::<u64>(),
        x in coeffs(20),
        y in coeffs(20),
        z in coeffs(10),
        s in coeffs(2),
    ) {
        let f = randers2();
        let params = random_params(2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let geo = LocalGeometry::new(&f, &p, 6).unwrap();
        let built = Tripathi::new(&geo, &params).unwrap().build();
        let scalar = ScalarField::parse(2, &format!("exp(({})*x1*y1) + ({})*y2", s[0], s[1])).unwrap();
        let fj = scalar.jet(&geo.vars).unwrap();
        let (xf, yf, zf) = (tm_field(&geo, &x), tm_field(&geo, &y), affine(&geo, &z));
        let fz = JVec(zf.0.iter().map(|c| &fj * c).collect());
        let lhs = built.curvature_op(&xf, &yf, &fz);
        let base = built.curvature_op(&xf, &yf, &zf);
        let rhs = JVec(base.0.iter().map(|c| &fj * c).collect());
        prop_assert!(close(&lhs, &rhs, 1e-9));
    }
}
