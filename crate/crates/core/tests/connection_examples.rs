mod common;

use common::*;
use finsler_core::ad::ScalarField;
use finsler_core::ad::{JVec, PiTensor};
use finsler_core::connection::{ricci_horizontal, CurvatureKind, Direction};
use finsler_core::finsler::LocalGeometry;
use finsler_core::tripathi::{cartan_v_curvature, FormParam, Tripathi, TripathiParams};

#[test]
fn euclidean_cartan_data_vanish() {
    for n in [2, 3] {
        let f = euclidean(n);
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 5).unwrap();
            let cartan = geo.cartan();
            let like = geo.like();
            let z = JVec::from_values(&[0.3, -1.2, 0.7][..n], like);
            for j in 0..n {
                assert!(cartan
                    .cov_deriv_dir(Direction::Horizontal(j), &z)
                    .values()
                    .iter()
                    .all(|v| v.abs() < 1e-14));
                assert!(cartan
                    .cov_deriv_dir(Direction::Vertical(j), &z)
                    .values()
                    .iter()
                    .all(|v| v.abs() < 1e-14));
            }
            let tors = cartan.torsions(&geo.eta());
            for t in [&tors.q, &tors.tt, &tors.r_hat, &tors.p_hat, &tors.s_hat] {
                assert!(t.max_abs() < 1e-14);
            }
            for kind in [CurvatureKind::H, CurvatureKind::Hv, CurvatureKind::V] {
                assert!(cartan.contracted(kind, &geo.eta()).max_abs() < 1e-14);
            }
            assert!(
                ricci_horizontal(&cartan.curvature(CurvatureKind::H), &geo.g_inv).max_abs() < 1e-14
            );
        }
    }
}

#[test]
fn position_field_is_horizontally_parallel_and_vertically_the_identity() {
    for f in [randers2(), randers3()] {
        let n = f.dim();
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 4).unwrap();
            let cartan = geo.cartan();
            let eta = geo.eta();
            for j in 0..n {
                let h = cartan
                    .cov_deriv_dir(Direction::Horizontal(j), &eta)
                    .values();
                assert!(h.iter().all(|v| v.abs() < 1e-9), "{h:?}");
                let v = cartan.cov_deriv_dir(Direction::Vertical(j), &eta).values();
                for (i, vi) in v.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((vi - want).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn metric_deficits() {
    let f = randers2();
    // f₁ = 1, A = ℓ, everything else zero
    let params = TripathiParams {
        f1: ScalarField::parse(2, "1").unwrap(),
        a: FormParam::Ell,
        ..TripathiParams::vc(2)
    };
    for p in points(2) {
        let geo = LocalGeometry::new(&f, &p, 4).unwrap();
        let (h, v) = geo.cartan().metric_deficit(&geo.g);
        assert!(h.max_abs() < 1e-8 && v.max_abs() < 1e-8);

        let built = Tripathi::new(&geo, &params).unwrap().build();
        let (h, v) = built.metric_deficit(&geo.g);
        assert!(v.max_abs() < 1e-8);
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let want = 2.0 * geo.ell.0[j].value() * geo.g.get(&[k, l]).value();
                    assert!((h.get(&[j, k, l]).value() - want).abs() < 1e-7);
                }
            }
        }
    }
}

#[test]
fn cartan_torsions_and_riemannian_contraction() {
    let oracle = RiemannOracle {
        n: 2,
        metric: riemannian2_matrix,
    };
    for p in points(2) {
        let geo = LocalGeometry::new(&randers2(), &p, 4).unwrap();
        assert!(geo.cartan().torsions(&geo.eta()).q.max_abs() < 1e-10);

        let geo = LocalGeometry::new(&riemannian2(), &p, 4).unwrap();
        let tors = geo.cartan().torsions(&geo.eta());
        let riem = oracle.riemann(&p.x);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    // the curvature operator carries the opposite sign to the textbook tensor
                    let want: f64 = -(0..2)
                        .map(|m| riem[idx4(2, i, m, j, k)] * p.y[m])
                        .sum::<f64>();
                    assert!((tors.r_hat.get(&[i, j, k]).value() - want).abs() < 1e-7);
                }
            }
        }
    }
}

#[test]
fn cartan_curvature_examples() {
    for p in points(2) {
        let geo = LocalGeometry::new(&riemannian2(), &p, 4).unwrap();
        assert!(geo.cartan().curvature(CurvatureKind::V).comps.max_abs() < 1e-12);
    }
    for p in points(3) {
        let geo = LocalGeometry::new(&randers3(), &p, 4).unwrap();
        let cartan = geo.cartan();
        let s = cartan.curvature(CurvatureKind::V).comps;
        assert!(s.max_abs_diff(&cartan_v_curvature(&geo.t)) < 1e-7);

        let eta = geo.eta();
        assert!(cartan.contracted(CurvatureKind::V, &eta).max_abs() < 1e-9);
        let tors = cartan.torsions(&eta);
        assert!(
            cartan
                .contracted(CurvatureKind::H, &eta)
                .max_abs_diff(&tors.r_hat)
                < 1e-8
        );
        assert!(tors.s_hat.max_abs() < 1e-9);

        // tracing over the two frame slots of an antisymmetric kind gives zero
        let r = cartan.curvature(CurvatureKind::H).comps;
        let trace = PiTensor::from_fn(3, 1, 1, |ix| {
            let mut acc = r.get(&[ix[0], 0, 0, ix[1]]).clone();
            for a in 1..3 {
                acc = acc + r.get(&[ix[0], a, a, ix[1]]);
            }
            acc
        });
        assert!(trace.max_abs() < 1e-14);
    }
}
