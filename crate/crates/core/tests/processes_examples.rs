mod common;

use common::*;
use finsler_core::finsler::LocalGeometry;
use finsler_core::processes::{c_process, diagram_residuals, p1_process, ConnectionFamily};
use finsler_core::tripathi::{Tripathi, TripathiParams};

#[test]
fn p1_of_cartan_is_hashiguchi() {
    for f in [randers2(), randers3()] {
        let n = f.dim();
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 5).unwrap();
            let cartan = geo.cartan();
            let eta = geo.eta();
            let p_hat = cartan.torsions(&eta).p_hat;
            let gh = p1_process(&cartan, &eta);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let dn = geo.barthel.get(&[i, j]).d(n + k).value();
                        let gamma = geo.gamma.get(&[i, j, k]).value();
                        assert!((p_hat.get(&[i, j, k]).value() - (dn - gamma)).abs() < 1e-8);
                        assert!((gh.h.get(&[i, j, k]).value() - dn).abs() < 1e-8);
                    }
                }
            }
            assert!(gh.v.max_abs_diff(&cartan.v) < 1e-14 && gh.nl.max_abs_diff(&cartan.nl) < 1e-14);

            // the new (v)hv-torsion vanishes, so a second pass changes nothing
            let twice = p1_process(&gh, &eta);
            assert!(twice.max_abs_diff(&gh) < 1e-8);
        }
    }
}

#[test]
fn p1_leaves_a_flat_connection_alone() {
    let geo = LocalGeometry::new(&euclidean(2), &points(2)[0], 4).unwrap();
    let cartan = geo.cartan();
    assert!(p1_process(&cartan, &geo.eta()).max_abs_diff(&cartan) < 1e-14);
}

#[test]
fn c_process_examples() {
    for p in points(2) {
        let geo = LocalGeometry::new(&randers2(), &p, 5).unwrap();
        let gr = c_process(&geo.cartan());
        assert!(gr.v.max_abs() < 1e-12);
        assert!(gr.h.max_abs_diff(&geo.gamma) < 1e-14 && gr.nl.max_abs_diff(&geo.barthel) < 1e-14);

        let built = Tripathi::new(&geo, &sample_params(2)).unwrap().build();
        let once = c_process(&built);
        assert!(once.v.max_abs() < 1e-12);
        assert!(c_process(&once).max_abs_diff(&once) < 1e-12);
    }
}

#[test]
fn family_collapses_and_commutes() {
    for f in [randers2(), riemannian3()] {
        let n = f.dim();
        for p in points(n) {
            let geo = LocalGeometry::new(&f, &p, 5).unwrap();
            let eta = geo.eta();
            let vc = Tripathi::new(&geo, &TripathiParams::vc(n)).unwrap().build();
            let family = ConnectionFamily::derive(vc, &eta);
            let classical = ConnectionFamily::classical(&geo);
            for arrow in diagram_residuals(&family, Some(&classical)) {
                assert!(
                    arrow.residual < 1e-8,
                    "{}: {:e}",
                    arrow.label,
                    arrow.residual
                );
            }

            let built = Tripathi::new(&geo, &sample_params(n)).unwrap().build();
            let family = ConnectionFamily::derive(built, &eta);
            assert!(family.gb.max_abs_diff(&family.gb_alt) < 1e-8);
        }
    }
}

#[test]
fn euclidean_family_coincides() {
    let geo = LocalGeometry::new(&euclidean(3), &points(3)[1], 5).unwrap();
    let vc = Tripathi::new(&geo, &TripathiParams::vc(3)).unwrap().build();
    let fam = ConnectionFamily::derive(vc, &geo.eta());
    for other in [&fam.gh, &fam.gr, &fam.gb] {
        assert!(other.max_abs_diff(&fam.gc) < 1e-14);
    }
}
