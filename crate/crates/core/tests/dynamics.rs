mod common;

use common::*;
use kobageo::dynamics::{
    classify_wolff_denjoy, default_seeds, iterate_orbit, limit_constancy_probe, HoloMap, Moebius, WdClass, WdOptions,
};
use kobageo::{Error, Point};

fn hyperbolic() -> HoloMap {
    HoloMap::DiskMoebius(Moebius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)))
}

fn rotation() -> HoloMap {
    HoloMap::DiskMoebius(Moebius::rotation(std::f64::consts::FRAC_PI_2))
}

fn spec_seeds() -> Vec<Point> {
    vec![real(&[0.0]), pt(&[c(0.0, 0.3)]), real(&[-0.5])]
}

#[test]
fn hyperbolic_iterates() {
    let o = iterate_orbit(&disk(), &hyperbolic(), &real(&[0.0]), 3).unwrap();
    let xs: Vec<f64> = o.iterates.iter().map(|p| p.coords()[0].re).collect();
    assert_eq!(xs[1], 0.5);
    assert_eq!(xs[2], 0.8);
    assert!((xs[3] - 0.928571).abs() < 1e-6);
    assert!(o.displacements.iter().all(|&k| k >= 0.0));
}

#[test]
fn rotation_has_period_four() {
    let o = iterate_orbit(&disk(), &rotation(), &real(&[0.3]), 4).unwrap();
    assert!((o.iterates[4].coords()[0] - c(0.3, 0.0)).norm() < 1e-15);
}

#[test]
fn affine_contraction_to_interior_anchor() {
    let d = ex51();
    let b = pt(&[c(0.02, 0.0), c(0.0, 0.2)]);
    let f = HoloMap::AffineContraction { s: 0.5, anchor: b.clone() };
    let o = iterate_orbit(&d, &f, d.base_point(), 30).unwrap();
    let e0 = d.base_point().dist(&b);
    for (nu, p) in o.iterates.iter().enumerate() {
        assert!((p.dist(&b) - e0 * 0.5f64.powi(nu as i32)).abs() <= 1e-12);
    }
    let max_disp = o.displacements.iter().cloned().fold(0.0, f64::max);
    assert!(max_disp.is_finite() && max_disp < 10.0);
}

#[test]
fn dichotomy_on_the_disk() {
    let opts = WdOptions::default();
    let v = classify_wolff_denjoy(&disk(), &hyperbolic(), &spec_seeds(), 200, &opts).unwrap();
    assert_eq!(v.classification, WdClass::BoundaryConvergent);
    assert!((v.limit_point.unwrap().coords()[0] - c(1.0, 0.0)).norm() < 1e-6);
    let v = classify_wolff_denjoy(&disk(), &rotation(), &spec_seeds(), 200, &opts).unwrap();
    assert_eq!(v.classification, WdClass::CompactOrbits);
    assert!(v.limit_point.is_none());
}

#[test]
fn boundary_anchored_contraction_in_example52() {
    let d = ex52();
    let b = d.p0().unwrap();
    let f = HoloMap::AffineContraction { s: 0.8, anchor: b.clone() };
    let seeds = default_seeds(&d, 3, 1).unwrap();
    let v = classify_wolff_denjoy(&d, &f, &seeds, 200, &WdOptions::default()).unwrap();
    assert_eq!(v.classification, WdClass::BoundaryConvergent);
    assert!(v.limit_point.unwrap().dist(&b) < 1e-5);
    // displacement is unbounded for a boundary anchor
    let disp = &v.orbits[0].displacements;
    assert!(disp[disp.len() - 1] > disp[0] + 5.0, "{:?} {}", &disp[disp.len() - 5..], v.orbits[0].truncated);
}

#[test]
fn constancy_probe() {
    let opts = WdOptions::default();
    let grid = default_seeds(&disk(), 20, 3).unwrap();
    let rep = limit_constancy_probe(&disk(), &hyperbolic(), &grid, 200, &opts).unwrap();
    assert!(rep.applicable && rep.constant);
    assert!((rep.limit_point.unwrap().coords()[0] - c(1.0, 0.0)).norm() < 1e-6);

    let rep = limit_constancy_probe(&disk(), &rotation(), &grid, 200, &opts).unwrap();
    assert!(!rep.applicable);

    let b = bidisk();
    let m = Moebius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
    let f = HoloMap::PolydiskProduct { factors: vec![m, m] };
    let grid = default_seeds(&b, 12, 3).unwrap();
    let rep = limit_constancy_probe(&b, &f, &grid, 200, &opts).unwrap();
    assert!(rep.applicable && rep.constant, "{rep:?}");
    let xi = rep.limit_point.unwrap();
    assert!(xi.coords().iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-5));
}

#[test]
fn invalid_maps_are_rejected() {
    let grow = HoloMap::DiskMoebius(Moebius::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
    assert!(matches!(iterate_orbit(&disk(), &grow, &real(&[0.1]), 5), Err(Error::MapValidity(_))));
    let f = HoloMap::AffineContraction { s: 0.5, anchor: real(&[2.0, 0.0]) };
    assert!(matches!(iterate_orbit(&bidisk(), &f, &real(&[0.0, 0.0]), 5), Err(Error::MapValidity(_))));
    let two = vec![real(&[0.0]), real(&[0.1])];
    assert!(classify_wolff_denjoy(&disk(), &hyperbolic(), &two, 10, &WdOptions::default()).is_err());
}
