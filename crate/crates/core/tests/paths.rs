mod common;

use approx::assert_relative_eq;
use common::*;
use kobageo::model::disk_geodesic_at;
use kobageo::paths::{
    almost_geodesic_between, distance_lower_bound, estimate_distance, exact_model_geodesic, kobayashi_length,
    reparametrize_unit_speed, verify_almost_geodesic, DistanceBudget, SampledPath,
};
use kobageo::{Error, Point};

fn line(f: impl Fn(f64) -> Point, n: usize) -> SampledPath {
    SampledPath::uniform((0..n).map(|i| f(i as f64 / (n - 1) as f64)).collect()).unwrap()
}

#[test]
fn straight_radial_disk_length() {
    let l = kobayashi_length(&disk(), &line(|t| real(&[0.8 * t]), 512)).unwrap();
    assert_relative_eq!(l.hi, 1.098612, max_relative = 0.01);
    assert!(l.lo <= 0.8f64.atanh() + 1e-9);
}

#[test]
fn bidisk_path_reduces_to_first_factor() {
    let l = kobayashi_length(&bidisk(), &line(|t| real(&[0.5 * t, 0.0]), 512)).unwrap();
    assert_relative_eq!(l.hi, 0.549306, max_relative = 0.01);
}

#[test]
fn constant_path_has_zero_length() {
    let p = SampledPath::new(vec![0.0, 1.0], vec![real(&[0.1, 0.1]), real(&[0.1, 0.1])]).unwrap();
    let l = kobayashi_length(&bidisk(), &p).unwrap();
    assert_eq!((l.lo, l.hi), (0.0, 0.0));
}

#[test]
fn distance_closed_forms() {
    let e = estimate_distance(&disk(), &real(&[0.0]), &real(&[0.5]), &DistanceBudget::default()).unwrap();
    assert_relative_eq!(e.upper, 0.549306, max_relative = 0.02);
    assert!(e.lower <= 0.5f64.atanh() + 1e-12);
    let e = estimate_distance(&bidisk(), &real(&[0.0, 0.0]), &real(&[0.5, 0.3]), &DistanceBudget::default()).unwrap();
    assert_relative_eq!(e.upper, 0.549306, max_relative = 0.02);
    let z = pt(&[c(0.0, 0.0), c(0.0, 0.2)]);
    let e = estimate_distance(&ex51(), &z, &z, &DistanceBudget::default()).unwrap();
    assert_eq!((e.lower, e.upper), (0.0, 0.0));
}

#[test]
fn distance_in_example51_is_bracketed() {
    let d = ex51();
    let b = d.base_point().clone();
    let w = pt(&[c(0.05, 0.02), c(0.0, 0.3)]);
    let e = estimate_distance(&d, &b, &w, &DistanceBudget::for_domain(&d)).unwrap();
    assert!(e.lower > 0.0 && e.lower <= e.upper);
    assert!(e.lower <= distance_lower_bound(&d, &b, &w).unwrap() + 1e-15);
}

#[test]
fn radial_disk_geodesic_is_tanh() {
    let g = exact_model_geodesic(disk().model().unwrap(), &real(&[0.0]), &real(&[0.8]), 101).unwrap();
    for (u, p) in g.grid().iter().zip(g.points()) {
        assert_relative_eq!(p.coords()[0].re, u.tanh(), epsilon = 1e-12);
    }
    let g = exact_model_geodesic(disk().model().unwrap(), &real(&[-0.9]), &real(&[0.9]), 101).unwrap();
    assert_relative_eq!(g.grid()[100], 2.0 * 0.9f64.atanh(), epsilon = 1e-12);
    assert!(g.points()[50].coords()[0].norm() < 1e-12);
}

#[test]
fn flat_bidisk_geodesic() {
    let g = exact_model_geodesic(bidisk().model().unwrap(), &real(&[0.9, 0.9]), &real(&[-0.9, 0.9]), 101).unwrap();
    let mid = &g.points()[50];
    assert!(mid.coords()[0].norm() < 1e-12);
    assert_relative_eq!(bidisk().boundary_distance(mid).unwrap(), 0.1, epsilon = 1e-12);
    let cert = verify_almost_geodesic(&bidisk(), &g, 1.0, 1e-3).unwrap();
    assert!(cert.worst_pair_margin >= -1e-9, "{cert:?}");
}

#[test]
fn exact_geodesic_certifies() {
    let g = exact_model_geodesic(disk().model().unwrap(), &real(&[-0.3]), &pt(&[c(0.2, 0.6)]), 201).unwrap();
    let cert = verify_almost_geodesic(&disk(), &g, 1.0, 1e-6).unwrap();
    assert!(cert.valid, "{cert:?}");
}

#[test]
fn folded_path_fails_certificate() {
    let pts: Vec<Point> = [0.0, 0.3, 0.6, 0.3, 0.0, 0.3, 0.6].iter().map(|&x| real(&[x])).collect();
    let p = SampledPath::uniform(pts).unwrap();
    let cert = verify_almost_geodesic(&disk(), &p, 1.0, 0.01).unwrap();
    assert!(cert.worst_pair_margin < 0.0);
    assert!(!cert.valid);
}

#[test]
fn reparametrized_radial_path() {
    let (sigma, cert) = reparametrize_unit_speed(&disk(), &line(|t| real(&[0.8 * t]), 257), 0.01).unwrap();
    assert!(cert.valid, "{cert:?}");
    for (u, p) in sigma.grid().iter().zip(sigma.points()) {
        assert!((p.coords()[0].re - u.tanh()).abs() < 1e-3);
    }
}

#[test]
fn duplicated_point_is_a_reparametrization_error() {
    let p = SampledPath::uniform(vec![real(&[0.0]), real(&[0.2]), real(&[0.2]), real(&[0.4])]).unwrap();
    assert!(matches!(reparametrize_unit_speed(&disk(), &p, 0.01), Err(Error::Reparametrization(_))));
}

#[test]
fn almost_geodesic_disk_radial() {
    let g = almost_geodesic_between(&disk(), &real(&[0.0]), &real(&[0.8]), 0.01, &DistanceBudget::default()).unwrap();
    assert!(g.certificate.valid);
    assert!((g.certificate.length - 0.8f64.atanh()).abs() <= 0.01);
    let dev = g
        .path
        .grid()
        .iter()
        .zip(g.path.points())
        .map(|(u, p)| (p.coords()[0] - disk_geodesic_at(c(0.0, 0.0), c(0.8, 0.0), *u)).norm())
        .fold(0.0, f64::max);
    assert!(dev < 1e-2);
}

#[test]
fn almost_geodesic_bidisk_flat() {
    let g = almost_geodesic_between(&bidisk(), &real(&[0.9, 0.9]), &real(&[-0.9, 0.9]), 0.05, &DistanceBudget::default()).unwrap();
    assert!(g.certificate.valid, "{:?}", g.certificate);
    let (depth, _) = g.path.max_depth(&bidisk()).unwrap();
    assert!(depth <= 0.1 + 1e-2, "{depth}");
}

#[test]
fn almost_geodesic_in_example51() {
    let d = ex51();
    // close to the base point (0, 0.2187i), where the bound gap fits inside kappa
    let a = pt(&[c(0.0, 0.0), c(0.0, 0.2)]);
    let b = pt(&[c(0.0, 0.0), c(0.0, 0.24)]);
    let g = almost_geodesic_between(&d, &a, &b, 0.1, &DistanceBudget::for_domain(&d)).unwrap();
    assert!(g.certificate.worst_pair_margin >= -1e-3, "{:?}", g.certificate);
    assert!(g.certificate.valid);
}

#[test]
fn csv_rows_match_samples() {
    let p = line(|t| real(&[0.5 * t, 0.1]), 5);
    assert_eq!(p.to_csv().lines().count(), 6);
}
