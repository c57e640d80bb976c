mod common;

use approx::assert_relative_eq;
use common::*;
use kobageo::{Domain, DomainSpec, Error};

#[test]
fn membership() {
    assert!(bidisk().contains(&real(&[0.0, 0.0])).unwrap());
    assert!(!bidisk().contains(&real(&[1.1, 0.0])).unwrap());
    let d = ex51();
    assert!(d.contains(d.base_point()).unwrap());
    assert!(d.rho(d.base_point().coords()) < 0.0);
}

#[test]
fn dimension_mismatch_is_an_input_error() {
    assert!(matches!(bidisk().contains(&real(&[0.0])), Err(Error::Input(_))));
}

#[test]
fn boundary_distances() {
    assert_relative_eq!(disk().boundary_distance(&real(&[0.3])).unwrap(), 0.7, epsilon = 1e-15);
    assert_relative_eq!(bidisk().boundary_distance(&real(&[0.0, 0.9])).unwrap(), 0.1, epsilon = 1e-15);
    let b2 = Domain::from_json(r#"{"kind":"ball","params":{"d":2,"radius":2.0}}"#).unwrap();
    assert_relative_eq!(b2.boundary_distance(&real(&[1.0, 0.0])).unwrap(), 1.0, epsilon = 1e-15);
}

#[test]
fn line_radii() {
    assert_relative_eq!(disk().line_radius(&real(&[0.0]), &dir(&[1.0])).unwrap(), 1.0, epsilon = 1e-12);
    assert_relative_eq!(
        bidisk().line_radius(&real(&[0.0, 0.5]), &dir(&[1.0, 0.0])).unwrap(),
        1.0,
        epsilon = 1e-12
    );
}

#[test]
fn flat_direction_radius_deep_in_example52() {
    // the local model exp(-1/|z|^2) < Im z2 gives rho(r) = sqrt(1/log(1/r) - r^2)
    let d = ex52();
    for k in [16.0f64, 25.0] {
        let r = (-k).exp();
        let rho = (1.0 / k - r * r).sqrt();
        let got = d.line_radius(&pt(&[c(0.0, 0.0), c(0.0, r)]), &dir(&[1.0, 0.0])).unwrap();
        assert!(got >= rho * (1.0 - 1e-6), "r = e^-{k}: {got} < {rho}");
    }
}

#[test]
fn example52_lies_in_the_small_ball() {
    let d = ex52();
    assert!(d.enclosing_radius() < 0.33);
    let r = (-4.0f64).exp();
    let got = d.line_radius(&pt(&[c(0.0, 0.0), c(0.0, r)]), &dir(&[1.0, 0.0])).unwrap();
    assert!(got < d.enclosing_radius());
}

#[test]
fn ball_spec_gives_norm_minus_radius() {
    let d = ball2();
    let z = [c(0.3, 0.4), c(0.0, 0.0)];
    assert_relative_eq!(d.rho(&z), 0.5 - 1.0, epsilon = 1e-15);
}

#[test]
fn example_domains_are_flagged_convex() {
    assert!(ex51().is_convex());
    assert!(ex52().is_convex());
}

#[test]
fn parameter_windows_are_enforced() {
    for bad in [
        r#"{"kind":"example51","params":{"eps":0.5,"n":3}}"#,
        r#"{"kind":"example51","params":{"eps":0.3,"n":2}}"#,
        r#"{"kind":"example52","params":{"eps":0.4,"delta":0.05}}"#,
        r#"{"kind":"example52","params":{"eps":0.3,"delta":0.7}}"#,
        r#"{"kind":"ball","params":{"d":2,"radius":-1.0}}"#,
    ] {
        let e = Domain::from_json(bad).unwrap_err();
        assert!(e.is_validation(), "{bad}: {e}");
    }
}

#[test]
fn custom_domain_needs_interior_base_point() {
    let r = Domain::from_json(
        r#"{"kind":"custom","params":{"d":1,"expr":"x1^2 + y1^2 - 1","enclosing_radius":1.0,"base_point":[[2.0,0.0]]}}"#,
    );
    assert!(r.unwrap_err().is_validation());
}

#[test]
fn convexity_probe() {
    assert!(bidisk().convexity_probe(10_000, 1).unwrap().convex);
    assert!(ex51().convexity_probe(10_000, 1).unwrap().convex);
    let two_balls = Domain::from_json(
        r#"{"kind":"custom","params":{"d":1,
            "expr":"min((x1 - 1)^2 + y1^2 - 0.5, (x1 + 1)^2 + y1^2 - 0.5)",
            "enclosing_radius":2.0,"base_point":[[1.0,0.0]]}}"#,
    )
    .unwrap();
    let rep = two_balls.convexity_probe(10_000, 1).unwrap();
    assert!(!rep.convex);
    assert!(rep.witness.is_some());
}

#[test]
fn example_boundary_point_on_the_axis() {
    for d in [ex51(), ex52()] {
        let p0 = d.p0().expect("axis root");
        assert!(d.rho(p0.coords()).abs() < 1e-9);
        assert!(d.axis_roots().iter().all(|&c| c > 0.0));
    }
}

#[test]
fn spec_round_trips_through_json() {
    let spec = DomainSpec::unit_polydisk(3);
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(DomainSpec::from_json(&text).unwrap(), spec);
}
