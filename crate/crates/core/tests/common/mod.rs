#![allow(dead_code)]

use kobageo::{Direction, Domain, DomainSpec, Point, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pt(coords: &[C64]) -> Point {
    Point::new(coords.to_vec()).unwrap()
}

pub fn real(coords: &[f64]) -> Point {
    Point::real(coords).unwrap()
}

pub fn dir(coords: &[f64]) -> Direction {
    Direction::real(coords).unwrap()
}

pub fn disk() -> Domain {
    Domain::from_spec(&DomainSpec::unit_disk()).unwrap()
}

pub fn bidisk() -> Domain {
    Domain::from_spec(&DomainSpec::unit_polydisk(2)).unwrap()
}

pub fn ball2() -> Domain {
    Domain::from_spec(&DomainSpec::unit_ball(2)).unwrap()
}

pub fn ex51() -> Domain {
    Domain::from_json(r#"{"kind":"example51","params":{"eps":0.3,"n":3}}"#).unwrap()
}

pub fn ex52() -> Domain {
    Domain::from_json(r#"{"kind":"example52","params":{"eps":0.3,"delta":0.05}}"#).unwrap()
}

/// The unit disk described by an expression rather than as a model.
pub fn custom_disk() -> Domain {
    Domain::from_json(
        r#"{"kind":"custom","params":{"d":1,"expr":"x1^2 + y1^2 - 1","enclosing_radius":1.0,
            "base_point":[[0.0,0.0]],"convex":true}}"#,
    )
    .unwrap()
}
