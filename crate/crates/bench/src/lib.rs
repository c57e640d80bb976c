//! Shared fixtures for the benchmarks.

use kobageo::{Domain, DomainSpec, Point, C64};

pub fn bidisk() -> Domain {
    Domain::from_spec(&DomainSpec::unit_polydisk(2)).expect("unit bidisk")
}

pub fn ball2() -> Domain {
    Domain::from_spec(&DomainSpec::unit_ball(2)).expect("unit ball")
}

pub fn example51() -> Domain {
    Domain::from_json(r#"{"kind":"example51","params":{"eps":0.4,"n":6}}"#).expect("example 51")
}

pub fn example52() -> Domain {
    Domain::from_json(r#"{"kind":"example52","params":{"eps":0.3,"delta":0.05}}"#).expect("example 52")
}

pub fn point(coords: &[(f64, f64)]) -> Point {
    Point::new(coords.iter().map(|&(re, im)| C64::new(re, im)).collect()).expect("finite point")
}
