//! Numerical laboratory for the Kobayashi distance on bounded domains in `C^d`:
//! metric and distance bounds, certified almost-geodesics, visibility and
//! Gromov-product probes, Goldilocks and visibility-lemma checks, and
//! Wolff–Denjoy iteration.

pub mod criteria;
pub mod domain;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod geom;
pub mod metric;
pub mod model;
pub mod optim;
pub mod paths;
pub mod sampling;
pub mod visibility;

pub use domain::{Domain, DomainSpec};
pub use error::{Error, Result};
pub use geom::{Direction, Interval, Point, C64};
pub use model::Model;
