//! Points, tangent directions and small complex-vector helpers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A point of `C^d`, stored as `d` complex coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<C64>);

/// A tangent vector at a point of `C^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(Vec<C64>);

fn check_finite(coords: &[C64], what: &str) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::Input(format!("{what} must have at least one coordinate")));
    }
    if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Input(format!("{what} has a non-finite coordinate")));
    }
    Ok(())
}

impl Point {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        check_finite(&coords, "point")?;
        Ok(Point(coords))
    }

    /// Builds a point whose coordinates are all real.
    pub fn real(coords: &[f64]) -> Result<Self> {
        Point::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<C64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<C64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    /// `self + t * v`.
    pub fn offset(&self, v: &[C64], t: C64) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + t * b).collect())
    }

    pub fn lerp(&self, other: &Point, s: f64) -> Point {
        Point(lerp(&self.0, &other.0, s))
    }

    pub fn to(&self, other: &Point) -> Direction {
        Direction(sub(&other.0, &self.0))
    }
}

impl Direction {
    pub fn new(vec: Vec<C64>) -> Result<Self> {
        check_finite(&vec, "direction")?;
        Ok(Direction(vec))
    }

    pub fn real(coords: &[f64]) -> Result<Self> {
        Direction::new(coords.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(vec: Vec<C64>) -> Self {
        Direction(vec)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn scaled(&self, s: C64) -> Direction {
        Direction(self.0.iter().map(|c| c * s).collect())
    }

    /// Unit-norm copy; errors on the zero vector.
    pub fn normalized(&self) -> Result<Direction> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::Input("direction must be non-zero".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }
}

/// A closed interval `[lo, hi]` of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn lerp(a: &[C64], b: &[C64], s: f64) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * s).collect()
}

/// Hermitian product `sum a_k conj(b_k)`.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// Writes `z + t * u` into `out`.
pub(crate) fn ray_point(z: &[C64], u: &[C64], t: C64, out: &mut [C64]) {
    for ((o, a), b) in out.iter_mut().zip(z).zip(u) {
        *o = a + t * b;
    }
}

/// `artanh` evaluated from `1 - x^2` when that quantity is known more
/// accurately than `x` itself.
pub(crate) fn artanh_from_complement(x: f64, one_minus_x2: f64) -> f64 {
    if one_minus_x2 <= 0.0 {
        return f64::INFINITY;
    }
    // artanh x = 0.5 ln((1+x)^2 / (1-x^2))
    0.5 * ((1.0 + x) * (1.0 + x) / one_minus_x2).ln()
}
