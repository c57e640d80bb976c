//! Iteration of holomorphic self-maps and the Wolff–Denjoy dichotomy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{dist, Point, C64};
use crate::paths::{hit_halfspace, landmark_halfspaces, lower_bound_with, HalfSpace};
use crate::sampling::{random_unit, substream};

/// Iterates with `0 <= rho <= BOUNDARY_SLACK` are treated as having reached
/// the boundary in floating point and end the orbit.
pub const BOUNDARY_SLACK: f64 = 1e-12;
/// Points of the validity grid.
const VALIDITY_SAMPLES: usize = 256;
const CIRCLE_SAMPLES: usize = 1024;

/// `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moebius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Moebius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Moebius { a, b, c, d }
    }

    pub fn rotation(theta: f64) -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Moebius::new(C64::from_polar(1.0, theta), zero, zero, one)
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Self-map of the unit disk: non-degenerate, pole outside the closed
    /// disk, circle image inside the closed disk and `|F(0)| < 1`.
    pub fn validate(&self) -> Result<()> {
        let det = self.a * self.d - self.b * self.c;
        if !(det.norm() > 1e-14) {
            return Err(Error::MapValidity("Moebius map is degenerate (ad - bc = 0)".into()));
        }
        if !(self.d.norm() > self.c.norm()) {
            return Err(Error::MapValidity("Moebius map has a pole in the closed disk".into()));
        }
        if !(self.eval(C64::new(0.0, 0.0)).norm() < 1.0) {
            return Err(Error::MapValidity("Moebius map sends 0 outside the disk".into()));
        }
        for j in 0..CIRCLE_SAMPLES {
            let th = 2.0 * std::f64::consts::PI * j as f64 / CIRCLE_SAMPLES as f64;
            let w = self.eval(C64::from_polar(1.0, th)).norm();
            if w > 1.0 + 1e-12 {
                return Err(Error::MapValidity(format!(
                    "Moebius map sends the unit circle outside the disk (|F| = {w})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum HoloMap {
    DiskMoebius(Moebius),
    PolydiskProduct { factors: Vec<Moebius> },
    /// `z -> b + s (z - b)`.
    AffineContraction { s: f64, anchor: Point },
    /// Applied first to last.
    Composition { maps: Vec<HoloMap> },
}

fn is_unit_disk(domain: &Domain) -> bool {
    match domain.model() {
        Some(crate::model::Model::Ball { center, radius }) => {
            center.iter().all(|c| c.norm() == 0.0) && *radius == 1.0
        }
        Some(crate::model::Model::Polydisk { center, radii }) => {
            center.iter().all(|c| c.norm() == 0.0) && radii.iter().all(|&r| r == 1.0)
        }
        None => false,
    }
}

impl HoloMap {
    pub fn apply(&self, z: &[C64]) -> Vec<C64> {
        match self {
            HoloMap::DiskMoebius(m) => vec![m.eval(z[0])],
            HoloMap::PolydiskProduct { factors } => {
                factors.iter().zip(z).map(|(m, &w)| m.eval(w)).collect()
            }
            HoloMap::AffineContraction { s, anchor } => z
                .iter()
                .zip(anchor.coords())
                .map(|(w, b)| b + (w - b) * *s)
                .collect(),
            HoloMap::Composition { maps } => {
                maps.iter().fold(z.to_vec(), |w, m| m.apply(&w))
            }
        }
    }

    fn check_family(&self, domain: &Domain) -> Result<()> {
        match self {
            HoloMap::DiskMoebius(m) => {
                if domain.dim() != 1 || !is_unit_disk(domain) {
                    return Err(Error::MapValidity("disk-moebius acts on the unit disk only".into()));
                }
                m.validate()
            }
            HoloMap::PolydiskProduct { factors } => {
                if factors.len() != domain.dim() || !is_unit_disk(domain) || domain.dim() < 2 {
                    return Err(Error::MapValidity(
                        "polydisk-product needs one factor per coordinate of the unit polydisk".into(),
                    ));
                }
                if !matches!(domain.model(), Some(crate::model::Model::Polydisk { .. })) {
                    return Err(Error::MapValidity("polydisk-product acts on the unit polydisk only".into()));
                }
                factors.iter().try_for_each(Moebius::validate)
            }
            HoloMap::AffineContraction { s, anchor } => {
                if !(*s > 0.0 && *s < 1.0) {
                    return Err(Error::MapValidity(format!("contraction factor {s} must lie in (0, 1)")));
                }
                if anchor.dim() != domain.dim() {
                    return Err(Error::MapValidity("anchor dimension mismatch".into()));
                }
                if !domain.is_convex() {
                    return Err(Error::MapValidity("affine contractions need a convex domain".into()));
                }
                if domain.rho(anchor.coords()) > BOUNDARY_SLACK {
                    return Err(Error::MapValidity("anchor lies outside the closed domain".into()));
                }
                Ok(())
            }
            HoloMap::Composition { maps } => {
                if maps.is_empty() {
                    return Err(Error::MapValidity("empty composition".into()));
                }
                maps.iter().try_for_each(|m| m.check_family(domain))
            }
        }
    }

    /// Family constraints plus images of a seeded interior sample staying in
    /// the domain.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        self.check_family(domain)?;
        let mut g = substream(0x5E1F_3A95, domain.dim() as u64);
        for _ in 0..VALIDITY_SAMPLES {
            let z = domain.sample_interior(&mut g)?;
            let w = self.apply(z.coords());
            if domain.rho(&w) > BOUNDARY_SLACK {
                return Err(Error::MapValidity(format!(
                    "map sends {:?} outside the domain",
                    z.coords()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub seed: Point,
    /// `F^nu(z)` for `nu = 0..=len-1`.
    pub iterates: Vec<Point>,
    pub depths: Vec<f64>,
    /// Lower bound on `k(F^nu(z), z0)` with `z0` the base point.
    pub displacements: Vec<f64>,
    /// Set when an iterate reached the boundary in floating point before `N`.
    pub truncated: bool,
}

impl OrbitRecord {
    pub fn terminal(&self) -> &Point {
        &self.iterates[self.iterates.len() - 1]
    }

    /// CSV with columns `nu, re_z1, im_z1, ..., depth, displacement`.
    pub fn to_csv(&self) -> String {
        let d = self.seed.dim();
        let mut s = String::from("nu");
        for k in 1..=d {
            s.push_str(&format!(",re_z{k},im_z{k}"));
        }
        s.push_str(",depth,displacement\n");
        for (nu, p) in self.iterates.iter().enumerate() {
            s.push_str(&nu.to_string());
            for c in p.coords() {
                s.push_str(&format!(",{},{}", c.re, c.im));
            }
            s.push_str(&format!(",{},{}\n", self.depths[nu], self.displacements[nu]));
        }
        s
    }
}

/// Forward orbit of `z` under `F`, `N` steps, stopping early (with the flag
/// set) if an iterate reaches the boundary numerically.
pub fn iterate_orbit(domain: &Domain, f: &HoloMap, z: &Point, n: usize) -> Result<OrbitRecord> {
    f.validate(domain)?;
    iterate_validated(domain, f, z, n)
}

fn iterate_validated(domain: &Domain, f: &HoloMap, z: &Point, n: usize) -> Result<OrbitRecord> {
    domain.require_inside(z)?;
    if n == 0 {
        return Err(Error::Input("the number of iterations must be at least one".into()));
    }
    let base = domain.base_point().coords();
    let mut hs = landmark_halfspaces(domain);
    if domain.is_convex() && domain.model().is_none() {
        hs.push(hit_halfspace(domain, base));
    }
    let record = |w: &[C64]| -> (f64, f64) {
        let hit = domain.nearest_boundary_raw(w);
        let k = if domain.is_convex() && domain.model().is_none() {
            let mut own = hs.clone();
            own.push(HalfSpace::from_hit(w, &hit));
            lower_bound_with(domain, w, base, &own)
        } else {
            lower_bound_with(domain, w, base, &hs)
        };
        (hit.distance, k.max(0.0))
    };
    let (d0, k0) = record(z.coords());
    let mut iterates = vec![z.clone()];
    let mut depths = vec![d0];
    let mut displacements = vec![k0];
    let mut truncated = false;
    let mut cur = z.coords().to_vec();
    for nu in 1..=n {
        let next = f.apply(&cur);
        if next.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::MapValidity(format!("iterate {nu} is not finite")));
        }
        let r = domain.rho(&next);
        if r >= 0.0 {
            if r <= BOUNDARY_SLACK {
                truncated = true;
                break;
            }
            return Err(Error::MapValidity(format!(
                "iterate {nu} left the domain (rho = {r})"
            )));
        }
        let (d, k) = record(&next);
        iterates.push(Point::from_vec_unchecked(next.clone()));
        depths.push(d);
        displacements.push(k);
        cur = next;
    }
    Ok(OrbitRecord {
        seed: z.clone(),
        iterates,
        depths,
        displacements,
        truncated,
    })
}

/// `count` deterministic seeds: the base point, then points at half its
/// boundary distance around it.
pub fn default_seeds(domain: &Domain, count: usize, seed: u64) -> Result<Vec<Point>> {
    let base = domain.base_point();
    let r = 0.5 * domain.boundary_distance(base)?;
    let mut g = substream(seed, 0xD1CE);
    let mut out = vec![base.clone()];
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::Sampling("could not place orbit seeds".into()));
        }
        let u = random_unit(&mut g, domain.dim());
        let z: Vec<C64> = base.coords().iter().zip(&u).map(|(a, c)| a + c * r).collect();
        if domain.inside(&z) {
            out.push(Point::from_vec_unchecked(z));
        }
    }
    out.truncate(count);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WdOptions {
    /// Fraction of each orbit forming the tail window.
    pub tail_fraction: f64,
    pub agreement_tol: f64,
    /// Defaults to a tenth of the base point's boundary distance.
    pub depth_floor: Option<f64>,
}

impl Default for WdOptions {
    fn default() -> Self {
        WdOptions {
            tail_fraction: 0.25,
            agreement_tol: 1e-5,
            depth_floor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WdClass {
    CompactOrbits,
    BoundaryConvergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WdVerdict {
    pub classification: WdClass,
    pub limit_point: Option<Point>,
    /// Largest pairwise distance between terminal iterates.
    pub agreement: f64,
    pub depth_floor: f64,
    pub tail_min_depths: Vec<f64>,
    pub orbits: Vec<OrbitRecord>,
}

fn tail<T>(v: &[T], fraction: f64) -> &[T] {
    let k = ((v.len() as f64 * fraction).ceil() as usize).clamp(1, v.len());
    &v[v.len() - k..]
}

fn mean_point(pts: &[&Point]) -> Point {
    let d = pts[0].dim();
    let mut acc = vec![C64::new(0.0, 0.0); d];
    for p in pts {
        for (a, c) in acc.iter_mut().zip(p.coords()) {
            *a += c;
        }
    }
    let n = pts.len() as f64;
    Point::from_vec_unchecked(acc.into_iter().map(|c| c / n).collect())
}

fn classify(orbits: Vec<OrbitRecord>, floor: f64, opts: &WdOptions) -> WdVerdict {
    let tail_min_depths: Vec<f64> = orbits
        .iter()
        .map(|o| tail(&o.depths, opts.tail_fraction).iter().cloned().fold(f64::INFINITY, f64::min))
        .collect();
    let terminals: Vec<&Point> = orbits.iter().map(|o| o.terminal()).collect();
    let mut agreement: f64 = 0.0;
    for i in 0..terminals.len() {
        for j in i + 1..terminals.len() {
            agreement = agreement.max(terminals[i].dist(terminals[j]));
        }
    }
    let xi = mean_point(&terminals);
    let converges = terminals.iter().all(|t| t.dist(&xi) <= opts.agreement_tol)
        && orbits.iter().all(|o| {
            let t = tail(&o.depths, opts.tail_fraction);
            t.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15) && t[t.len() - 1] <= opts.agreement_tol
        });
    let (classification, limit_point) = if tail_min_depths.iter().all(|&d| d >= floor) {
        (WdClass::CompactOrbits, None)
    } else if converges {
        (WdClass::BoundaryConvergent, Some(xi))
    } else {
        (WdClass::Inconclusive, None)
    };
    WdVerdict {
        classification,
        limit_point,
        agreement,
        depth_floor: floor,
        tail_min_depths,
        orbits,
    }
}

/// Classifies the orbits of `seeds` (at least three) as relatively compact
/// or as converging to a common boundary point.
pub fn classify_wolff_denjoy(
    domain: &Domain,
    f: &HoloMap,
    seeds: &[Point],
    n: usize,
    opts: &WdOptions,
) -> Result<WdVerdict> {
    if seeds.len() < 3 {
        return Err(Error::Input("at least three seeds are required".into()));
    }
    if !(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0 && opts.agreement_tol > 0.0) {
        return Err(Error::Input("tail fraction must lie in (0, 1] and the tolerance be positive".into()));
    }
    f.validate(domain)?;
    let floor = match opts.depth_floor {
        Some(d) => d,
        None => 0.1 * domain.boundary_distance(domain.base_point())?,
    };
    let orbits = seeds
        .par_iter()
        .map(|z| iterate_validated(domain, f, z, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify(orbits, floor, opts))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstancyReport {
    /// False when the orbits do not converge to the boundary.
    pub applicable: bool,
    pub classification: WdClass,
    pub limit_point: Option<Point>,
    /// Largest distance from a terminal iterate to the common limit.
    pub spread: f64,
    /// Largest distance between the last even and last odd iterate of an orbit.
    pub even_odd_gap: f64,
    pub grid_size: usize,
    pub constant: bool,
}

/// Checks that every grid point's orbit has the same limit and that even and
/// odd subsequences agree.
pub fn limit_constancy_probe(
    domain: &Domain,
    f: &HoloMap,
    grid: &[Point],
    n: usize,
    opts: &WdOptions,
) -> Result<ConstancyReport> {
    if grid.len() < 10 {
        return Err(Error::Input("the constancy grid needs at least ten points".into()));
    }
    let v = classify_wolff_denjoy(domain, f, grid, n, opts)?;
    let Some(xi) = v.limit_point.clone() else {
        return Ok(ConstancyReport {
            applicable: false,
            classification: v.classification,
            limit_point: None,
            spread: f64::NAN,
            even_odd_gap: f64::NAN,
            grid_size: grid.len(),
            constant: false,
        });
    };
    let spread = v
        .orbits
        .iter()
        .map(|o| o.terminal().dist(&xi))
        .fold(0.0, f64::max);
    let even_odd_gap = v
        .orbits
        .iter()
        .map(|o| {
            let m = o.iterates.len();
            if m < 2 {
                return 0.0;
            }
            dist(o.iterates[m - 1].coords(), o.iterates[m - 2].coords())
        })
        .fold(0.0, f64::max);
    Ok(ConstancyReport {
        applicable: true,
        classification: v.classification,
        limit_point: Some(xi),
        spread,
        even_odd_gap,
        grid_size: grid.len(),
        constant: spread <= opts.agreement_tol && even_odd_gap <= opts.agreement_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hyperbolic_moebius_first_iterates() {
        let d = Domain::from_spec(&DomainSpec::unit_disk()).unwrap();
        let f = HoloMap::DiskMoebius(Moebius::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)));
        let o = iterate_orbit(&d, &f, &Point::origin(1), 3).unwrap();
        let xs: Vec<f64> = o.iterates.iter().map(|p| p.coords()[0].re).collect();
        assert!((xs[1] - 0.5).abs() < 1e-15);
        assert!((xs[2] - 0.8).abs() < 1e-15);
        assert!((xs[3] - 13.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn expanding_map_rejected() {
        let d = Domain::from_spec(&DomainSpec::unit_disk()).unwrap();
        let f = HoloMap::DiskMoebius(Moebius::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)));
        assert!(matches!(f.validate(&d), Err(Error::MapValidity(_))));
    }
}
