//! Empirical visibility probes: Gromov products along boundary-approaching
//! schedules, divergence of distances between boundary pairs, depth of
//! almost-geodesic families, and exact geodesics of graph subspaces of the
//! polydisk.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{norm, sub, Interval, Point, C64};
use crate::model::{disk_geodesic_at, Model};
use crate::paths::{
    almost_geodesic_between, estimate_distance, verify_almost_geodesic, AlmostGeodesicCertificate,
    DistanceBudget, SampledPath,
};

/// Default number of steps of the geometric schedule `delta_n = 2^-n`.
pub const SCHEDULE_STEPS: usize = 20;
/// Samples along exact model geodesics.
pub const GEODESIC_SAMPLES: usize = 257;

/// Source of Kobayashi distance intervals.
pub trait DistanceSource: Sync {
    fn distance(&self, a: &Point, b: &Point) -> Result<Interval>;
}

/// Closed-form distances of a model domain.
pub struct ExactModelDistance<'a>(pub &'a Model);

impl DistanceSource for ExactModelDistance<'_> {
    fn distance(&self, a: &Point, b: &Point) -> Result<Interval> {
        Ok(Interval::point(self.0.distance(a.coords(), b.coords())?))
    }
}

/// Distances estimated by [`estimate_distance`].
pub struct EstimatedDistance<'a> {
    pub domain: &'a Domain,
    pub budget: DistanceBudget,
}

impl DistanceSource for EstimatedDistance<'_> {
    fn distance(&self, a: &Point, b: &Point) -> Result<Interval> {
        if let Some(m) = self.domain.model() {
            return ExactModelDistance(m).distance(a, b);
        }
        Ok(estimate_distance(self.domain, a, b, &self.budget)?.interval())
    }
}

/// Picks exact distances on model domains and estimates elsewhere.
pub fn distance_source(domain: &Domain) -> EstimatedDistance<'_> {
    EstimatedDistance {
        domain,
        budget: DistanceBudget::for_domain(domain),
    }
}

/// Gromov product `(x|y)_o = (k(o,x) + k(o,y) - k(x,y)) / 2` as an interval,
/// clamped below at zero.
pub fn gromov_product<S: DistanceSource + ?Sized>(src: &S, o: &Point, x: &Point, y: &Point) -> Result<Interval> {
    let ox = src.distance(o, x)?;
    let oy = src.distance(o, y)?;
    let xy = src.distance(x, y)?;
    let lo = 0.5 * (ox.lo + oy.lo - xy.hi);
    let hi = 0.5 * (ox.hi + oy.hi - xy.lo);
    Ok(Interval::new(lo.max(0.0), hi.max(0.0)))
}

/// Sequences `x_n -> p`, `y_n -> q` of interior points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "kebab-case")]
pub enum Schedule {
    /// `x_n = p + 2^-n (o - p)/|o - p|`, likewise for `y_n`.
    Radial { p: Point, q: Point, o: Point, steps: usize },
    /// Radial offsets plus a drift `drift * sqrt(delta_n)` along `i` times
    /// the inward direction.
    Tangential {
        p: Point,
        q: Point,
        o: Point,
        steps: usize,
        drift: f64,
    },
    Explicit { pairs: Vec<(Point, Point)> },
}

fn toward(p: &Point, o: &Point) -> Result<Vec<C64>> {
    let d = sub(o.coords(), p.coords());
    let n = norm(&d);
    if n == 0.0 {
        return Err(Error::Schedule("boundary point coincides with the base point".into()));
    }
    Ok(d.into_iter().map(|c| c / n).collect())
}

impl Schedule {
    pub fn radial(p: Point, q: Point, o: Point) -> Self {
        Schedule::Radial {
            p,
            q,
            o,
            steps: SCHEDULE_STEPS,
        }
    }

    /// `x_n = (r_n, s_n)`, `y_n = (-r_n, s_n)` with `r_n = 1 - 2^-n` and
    /// `s_n = tanh(2 artanh r_n)`, approaching `(1, 1)` and `(-1, 1)` in the
    /// bidisk.
    pub fn bidisk_adversarial(steps: usize) -> Self {
        let pairs = (1..=steps)
            .map(|n| {
                let r = 1.0 - 0.5f64.powi(n as i32);
                let s = (2.0 * r.atanh()).tanh();
                (
                    Point::from_vec_unchecked(vec![C64::new(r, 0.0), C64::new(s, 0.0)]),
                    Point::from_vec_unchecked(vec![C64::new(-r, 0.0), C64::new(s, 0.0)]),
                )
            })
            .collect();
        Schedule::Explicit { pairs }
    }

    /// The interior pairs, checked against the domain.
    pub fn pairs(&self, domain: &Domain) -> Result<Vec<(Point, Point)>> {
        let pairs = match self {
            Schedule::Radial { p, q, o, steps } => {
                let (up, uq) = (toward(p, o)?, toward(q, o)?);
                (1..=*steps)
                    .map(|n| {
                        let t = C64::new(0.5f64.powi(n as i32), 0.0);
                        (p.offset(&up, t), q.offset(&uq, t))
                    })
                    .collect()
            }
            Schedule::Tangential {
                p,
                q,
                o,
                steps,
                drift,
            } => {
                let (up, uq) = (toward(p, o)?, toward(q, o)?);
                let i = C64::new(0.0, 1.0);
                (1..=*steps)
                    .map(|n| {
                        let d = 0.5f64.powi(n as i32);
                        let tan = C64::new(drift * d.sqrt(), 0.0) * i;
                        (
                            p.offset(&up, C64::new(d, 0.0)).offset(&up, tan),
                            q.offset(&uq, C64::new(d, 0.0)).offset(&uq, tan),
                        )
                    })
                    .collect()
            }
            Schedule::Explicit { pairs } => pairs.clone(),
        };
        if pairs.is_empty() {
            return Err(Error::Schedule("schedule is empty".into()));
        }
        for (n, (x, y)) in pairs.iter().enumerate() {
            for z in [x, y] {
                if z.dim() != domain.dim() || !domain.inside(z.coords()) {
                    return Err(Error::Schedule(format!(
                        "step {} leaves the domain at {:?}",
                        n + 1,
                        z.coords()
                    )));
                }
            }
        }
        Ok(pairs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Thresholds for trend classification over the last third of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendTolerance {
    /// Maximum spread of a bounded tail.
    pub bounded_spread: f64,
    /// Minimum mean increment of a diverging tail.
    pub min_slope: f64,
}

impl Default for TrendTolerance {
    fn default() -> Self {
        TrendTolerance {
            bounded_spread: 1e-3,
            min_slope: 0.1,
        }
    }
}

pub fn classify_trend(values: &[f64], tol: &TrendTolerance) -> Trend {
    if values.len() < 3 {
        return Trend::Inconclusive;
    }
    let start = values.len() - values.len().div_ceil(3).max(2);
    let tail = &values[start..];
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - min <= tol.bounded_spread {
        return Trend::Bounded;
    }
    let incs: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = incs.iter().sum::<f64>() / incs.len() as f64;
    let prior_max = values[..start].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if incs.iter().all(|&d| d > 0.0) && mean >= tol.min_slope && tail[tail.len() - 1] > prior_max {
        return Trend::Diverging;
    }
    Trend::Inconclusive
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GromovEntry {
    pub x: Point,
    pub y: Point,
    pub value: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GromovProbeReport {
    pub o: Point,
    pub entries: Vec<GromovEntry>,
    pub trend: Trend,
}

/// Gromov products `(x_n | y_n)_o` along a schedule, classified by the trend
/// of their upper ends.
pub fn gromov_limsup_probe<S: DistanceSource + ?Sized>(
    src: &S,
    domain: &Domain,
    o: &Point,
    schedule: &Schedule,
    tol: &TrendTolerance,
) -> Result<GromovProbeReport> {
    domain.require_inside(o)?;
    let pairs = schedule.pairs(domain)?;
    let values: Vec<Interval> = pairs
        .par_iter()
        .map(|(x, y)| gromov_product(src, o, x, y))
        .collect::<Result<_>>()?;
    let his: Vec<f64> = values.iter().map(|v| v.hi).collect();
    let trend = classify_trend(&his, tol);
    let entries = pairs
        .into_iter()
        .zip(values)
        .map(|((x, y), value)| GromovEntry { x, y, value })
        .collect();
    Ok(GromovProbeReport {
        o: o.clone(),
        entries,
        trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub lower_bounds: Vec<f64>,
    pub trend: Trend,
}

/// Lower bounds on `k(x_n, y_n)` along a schedule.
pub fn boundary_pair_divergence_probe<S: DistanceSource + ?Sized>(
    src: &S,
    domain: &Domain,
    schedule: &Schedule,
    tol: &TrendTolerance,
) -> Result<DivergenceReport> {
    let pairs = schedule.pairs(domain)?;
    let lower_bounds: Vec<f64> = pairs
        .par_iter()
        .map(|(x, y)| src.distance(x, y).map(|i| i.lo))
        .collect::<Result<_>>()?;
    let incs_positive = lower_bounds.windows(2).all(|w| w[1] > w[0]);
    let trend = match classify_trend(&lower_bounds, tol) {
        Trend::Diverging if incs_positive => Trend::Diverging,
        Trend::Diverging => Trend::Inconclusive,
        t => t,
    };
    Ok(DivergenceReport { lower_bounds, trend })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VisibilityVerdict {
    VisibleEvidence,
    FailureEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityTrial {
    pub x: Point,
    pub y: Point,
    pub max_interior_depth: f64,
    pub depth_location: Option<Point>,
    pub certificate: Option<AlmostGeodesicCertificate>,
    pub exact: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisibilityReport {
    pub p: Point,
    pub q: Point,
    pub kappa: f64,
    /// Largest Euclidean distance of a trial endpoint from `p` (resp. `q`).
    pub neighborhood_radii: (f64, f64),
    pub compact_threshold: f64,
    pub trials: Vec<VisibilityTrial>,
    pub failed_trials: usize,
    pub verdict: VisibilityVerdict,
}

impl VisibilityReport {
    /// CSV with columns `trial, depth, re_loc_1, im_loc_1, ...`.
    pub fn depths_csv(&self) -> String {
        let d = self.p.dim();
        let mut s = String::from("trial,depth");
        for k in 1..=d {
            s.push_str(&format!(",re_loc_{k},im_loc_{k}"));
        }
        s.push('\n');
        for (i, t) in self.trials.iter().enumerate() {
            s.push_str(&format!("{i},{}", t.max_interior_depth));
            match &t.depth_location {
                Some(p) => p.coords().iter().for_each(|c| s.push_str(&format!(",{},{}", c.re, c.im))),
                None => (0..d).for_each(|_| s.push_str(",,")),
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityOptions {
    /// Overrides the default threshold of half the base-point depth.
    pub compact_threshold: Option<f64>,
    pub budget: Option<DistanceBudget>,
}

impl Default for VisibilityOptions {
    fn default() -> Self {
        VisibilityOptions {
            compact_threshold: None,
            budget: None,
        }
    }
}

fn trial_depth(domain: &Domain, path: &SampledPath) -> Result<(f64, Point)> {
    let (d, i) = path.max_depth(domain)?;
    Ok((d, path.points()[i].clone()))
}

/// Builds curves between pairs approaching `p` and `q` (exact geodesics on
/// model domains, certified almost-geodesics elsewhere) and records how deep
/// inside each one reaches.
pub fn visibility_probe(
    domain: &Domain,
    p: &Point,
    q: &Point,
    kappa: f64,
    schedule: &Schedule,
    opts: &VisibilityOptions,
) -> Result<VisibilityReport> {
    if !(kappa > 0.0) {
        return Err(Error::Input("kappa must be positive".into()));
    }
    if p == q {
        return Err(Error::Input("boundary points must be distinct".into()));
    }
    let pairs = schedule.pairs(domain)?;
    let threshold = match opts.compact_threshold {
        Some(t) => t,
        None => 0.5 * domain.boundary_distance(domain.base_point())?,
    };
    let budget = opts
        .budget
        .clone()
        .unwrap_or_else(|| DistanceBudget::for_domain(domain));
    let trials: Vec<VisibilityTrial> = pairs
        .par_iter()
        .map(|(x, y)| -> Result<VisibilityTrial> {
            let mut t = VisibilityTrial {
                x: x.clone(),
                y: y.clone(),
                max_interior_depth: f64::NAN,
                depth_location: None,
                certificate: None,
                exact: false,
                error: None,
            };
            let built = match domain.model() {
                Some(m) => crate::paths::exact_model_geodesic(m, x, y, GEODESIC_SAMPLES).map(|p| {
                    t.exact = true;
                    p
                }),
                None => almost_geodesic_between(domain, x, y, kappa, &budget).map(|g| {
                    t.certificate = Some(g.certificate);
                    g.path
                }),
            };
            match built {
                Ok(path) => {
                    let (d, loc) = trial_depth(domain, &path)?;
                    t.max_interior_depth = d;
                    t.depth_location = Some(loc);
                }
                Err(e) if e.is_validation() => return Err(e),
                Err(e) => t.error = Some(e.to_string()),
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;
    let depths: Vec<f64> = trials
        .iter()
        .filter(|t| t.error.is_none())
        .map(|t| t.max_interior_depth)
        .collect();
    let failed = trials.len() - depths.len();
    let verdict = if depths.len() < 2 {
        VisibilityVerdict::Inconclusive
    } else if depths.iter().all(|&d| d >= threshold) {
        VisibilityVerdict::VisibleEvidence
    } else {
        let monotone = depths.windows(2).all(|w| w[1] <= w[0]);
        let last = depths[depths.len() - 1];
        if monotone && last < threshold && last <= 0.25 * depths[0] {
            VisibilityVerdict::FailureEvidence
        } else {
            VisibilityVerdict::Inconclusive
        }
    };
    let radius = |b: &Point, first: bool| {
        pairs
            .iter()
            .map(|(x, y)| if first { x.dist(b) } else { y.dist(b) })
            .fold(0.0, f64::max)
    };
    Ok(VisibilityReport {
        p: p.clone(),
        q: q.clone(),
        kappa,
        neighborhood_radii: (radius(p, true), radius(q, false)),
        compact_threshold: threshold,
        trials,
        failed_trials: failed,
        verdict,
    })
}

/// A holomorphic map of the disk into the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GraphComponent {
    /// `sum c_k z^k`; requires sup over the unit circle below one.
    Polynomial { coeffs: Vec<C64> },
    /// `rotation * prod (z - a_k) / (1 - conj(a_k) z)` with `|a_k| < 1`.
    Blaschke {
        zeros: Vec<C64>,
        #[serde(default = "unit_rotation")]
        rotation: C64,
    },
}

fn unit_rotation() -> C64 {
    C64::new(1.0, 0.0)
}

impl GraphComponent {
    pub fn eval(&self, z: C64) -> C64 {
        match self {
            GraphComponent::Polynomial { coeffs } => {
                coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
            }
            GraphComponent::Blaschke { zeros, rotation } => zeros
                .iter()
                .fold(*rotation, |acc, a| acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)),
        }
    }
}

/// Holomorphic map `f: D -> D^(n-1)` whose graph is a subspace of `D^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMap {
    pub components: Vec<GraphComponent>,
}

/// Boundary samples used to check the polynomial sup-norm.
const SUP_SAMPLES: usize = 4096;

impl GraphMap {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidSubspace("graph map needs at least one component".into()));
        }
        for (k, c) in self.components.iter().enumerate() {
            match c {
                GraphComponent::Polynomial { coeffs } => {
                    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                        return Err(Error::InvalidSubspace(format!("component {k} is not finite")));
                    }
                    let sup = (0..SUP_SAMPLES)
                        .map(|j| {
                            let th = 2.0 * std::f64::consts::PI * j as f64 / SUP_SAMPLES as f64;
                            c.eval(C64::from_polar(1.0, th)).norm()
                        })
                        .fold(0.0, f64::max);
                    if sup >= 1.0 {
                        return Err(Error::InvalidSubspace(format!(
                            "component {k} has sampled sup-norm {sup} >= 1"
                        )));
                    }
                }
                GraphComponent::Blaschke { zeros, rotation } => {
                    if zeros.iter().any(|a| !(a.norm() < 1.0)) {
                        return Err(Error::InvalidSubspace(format!(
                            "component {k} has a zero outside the open disk"
                        )));
                    }
                    if (rotation.norm() - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidSubspace(format!(
                            "component {k} rotation must have modulus one"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: C64) -> Vec<C64> {
        self.components.iter().map(|c| c.eval(z)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphGeodesic {
    pub path: SampledPath,
    pub certificate: AlmostGeodesicCertificate,
}

/// Lift `u -> (sigma(u), f(sigma(u)))` of the unit-speed disk geodesic from
/// `z` to `w`; a geodesic of the polydisk, certified with `lambda = 1`,
/// `kappa = 1e-6`.
pub fn graph_subspace_geodesic(f: &GraphMap, z: C64, w: C64, samples: usize) -> Result<GraphGeodesic> {
    f.validate()?;
    if !(z.norm() < 1.0 && w.norm() < 1.0) {
        return Err(Error::OutsideDomain("endpoints must lie in the unit disk".into()));
    }
    if z == w {
        return Err(Error::Input("endpoints coincide".into()));
    }
    if samples < 2 {
        return Err(Error::Input("a geodesic needs at least two samples".into()));
    }
    let total = crate::model::disk_distance(z, w);
    let grid: Vec<f64> = (0..samples)
        .map(|i| total * i as f64 / (samples - 1) as f64)
        .collect();
    let pts: Vec<Point> = grid
        .iter()
        .map(|&u| {
            let s = disk_geodesic_at(z, w, u);
            let mut c = vec![s];
            c.extend(f.eval(s));
            Point::from_vec_unchecked(c)
        })
        .collect();
    let path = SampledPath::new(grid, pts)?;
    let domain = Domain::from_spec(&crate::domain::DomainSpec::Graph(crate::domain::GraphParams {
        map: f.clone(),
    }))?;
    let certificate = verify_almost_geodesic(&domain, &path, 1.0, 1e-6)?;
    Ok(GraphGeodesic { path, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_classification() {
        let tol = TrendTolerance::default();
        assert_eq!(classify_trend(&[0.0; 9], &tol), Trend::Bounded);
        let lin: Vec<f64> = (0..9).map(|i| 0.35 * i as f64).collect();
        assert_eq!(classify_trend(&lin, &tol), Trend::Diverging);
        let zig = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        assert_eq!(classify_trend(&zig, &tol), Trend::Inconclusive);
    }

    #[test]
    fn polynomial_sup_norm_checked() {
        let bad = GraphMap {
            components: vec![GraphComponent::Polynomial {
                coeffs: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            }],
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidSubspace(_))));
    }
}
