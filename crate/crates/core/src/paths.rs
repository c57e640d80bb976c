//! Sampled curves, Kobayashi lengths, variational distance estimates and the
//! unit-speed reparametrization that turns near-minimizing curves into
//! `(1, kappa)`-almost-geodesics.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{BoundaryHit, Domain};
use crate::error::{Error, Result};
use crate::geom::{dist, hdot, lerp, norm, sub, Interval, Point, C64};
use crate::metric::{metric_lower_raw, metric_upper_raw};
use crate::model::{pseudo_to_distance, Model};
use crate::sampling::{random_unit, substream};

/// Tolerance used when deciding whether a certificate is valid.
pub const TOL_GEO: f64 = 1e-3;
/// Fraction of `kappa` kept in reserve when closing the distance gap.
pub const GAP_SLACK: f64 = 0.1;
/// Jitter enforcing strict increase of the cumulative length.
pub const MONOTONE_JITTER: f64 = 1e-14;
/// Sub-pieces per segment when accumulating length for the inverse.
const INVERSE_SUBDIVISION: usize = 8;
/// Maximum number of sampled parameters used for pairwise checks.
const PAIR_SAMPLES: usize = 65;

/// A curve sampled at strictly increasing parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledPath {
    grid: Vec<f64>,
    points: Vec<Point>,
}

impl SampledPath {
    pub fn new(grid: Vec<f64>, points: Vec<Point>) -> Result<Self> {
        if grid.len() != points.len() {
            return Err(Error::Input("grid and points differ in length".into()));
        }
        if points.len() < 2 {
            return Err(Error::Input("a path needs at least two samples".into()));
        }
        if grid.iter().any(|t| !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("path grid must be finite and strictly increasing".into()));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(Error::Input("path points differ in dimension".into()));
        }
        Ok(SampledPath { grid, points })
    }

    /// Path with parameters `0, 1/(n-1), ..., 1`.
    pub fn uniform(points: Vec<Point>) -> Result<Self> {
        let n = points.len().max(2);
        let grid = (0..points.len()).map(|i| i as f64 / (n - 1) as f64).collect();
        SampledPath::new(grid, points)
    }

    /// Straight segment from `a` to `b` with `segments + 1` samples.
    pub fn chord(a: &Point, b: &Point, segments: usize) -> Result<Self> {
        let k = segments.max(1);
        SampledPath::uniform((0..=k).map(|i| a.lerp(b, i as f64 / k as f64)).collect())
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn start(&self) -> &Point {
        &self.points[0]
    }

    pub fn end(&self) -> &Point {
        &self.points[self.points.len() - 1]
    }

    /// CSV with columns `t, re_z1, im_z1, ..., re_zd, im_zd`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t");
        for k in 1..=self.dim() {
            s.push_str(&format!(",re_z{k},im_z{k}"));
        }
        s.push('\n');
        for (t, p) in self.grid.iter().zip(&self.points) {
            s.push_str(&t.to_string());
            for c in p.coords() {
                s.push_str(&format!(",{},{}", c.re, c.im));
            }
            s.push('\n');
        }
        s
    }

    /// Largest boundary distance along the samples and its index.
    pub fn max_depth(&self, domain: &Domain) -> Result<(f64, usize)> {
        let depths: Vec<f64> = self
            .points
            .par_iter()
            .map(|p| domain.boundary_distance(p))
            .collect::<Result<_>>()?;
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, &d) in depths.iter().enumerate() {
            if d > best.0 {
                best = (d, i);
            }
        }
        Ok(best)
    }
}

fn check_interior(domain: &Domain, points: &[Point]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.dim() != domain.dim() {
            return Err(Error::Input("path dimension does not match the domain".into()));
        }
        if !domain.inside(p.coords()) {
            return Err(Error::DegeneratePath(format!(
                "sample {i} is not an interior point"
            )));
        }
    }
    Ok(())
}

/// Trapezoid rule for the upper metric along the chord `a -> b`, split into
/// `sub` pieces. Infinite if a quadrature node leaves the domain.
fn chord_upper(domain: &Domain, a: &[C64], b: &[C64], sub: usize) -> f64 {
    let delta = crate::geom::sub(b, a);
    if norm(&delta) == 0.0 {
        return 0.0;
    }
    let piece: Vec<C64> = delta.iter().map(|c| c / sub as f64).collect();
    let mut total = 0.0;
    for j in 0..=sub {
        let w = if j == 0 || j == sub { 0.5 } else { 1.0 };
        let z = if j == 0 {
            a.to_vec()
        } else if j == sub {
            b.to_vec()
        } else {
            lerp(a, b, j as f64 / sub as f64)
        };
        if !domain.inside(&z) {
            return f64::INFINITY;
        }
        total += w * metric_upper_raw(domain, &z, &piece);
    }
    total
}

/// Midpoint rule for the lower metric along the chord `a -> b`.
fn chord_lower(domain: &Domain, a: &[C64], b: &[C64]) -> f64 {
    let delta = sub(b, a);
    let mid = lerp(a, b, 0.5);
    if !domain.inside(&mid) {
        return 0.0;
    }
    metric_lower_raw(domain, &mid, &delta)
}

/// Upper-bound lengths of the consecutive segments of `points`.
fn segment_uppers(domain: &Domain, points: &[Point]) -> Vec<f64> {
    (0..points.len() - 1)
        .into_par_iter()
        .map(|i| chord_upper(domain, points[i].coords(), points[i + 1].coords(), 1))
        .collect()
}

/// Kobayashi length of the polyline through the samples: midpoint rule on
/// lower metric bounds and trapezoid rule on upper bounds.
pub fn kobayashi_length(domain: &Domain, path: &SampledPath) -> Result<Interval> {
    check_interior(domain, &path.points)?;
    let pts = &path.points;
    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..pts.len() - 1)
        .into_par_iter()
        .map(|i| {
            let (a, b) = (pts[i].coords(), pts[i + 1].coords());
            (chord_lower(domain, a, b), chord_upper(domain, a, b, 1))
        })
        .unzip();
    let lower: f64 = lo.iter().sum();
    let upper: f64 = hi.iter().sum();
    if !upper.is_finite() {
        return Err(Error::DegeneratePath("a segment leaves the domain".into()));
    }
    Ok(Interval::new(lower.min(upper), upper))
}

/// Supporting half-space `{ Re <z - b, n> > 0 }` of a convex domain.
#[derive(Debug, Clone)]
pub(crate) struct HalfSpace {
    b: Vec<C64>,
    n: Vec<C64>,
}

impl HalfSpace {
    pub(crate) fn from_hit(z: &[C64], hit: &BoundaryHit) -> HalfSpace {
        let t = hit.distance * (1.0 + 1e-9) + 1e-300;
        HalfSpace {
            b: z.iter().zip(&hit.direction).map(|(a, u)| a + u * t).collect(),
            n: hit.direction.iter().map(|u| -u).collect(),
        }
    }

    /// Kobayashi distance of the half-space, a lower bound for any convex
    /// domain it contains.
    fn distance(&self, z: &[C64], w: &[C64]) -> f64 {
        let zeta = hdot(&sub(z, &self.b), &self.n);
        let omega = hdot(&sub(w, &self.b), &self.n);
        if zeta.re <= 0.0 || omega.re <= 0.0 {
            return 0.0;
        }
        let den = (zeta + omega.conj()).norm_sqr();
        let rho2 = (zeta - omega).norm_sqr() / den;
        let comp = 4.0 * zeta.re * omega.re / den;
        pseudo_to_distance(rho2, comp)
    }
}

pub(crate) fn landmark_halfspaces(domain: &Domain) -> Vec<HalfSpace> {
    domain
        .landmarks()
        .iter()
        .map(|l| HalfSpace {
            b: l.point.coords().to_vec(),
            n: l.inward_normal.coords().to_vec(),
        })
        .collect()
}

pub(crate) fn hit_halfspace(domain: &Domain, z: &[C64]) -> HalfSpace {
    HalfSpace::from_hit(z, &domain.nearest_boundary_raw(z))
}

/// Lower bound from the enclosing ball and a set of supporting half-spaces.
pub(crate) fn lower_bound_with(domain: &Domain, z: &[C64], w: &[C64], hs: &[HalfSpace]) -> f64 {
    if let Some(m) = domain.model() {
        return m.distance_unchecked(z, w);
    }
    let mut best = domain.enclosing_model().distance_unchecked(z, w);
    if domain.is_convex() {
        for h in hs {
            best = best.max(h.distance(z, w));
        }
    }
    best
}

fn lower_bound_raw(domain: &Domain, z: &[C64], w: &[C64]) -> f64 {
    if let Some(m) = domain.model() {
        return m.distance_unchecked(z, w);
    }
    let mut hs = landmark_halfspaces(domain);
    if domain.is_convex() {
        let mid = lerp(z, w, 0.5);
        hs.push(hit_halfspace(domain, z));
        hs.push(hit_halfspace(domain, w));
        if domain.inside(&mid) {
            hs.push(hit_halfspace(domain, &mid));
        }
    }
    lower_bound_with(domain, z, w, &hs)
}

/// Lower bound on the Kobayashi distance: exact on model domains, otherwise
/// the enclosing-ball distance and, for convex domains, supporting
/// half-space distances.
pub fn distance_lower_bound(domain: &Domain, z: &Point, w: &Point) -> Result<f64> {
    domain.require_inside(z)?;
    domain.require_inside(w)?;
    Ok(lower_bound_raw(domain, z.coords(), w.coords()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBudget {
    /// Segments of the finest polyline level.
    pub max_segments: usize,
    /// Quadrature resolution per polyline (total sub-pieces).
    pub resolution: usize,
    /// Pattern-search sweeps per level.
    pub sweeps: usize,
    /// Extra starts routed through random interior points.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DistanceBudget {
    fn default() -> Self {
        DistanceBudget {
            max_segments: 128,
            resolution: 256,
            sweeps: 30,
            restarts: 0,
            seed: 0,
        }
    }
}

impl DistanceBudget {
    /// Default budget scaled to the cost of the metric bounds on `domain`.
    pub fn for_domain(domain: &Domain) -> Self {
        if domain.model().is_some() {
            DistanceBudget::default()
        } else {
            DistanceBudget {
                max_segments: 32,
                resolution: 64,
                sweeps: 12,
                restarts: 0,
                seed: 0,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub witness: SampledPath,
}

impl DistanceEstimate {
    pub fn interval(&self) -> Interval {
        Interval::new(self.lower, self.upper)
    }
}

struct Polyline<'a> {
    domain: &'a Domain,
    nodes: Vec<Vec<C64>>,
    costs: Vec<f64>,
    sub: usize,
}

impl<'a> Polyline<'a> {
    fn new(domain: &'a Domain, nodes: Vec<Vec<C64>>, sub: usize) -> Self {
        let mut p = Polyline {
            domain,
            nodes,
            costs: Vec::new(),
            sub,
        };
        p.recost();
        p
    }

    fn recost(&mut self) {
        let (d, n, s) = (self.domain, &self.nodes, self.sub);
        self.costs = (0..n.len() - 1)
            .map(|i| chord_upper(d, &n[i], &n[i + 1], s))
            .collect();
    }

    fn total(&self) -> f64 {
        self.costs.iter().sum()
    }

    fn euclidean_length(&self) -> f64 {
        self.nodes.windows(2).map(|w| dist(&w[0], &w[1])).sum()
    }

    /// Coordinate pattern search over the interior nodes, accepting local
    /// decreases of the two adjacent segment lengths. Each node keeps its own
    /// step, grown after a successful move and halved after a failed one.
    fn pattern_search<R: Rng>(&mut self, sweeps: usize, rng: &mut R) {
        let k = self.nodes.len() - 1;
        if k < 2 {
            return;
        }
        let dim = self.nodes[0].len();
        let avg = self.euclidean_length() / k as f64;
        if avg == 0.0 {
            return;
        }
        let mut steps = vec![0.25 * avg; k + 1];
        let max_step = 0.5 * avg;
        let min_step = 1e-7 * avg;
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(2 * dim + 1);
        for j in 0..dim {
            for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
                let mut e = vec![C64::new(0.0, 0.0); dim];
                e[j] = unit;
                basis.push(e);
            }
        }
        let mut cand = vec![C64::new(0.0, 0.0); dim];
        for _ in 0..sweeps {
            basis.truncate(2 * dim);
            basis.push(random_unit(rng, dim));
            let mut active = false;
            for i in 1..k {
                if steps[i] < min_step {
                    continue;
                }
                active = true;
                let local = self.costs[i - 1] + self.costs[i];
                let mut moved = false;
                'dirs: for e in &basis {
                    for sign in [1.0, -1.0] {
                        for (c, (a, b)) in cand.iter_mut().zip(self.nodes[i].iter().zip(e)) {
                            *c = a + b * (sign * steps[i]);
                        }
                        if !self.domain.inside(&cand) {
                            continue;
                        }
                        let c1 = chord_upper(self.domain, &self.nodes[i - 1], &cand, self.sub);
                        let c2 = chord_upper(self.domain, &cand, &self.nodes[i + 1], self.sub);
                        if c1 + c2 < local * (1.0 - 1e-15) {
                            self.nodes[i].copy_from_slice(&cand);
                            self.costs[i - 1] = c1;
                            self.costs[i] = c2;
                            moved = true;
                            break 'dirs;
                        }
                    }
                }
                steps[i] = if moved { (1.5 * steps[i]).min(max_step) } else { 0.5 * steps[i] };
            }
            if !active {
                break;
            }
        }
    }

    /// Nodes spaced at equal upper length along the current polyline.
    fn resampled(&self, segments: usize) -> Vec<Vec<C64>> {
        let total = self.total();
        let mut out = Vec::with_capacity(segments + 1);
        out.push(self.nodes[0].clone());
        let mut i = 0;
        let mut acc = 0.0;
        for j in 1..segments {
            let target = total * j as f64 / segments as f64;
            while i < self.costs.len() - 1 && acc + self.costs[i] < target {
                acc += self.costs[i];
                i += 1;
            }
            let c = self.costs[i];
            let s = if c > 0.0 { ((target - acc) / c).clamp(0.0, 1.0) } else { 0.5 };
            out.push(lerp(&self.nodes[i], &self.nodes[i + 1], s));
        }
        out.push(self.nodes[self.nodes.len() - 1].clone());
        out
    }
}

fn subdivide(nodes: &[Vec<C64>], per: usize) -> Vec<Vec<C64>> {
    let mut out = Vec::with_capacity((nodes.len() - 1) * per + 1);
    for w in nodes.windows(2) {
        for j in 0..per {
            out.push(lerp(&w[0], &w[1], j as f64 / per as f64));
        }
    }
    out.push(nodes[nodes.len() - 1].clone());
    out
}

fn polyline_interior(domain: &Domain, nodes: &[Vec<C64>]) -> bool {
    subdivide(nodes, 64).iter().all(|z| domain.inside(z))
}

fn optimize(domain: &Domain, start: Vec<Vec<C64>>, budget: &DistanceBudget, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = crate::sampling::rng(seed);
    let mut k = 4.min(budget.max_segments.max(1));
    let init = Polyline::new(domain, subdivide(&start, 1), 1);
    let mut nodes = if init.total().is_finite() {
        init.resampled(k)
    } else {
        // fall back to equal Euclidean spacing when some chord leaves the domain
        let per = k.div_ceil(start.len() - 1);
        k = per * (start.len() - 1);
        subdivide(&start, per)
    };
    loop {
        let sub = (budget.resolution / k).max(1);
        let mut poly = Polyline::new(domain, nodes, sub);
        let sweeps = if k >= 64 { budget.sweeps.div_ceil(2) } else { budget.sweeps };
        poly.pattern_search(sweeps, &mut rng);
        if k >= budget.max_segments || !poly.total().is_finite() {
            return poly.nodes;
        }
        k = (2 * k).min(budget.max_segments);
        nodes = poly.resampled(k);
    }
}

/// Variational estimate of the Kobayashi distance: the upper bound is the
/// length of an optimized polyline, the lower bound is
/// [`distance_lower_bound`].
pub fn estimate_distance(
    domain: &Domain,
    z: &Point,
    w: &Point,
    budget: &DistanceBudget,
) -> Result<DistanceEstimate> {
    domain.require_inside(z)?;
    domain.require_inside(w)?;
    if budget.max_segments == 0 || budget.resolution == 0 {
        return Err(Error::Input("distance budget must allow at least one segment".into()));
    }
    let (a, b) = (z.coords().to_vec(), w.coords().to_vec());
    if a == b {
        return Ok(DistanceEstimate {
            lower: 0.0,
            upper: 0.0,
            witness: SampledPath::uniform(vec![z.clone(), w.clone()])?,
        });
    }
    let base = domain.base_point().coords().to_vec();
    let mut starts: Vec<Vec<Vec<C64>>> = Vec::new();
    let chord = vec![a.clone(), b.clone()];
    if polyline_interior(domain, &chord) {
        starts.push(chord);
    }
    let via_base = vec![a.clone(), base, b.clone()];
    if starts.is_empty() || budget.restarts > 0 {
        starts.push(via_base);
    }
    for i in 1..budget.restarts {
        let mut g = substream(budget.seed, 1000 + i as u64);
        if let Ok(p) = domain.sample_interior(&mut g) {
            starts.push(vec![a.clone(), p.into_coords(), b.clone()]);
        }
    }
    let results: Vec<Vec<Vec<C64>>> = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| optimize(domain, s, budget, budget.seed.wrapping_add(i as u64)))
        .collect();
    let final_res = budget.resolution.max(budget.max_segments);
    let mut best: Option<(f64, SampledPath)> = None;
    for nodes in results {
        let per = (final_res / (nodes.len() - 1)).max(1);
        let pts: Vec<Point> = subdivide(&nodes, per)
            .into_iter()
            .map(Point::from_vec_unchecked)
            .collect();
        let path = SampledPath::uniform(pts)?;
        let len = match kobayashi_length(domain, &path) {
            Ok(l) => l.hi,
            Err(_) => continue,
        };
        if best.as_ref().is_none_or(|(l, _)| len < *l) {
            best = Some((len, path));
        }
    }
    let (upper, witness) = best.ok_or_else(|| {
        Error::SearchFailure("no connecting path of finite length was found".into())
    })?;
    let lower = lower_bound_raw(domain, &a, &b);
    Ok(DistanceEstimate {
        lower,
        upper: upper.max(lower),
        witness,
    })
}

/// Closed-form geodesic of a model domain on a uniform arc-length grid.
pub fn exact_model_geodesic(model: &Model, z: &Point, w: &Point, samples: usize) -> Result<SampledPath> {
    let (grid, pts) = model.geodesic(z.coords(), w.coords(), samples)?;
    SampledPath::new(grid, pts.into_iter().map(Point::from_vec_unchecked).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostGeodesicCertificate {
    pub lambda: f64,
    pub kappa: f64,
    /// Minimum over sampled pairs of both distortion-inequality margins.
    pub worst_pair_margin: f64,
    pub worst_lower_margin: f64,
    pub worst_upper_margin: f64,
    /// Minimum of `k(s, t) + kappa - length(s, t)` over sampled pairs.
    pub subsegment_margin: f64,
    pub speed_max: f64,
    pub speed_min: f64,
    pub lipschitz_const: f64,
    pub lipschitz_bound: f64,
    pub length: f64,
    pub pairs_checked: usize,
    pub valid: bool,
}

fn sample_indices(n: usize) -> Vec<usize> {
    if n <= PAIR_SAMPLES {
        return (0..n).collect();
    }
    let mut v: Vec<usize> = (0..PAIR_SAMPLES)
        .map(|i| ((i as f64) * (n - 1) as f64 / (PAIR_SAMPLES - 1) as f64).round() as usize)
        .collect();
    v.dedup();
    v
}

/// Checks the `(lambda, kappa)` distortion inequalities, the subsegment
/// length bound, the speed bound and the Lipschitz bound on sampled pairs,
/// using distance intervals on the conservative side.
pub fn verify_almost_geodesic(
    domain: &Domain,
    path: &SampledPath,
    lambda: f64,
    kappa: f64,
) -> Result<AlmostGeodesicCertificate> {
    if !(lambda >= 1.0) {
        return Err(Error::Input("lambda must be at least 1".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Input("kappa must be positive".into()));
    }
    check_interior(domain, &path.points)?;
    let seg = segment_uppers(domain, &path.points);
    let mut cum = vec![0.0; path.len()];
    for i in 0..seg.len() {
        cum[i + 1] = cum[i] + seg[i];
    }
    let (mut speed_max, mut speed_min) = (0.0f64, f64::INFINITY);
    for (i, s) in seg.iter().enumerate() {
        let v = s / (path.grid[i + 1] - path.grid[i]);
        speed_max = speed_max.max(v);
        speed_min = speed_min.min(v);
    }
    let idx = sample_indices(path.len());
    let model = domain.model();
    let hs: Vec<HalfSpace> = if model.is_none() && domain.is_convex() {
        let mut hs: Vec<HalfSpace> = idx
            .par_iter()
            .map(|&i| hit_halfspace(domain, path.points[i].coords()))
            .collect();
        hs.extend(landmark_halfspaces(domain));
        hs
    } else {
        Vec::new()
    };
    let pairs: Vec<(usize, usize)> = idx
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| idx[a + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let margins: Vec<(f64, f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (zi, zj) = (path.points[i].coords(), path.points[j].coords());
            let dt = path.grid[j] - path.grid[i];
            let sub_len = cum[j] - cum[i];
            let (k_lo, k_hi) = match model {
                Some(m) => {
                    let k = m.distance_unchecked(zi, zj);
                    (k, k)
                }
                None => (lower_bound_with(domain, zi, zj, &hs), sub_len),
            };
            let lower_margin = k_lo - (dt / lambda - kappa);
            let upper_margin = lambda * dt + kappa - k_hi;
            let sub_margin = k_lo + kappa - sub_len;
            let lip = dist(zi, zj) / dt;
            (lower_margin, upper_margin, sub_margin, lip)
        })
        .collect();
    let mut worst_lower = f64::INFINITY;
    let mut worst_upper = f64::INFINITY;
    let mut subsegment = f64::INFINITY;
    let mut lip: f64 = 0.0;
    for &(a, b, c, l) in &margins {
        worst_lower = worst_lower.min(a);
        worst_upper = worst_upper.min(b);
        subsegment = subsegment.min(c);
        lip = lip.max(l);
    }
    for w in path.points.windows(2).zip(path.grid.windows(2)) {
        lip = lip.max(w.0[0].dist(&w.0[1]) / (w.1[1] - w.1[0]));
    }
    let lipschitz_bound = lambda / domain.metric_floor();
    let worst = worst_lower.min(worst_upper);
    let valid = worst >= -TOL_GEO
        && subsegment >= -TOL_GEO
        && speed_max <= lambda * (1.0 + TOL_GEO)
        && lip <= lipschitz_bound + TOL_GEO;
    Ok(AlmostGeodesicCertificate {
        lambda,
        kappa,
        worst_pair_margin: worst,
        worst_lower_margin: worst_lower,
        worst_upper_margin: worst_upper,
        subsegment_margin: subsegment,
        speed_max,
        speed_min,
        lipschitz_const: lip,
        lipschitz_bound,
        length: cum[cum.len() - 1],
        pairs_checked: pairs.len(),
        valid,
    })
}

/// Reparametrizes `path` by cumulative upper Kobayashi length, so that the
/// result has unit speed, and certifies it as a `(1, kappa)`-almost-geodesic.
pub fn reparametrize_unit_speed(
    domain: &Domain,
    path: &SampledPath,
    kappa: f64,
) -> Result<(SampledPath, AlmostGeodesicCertificate)> {
    if !(kappa > 0.0) {
        return Err(Error::Input("kappa must be positive".into()));
    }
    check_interior(domain, &path.points)?;
    for (i, w) in path.points.windows(2).enumerate() {
        if w[0].dist(&w[1]) == 0.0 {
            return Err(Error::Reparametrization(format!(
                "zero-speed segment between samples {i} and {}",
                i + 1
            )));
        }
    }
    let nodes: Vec<Vec<C64>> = path.points.iter().map(|p| p.coords().to_vec()).collect();
    let fine = subdivide(&nodes, INVERSE_SUBDIVISION);
    let pieces: Vec<f64> = (0..fine.len() - 1)
        .into_par_iter()
        .map(|i| chord_upper(domain, &fine[i], &fine[i + 1], 1))
        .collect();
    let mut f = vec![0.0; fine.len()];
    for i in 0..pieces.len() {
        let p = pieces[i];
        if !p.is_finite() {
            return Err(Error::Reparametrization(format!(
                "length of piece {i} is not finite"
            )));
        }
        f[i + 1] = f[i] + p;
        if f[i + 1] <= f[i] {
            f[i + 1] = f[i] + MONOTONE_JITTER;
        }
    }
    let total = f[f.len() - 1];
    let k_lo = lower_bound_raw(domain, path.start().coords(), path.end().coords());
    if total > k_lo + kappa {
        return Err(Error::CertificateInfeasible {
            length: total,
            bound: k_lo + kappa,
        });
    }
    let m = path.len();
    let grid: Vec<f64> = (0..m).map(|j| total * j as f64 / (m - 1) as f64).collect();
    let mut pts = Vec::with_capacity(m);
    let mut i = 0;
    for (j, &u) in grid.iter().enumerate() {
        if j == 0 {
            pts.push(path.start().clone());
            continue;
        }
        if j == m - 1 {
            pts.push(path.end().clone());
            continue;
        }
        while i < f.len() - 2 && f[i + 1] < u {
            i += 1;
        }
        let s = ((u - f[i]) / (f[i + 1] - f[i])).clamp(0.0, 1.0);
        pts.push(Point::from_vec_unchecked(lerp(&fine[i], &fine[i + 1], s)));
    }
    let sigma = SampledPath::new(grid, pts)?;
    let cert = verify_almost_geodesic(domain, &sigma, 1.0, kappa)?;
    Ok((sigma, cert))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostGeodesic {
    pub path: SampledPath,
    pub certificate: AlmostGeodesicCertificate,
    pub distance: DistanceEstimate,
}

/// Near-minimizing curve from `z` to `w`, reparametrized to unit speed and
/// certified as a `(1, kappa)`-almost-geodesic.
pub fn almost_geodesic_between(
    domain: &Domain,
    z: &Point,
    w: &Point,
    kappa: f64,
    budget: &DistanceBudget,
) -> Result<AlmostGeodesic> {
    if !(kappa > 0.0) {
        return Err(Error::Input("kappa must be positive".into()));
    }
    if z == w {
        return Err(Error::Input("endpoints coincide".into()));
    }
    let est = estimate_distance(domain, z, w, budget)?;
    let gap = est.upper - est.lower;
    if gap > kappa * (1.0 - GAP_SLACK) {
        return Err(Error::GapNotClosed {
            achieved: gap,
            budget: kappa,
        });
    }
    let (path, certificate) = reparametrize_unit_speed(domain, &est.witness, kappa)?;
    Ok(AlmostGeodesic {
        path,
        certificate,
        distance: est,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use approx::assert_relative_eq;

    fn disk() -> Domain {
        Domain::from_spec(&DomainSpec::unit_disk()).unwrap()
    }

    #[test]
    fn straight_disk_path_length() {
        let d = disk();
        let p = SampledPath::chord(&Point::real(&[0.0]).unwrap(), &Point::real(&[0.8]).unwrap(), 511).unwrap();
        let l = kobayashi_length(&d, &p).unwrap();
        assert!(l.lo <= 0.8f64.atanh() + 1e-9 && l.hi >= 0.8f64.atanh() - 1e-9);
        assert_relative_eq!(l.hi, 0.8f64.atanh(), max_relative = 1e-2);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = SampledPath::chord(&Point::real(&[0.0, 0.0]).unwrap(), &Point::real(&[0.1, 0.2]).unwrap(), 2).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("t,re_z1,im_z1,re_z2,im_z2\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn duplicate_point_is_rejected() {
        let d = disk();
        let a = Point::real(&[0.1]).unwrap();
        let p = SampledPath::uniform(vec![a.clone(), a.clone(), Point::real(&[0.3]).unwrap()]).unwrap();
        assert!(matches!(
            reparametrize_unit_speed(&d, &p, 0.1),
            Err(Error::Reparametrization(_))
        ));
    }
}
