//! Bounded domains `{rho < 0}` in `C^d`, their membership oracle, Euclidean
//! boundary distance and boundary distance along complex lines.
//!
//! Built-in kinds are the ball, the polydisk, the two convex examples built
//! from `exp(-1/|.|^2)` flat boundary pieces, the graph-subspace ambient
//! polydisk, and custom sublevel sets of an [`Expr`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geom::{norm, ray_point, sub, Direction, Point, C64};
use crate::model::Model;
use crate::optim::{bisect_root, golden_max, nelder_mead};
use crate::sampling::{rng, sphere_directions};
use crate::visibility::GraphMap;

/// Number of ray directions in the first boundary-distance pass.
pub const RAY_DIRECTIONS: usize = 64;
/// Relative bracket width at which ray bisection stops.
pub const RAY_REL_TOL: f64 = 1e-10;
/// Initial number of phases when minimizing exit radii over a complex line.
pub const LINE_PHASES: usize = 64;
pub const LINE_PHASES_MAX: usize = 1024;
/// Relative change of the phase minimum below which doubling stops.
pub const PHASE_STABILITY: f64 = 1e-6;
/// Margin added to the stated containment radius of the example domains.
pub const ENCLOSING_MARGIN: f64 = 1e-3;
const INVARIANT_SEED: u64 = 0x1A7E_57ED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallParams {
    pub d: usize,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default)]
    pub center: Option<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolydiskParams {
    pub d: usize,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub center: Option<Vec<C64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example51Params {
    pub eps: f64,
    pub n: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example52Params {
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    pub map: GraphMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkSpec {
    pub point: Vec<C64>,
    pub inward_normal: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomParams {
    pub d: usize,
    pub expr: String,
    pub enclosing_radius: f64,
    #[serde(default)]
    pub enclosing_center: Option<Vec<C64>>,
    pub base_point: Vec<C64>,
    #[serde(default)]
    pub convex: bool,
    #[serde(default)]
    pub landmarks: Vec<LandmarkSpec>,
}

fn one() -> f64 {
    1.0
}

/// JSON description of a domain: `{"kind": ..., "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase")]
pub enum DomainSpec {
    Ball(BallParams),
    Polydisk(PolydiskParams),
    Example51(Example51Params),
    Example52(Example52Params),
    Graph(GraphParams),
    Custom(CustomParams),
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Ball(BallParams {
            d: 1,
            radius: 1.0,
            center: None,
        })
    }

    pub fn unit_ball(d: usize) -> Self {
        DomainSpec::Ball(BallParams {
            d,
            radius: 1.0,
            center: None,
        })
    }

    pub fn unit_polydisk(d: usize) -> Self {
        DomainSpec::Polydisk(PolydiskParams {
            d,
            radii: None,
            center: None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parameter(format!("domain spec: {e}")))
    }
}

/// A boundary point with a known inward direction; used to seed shell
/// sampling and supporting half-spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landmark {
    pub point: Point,
    pub inward_normal: Direction,
}

/// Nearest boundary point found from an interior point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryHit {
    pub distance: f64,
    /// Unit direction from the interior point toward the boundary.
    pub direction: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub pairs_checked: usize,
    pub witness: Option<(Point, Point)>,
}

#[derive(Debug, Clone)]
struct FlatExample {
    eps: f64,
    /// `None` selects the smooth bump `exp(-1/(t - eps^2))`, `Some(n)` the
    /// polynomial `(t - eps^2)^n`.
    power: Option<u32>,
    /// Whether the flat factor uses `|z_1|` (first example) or `|z|`.
    full_norm: bool,
    scale: f64,
}

impl FlatExample {
    fn chi(&self, t: f64) -> f64 {
        let s = t - self.eps * self.eps;
        if s <= 0.0 {
            return 0.0;
        }
        match self.power {
            Some(n) => s.powi(n as i32),
            None => (-1.0 / s).exp(),
        }
    }

    fn phi0(&self, z: &[C64]) -> f64 {
        let m2 = if self.full_norm {
            z.iter().map(|c| c.norm_sqr()).sum::<f64>()
        } else {
            z[0].norm_sqr()
        };
        let flat = if m2 == 0.0 { 0.0 } else { (-1.0 / m2).exp() };
        flat - z[1].im
    }

    /// Cut-off equal to one on `|z| <= 2 eps`, vanishing beyond `3 eps`, and
    /// bounded by `2 eps / |z|` so that `sup(-Phi) = 2 eps`.
    fn cutoff(&self, s: f64) -> f64 {
        let e = self.eps;
        if s <= 2.0 * e {
            1.0
        } else if s >= 3.0 * e {
            0.0
        } else {
            let x = (s - 2.0 * e) / e;
            (2.0 * e / s) * (1.0 - x * x * (3.0 - 2.0 * x))
        }
    }

    fn rho(&self, z: &[C64]) -> f64 {
        let t: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let psi = self.scale * self.chi(t);
        let phi = self.phi0(z) * self.cutoff(t.sqrt());
        psi + phi
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Model(Model),
    Flat(FlatExample),
    Custom(Expr),
}

/// A bounded domain together with the data the estimators need.
#[derive(Debug, Clone)]
pub struct Domain {
    spec: DomainSpec,
    shape: Shape,
    dim: usize,
    enclosing_center: Point,
    enclosing_radius: f64,
    base_point: Point,
    convex: bool,
    landmarks: Vec<Landmark>,
    axis_roots: Vec<f64>,
    graph: Option<GraphMap>,
}

/// Serializable description of a constructed domain.
#[derive(Debug, Clone, Serialize)]
pub struct DomainSummary {
    pub spec: DomainSpec,
    pub dim: usize,
    pub enclosing_center: Point,
    pub enclosing_radius: f64,
    pub base_point: Point,
    pub convex: bool,
    pub axis_roots: Vec<f64>,
}

fn vec_or_origin(v: &Option<Vec<C64>>, d: usize, what: &str) -> Result<Vec<C64>> {
    match v {
        None => Ok(vec![C64::new(0.0, 0.0); d]),
        Some(c) if c.len() == d => {
            Point::new(c.clone())?;
            Ok(c.clone())
        }
        Some(c) => Err(Error::Parameter(format!(
            "{what} has {} coordinates, expected {d}",
            c.len()
        ))),
    }
}

fn unit(d: usize, k: usize, val: C64) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); d];
    v[k] = val;
    v
}

impl Domain {
    /// Builds a domain from its spec, validating parameter windows.
    pub fn from_spec(spec: &DomainSpec) -> Result<Domain> {
        match spec {
            DomainSpec::Ball(p) => {
                if p.d == 0 {
                    return Err(Error::Parameter("dimension must be at least 1".into()));
                }
                if !(p.radius > 0.0 && p.radius.is_finite()) {
                    return Err(Error::Parameter("ball radius must be positive".into()));
                }
                let center = vec_or_origin(&p.center, p.d, "center")?;
                let model = Model::Ball {
                    center: center.clone(),
                    radius: p.radius,
                };
                Ok(Self::from_model(spec.clone(), model, None))
            }
            DomainSpec::Polydisk(p) => {
                if p.d == 0 {
                    return Err(Error::Parameter("dimension must be at least 1".into()));
                }
                let radii = p.radii.clone().unwrap_or_else(|| vec![1.0; p.d]);
                if radii.len() != p.d || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                    return Err(Error::Parameter(
                        "polydisk radii must be d positive numbers".into(),
                    ));
                }
                let center = vec_or_origin(&p.center, p.d, "center")?;
                Ok(Self::from_model(
                    spec.clone(),
                    Model::Polydisk { center, radii },
                    None,
                ))
            }
            DomainSpec::Graph(g) => {
                g.map.validate()?;
                let d = 1 + g.map.components.len();
                Ok(Self::from_model(
                    spec.clone(),
                    Model::unit_polydisk(d),
                    Some(g.map.clone()),
                ))
            }
            DomainSpec::Example51(p) => {
                let limit = 1.0 / 6f64.sqrt();
                if !(p.eps > 0.0 && p.eps < limit) {
                    return Err(Error::Parameter(format!(
                        "example51 needs 0 < eps < 1/sqrt(6) = {limit:.6}, got {}",
                        p.eps
                    )));
                }
                if p.n < 3 {
                    return Err(Error::Parameter(format!(
                        "example51 needs n >= 3, got {}",
                        p.n
                    )));
                }
                let c1 = (1.25 * p.eps * p.eps).powi(p.n as i32);
                let flat = FlatExample {
                    eps: p.eps,
                    power: Some(p.n),
                    full_norm: false,
                    scale: 2.0 * p.eps / c1,
                };
                Self::from_flat(spec.clone(), flat, 1.5 * p.eps + ENCLOSING_MARGIN)
            }
            DomainSpec::Example52(p) => {
                let limit = 1.0 / (2.0 * 2f64.sqrt());
                if !(p.eps > 0.0 && p.eps < limit) {
                    return Err(Error::Parameter(format!(
                        "example52 needs 0 < eps < 1/(2 sqrt 2) = {limit:.6}, got {}",
                        p.eps
                    )));
                }
                if !(p.delta > 0.0 && p.delta <= 2.0 * p.eps) {
                    return Err(Error::Parameter(format!(
                        "example52 needs 0 < delta <= 2 eps, got {}",
                        p.delta
                    )));
                }
                if (p.eps + p.delta).powi(2) - p.eps * p.eps >= 0.5 {
                    return Err(Error::Parameter(
                        "example52 collar too wide: the bump is not convex on it".into(),
                    ));
                }
                let flat = FlatExample {
                    eps: p.eps,
                    power: None,
                    full_norm: true,
                    scale: 0.0,
                };
                let c1 = flat.chi((p.eps + p.delta / 2.0).powi(2));
                let scale = 2.0 * p.eps / c1;
                if !(c1 > 0.0 && scale.is_finite()) {
                    return Err(Error::Parameter(
                        "example52 delta too small: the bump underflows".into(),
                    ));
                }
                let flat = FlatExample { scale, ..flat };
                Self::from_flat(spec.clone(), flat, p.eps + p.delta / 2.0 + ENCLOSING_MARGIN)
            }
            DomainSpec::Custom(p) => {
                if p.d == 0 {
                    return Err(Error::Parameter("dimension must be at least 1".into()));
                }
                if !(p.enclosing_radius > 0.0 && p.enclosing_radius.is_finite()) {
                    return Err(Error::Parameter("enclosing radius must be positive".into()));
                }
                let expr = Expr::parse(&p.expr, p.d)?;
                let center = vec_or_origin(&p.enclosing_center, p.d, "enclosing center")?;
                if p.base_point.len() != p.d {
                    return Err(Error::Parameter("base point dimension mismatch".into()));
                }
                let base = Point::new(p.base_point.clone())?;
                let mut landmarks = Vec::new();
                for l in &p.landmarks {
                    if l.point.len() != p.d || l.inward_normal.len() != p.d {
                        return Err(Error::Parameter("landmark dimension mismatch".into()));
                    }
                    landmarks.push(Landmark {
                        point: Point::new(l.point.clone())?,
                        inward_normal: Direction::new(l.inward_normal.clone())?.normalized()?,
                    });
                }
                let dom = Domain {
                    spec: spec.clone(),
                    shape: Shape::Custom(expr),
                    dim: p.d,
                    enclosing_center: Point::new(center)?,
                    enclosing_radius: p.enclosing_radius,
                    base_point: base,
                    convex: p.convex,
                    landmarks,
                    axis_roots: Vec::new(),
                    graph: None,
                };
                if !(dom.rho(dom.base_point.coords()) < 0.0) {
                    return Err(Error::Parameter("base point is not inside the domain".into()));
                }
                dom.check_invariants(4096, INVARIANT_SEED)?;
                Ok(dom)
            }
        }
    }

    /// Parses a JSON domain spec and builds the domain.
    pub fn from_json(text: &str) -> Result<Domain> {
        Domain::from_spec(&DomainSpec::from_json(text)?)
    }

    fn from_model(spec: DomainSpec, model: Model, graph: Option<GraphMap>) -> Domain {
        let (center, radius, landmark) = match &model {
            Model::Ball { center, radius } => {
                let d = center.len();
                let mut p = center.clone();
                p[0] += *radius;
                (center.clone(), *radius, (p, unit(d, 0, C64::new(-1.0, 0.0))))
            }
            Model::Polydisk { center, radii } => {
                let d = center.len();
                let mut p = center.clone();
                p[0] += radii[0];
                let r = radii.iter().map(|r| r * r).sum::<f64>().sqrt();
                (center.clone(), r, (p, unit(d, 0, C64::new(-1.0, 0.0))))
            }
        };
        let dim = center.len();
        Domain {
            spec,
            dim,
            enclosing_center: Point::from_vec_unchecked(center.clone()),
            // the polydisk touches its circumscribed sphere at distinguished
            // boundary points, so pad it to keep the closure strictly inside
            enclosing_radius: radius * (1.0 + 1e-12) + if matches!(model, Model::Polydisk { .. }) { ENCLOSING_MARGIN } else { 0.0 },
            base_point: Point::from_vec_unchecked(center),
            convex: true,
            landmarks: vec![Landmark {
                point: Point::from_vec_unchecked(landmark.0),
                inward_normal: Direction::from_vec_unchecked(landmark.1),
            }],
            axis_roots: Vec::new(),
            graph,
            shape: Shape::Model(model),
        }
    }

    fn from_flat(spec: DomainSpec, flat: FlatExample, enclosing: f64) -> Result<Domain> {
        let mut dom = Domain {
            spec,
            shape: Shape::Flat(flat),
            dim: 2,
            enclosing_center: Point::origin(2),
            enclosing_radius: enclosing,
            base_point: Point::origin(2),
            convex: true,
            landmarks: vec![Landmark {
                point: Point::origin(2),
                inward_normal: Direction::from_vec_unchecked(vec![
                    C64::new(0.0, 0.0),
                    C64::new(0.0, 1.0),
                ]),
            }],
            axis_roots: Vec::new(),
            graph: None,
        };
        let eps = match &dom.shape {
            Shape::Flat(f) => f.eps,
            _ => unreachable!(),
        };
        let axis = |t: f64| dom.rho(&[C64::new(0.0, 0.0), C64::new(0.0, t)]);
        // record every sign change of rho on the imaginary z2-axis beyond eps
        let steps = 4000;
        let (lo, hi) = (eps, enclosing);
        let mut roots = Vec::new();
        let mut prev = axis(lo);
        for k in 1..=steps {
            let t = lo + (hi - lo) * k as f64 / steps as f64;
            let cur = axis(t);
            if prev.signum() != cur.signum() {
                let t0 = lo + (hi - lo) * (k - 1) as f64 / steps as f64;
                if let Some(r) = bisect_root(axis, t0, t, 1e-15) {
                    roots.push(r);
                }
            }
            prev = cur;
        }
        let top = *roots
            .last()
            .ok_or_else(|| Error::Parameter("no boundary point found on the z2-axis".into()))?;
        dom.axis_roots = roots;
        // deepest point of the segment {(0, i t) : 0 < t < top}
        let (t_best, _) = golden_max(
            |t| {
                let p = Point::from_vec_unchecked(vec![C64::new(0.0, 0.0), C64::new(0.0, t)]);
                dom.nearest_boundary_raw(p.coords()).distance
            },
            0.0,
            top,
            1e-6 * top,
        );
        dom.base_point = Point::from_vec_unchecked(vec![C64::new(0.0, 0.0), C64::new(0.0, t_best)]);
        if !(dom.rho(dom.base_point.coords()) < 0.0) {
            return Err(Error::Parameter("could not place a base point inside".into()));
        }
        Ok(dom)
    }

    /// Samples the defining function to check containment in the enclosing
    /// ball and the absence of jumps.
    pub fn check_invariants(&self, samples: usize, seed: u64) -> Result<()> {
        let mut r = rng(seed);
        let big = 1.5 * self.enclosing_radius;
        let c = self.enclosing_center.coords();
        for _ in 0..samples {
            let u = crate::sampling::random_unit(&mut r, self.dim);
            let t: f64 = big * r.random::<f64>().powf(1.0 / (2 * self.dim) as f64);
            let z: Vec<C64> = c.iter().zip(&u).map(|(a, b)| a + b * t).collect();
            let v = self.rho(&z);
            if v.is_nan() {
                return Err(Error::Parameter("defining function is NaN at a sample".into()));
            }
            if v < 0.0 && t >= self.enclosing_radius {
                return Err(Error::Parameter(format!(
                    "domain leaks outside the enclosing ball at radius {t}"
                )));
            }
            let h = 1e-9 * self.enclosing_radius;
            let w: Vec<C64> = z.iter().zip(&u).map(|(a, b)| a + b * h).collect();
            let jump = (self.rho(&w) - v).abs();
            if v.is_finite() && jump > 1e-2 * (1.0 + v.abs()) {
                return Err(Error::Parameter(
                    "defining function appears discontinuous".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn summary(&self) -> DomainSummary {
        DomainSummary {
            spec: self.spec.clone(),
            dim: self.dim,
            enclosing_center: self.enclosing_center.clone(),
            enclosing_radius: self.enclosing_radius,
            base_point: self.base_point.clone(),
            convex: self.convex,
            axis_roots: self.axis_roots.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn enclosing_center(&self) -> &Point {
        &self.enclosing_center
    }

    pub fn enclosing_radius(&self) -> f64 {
        self.enclosing_radius
    }

    pub fn base_point(&self) -> &Point {
        &self.base_point
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    /// Closed-form model when the domain is a built-in ball or polydisk.
    pub fn model(&self) -> Option<&Model> {
        match &self.shape {
            Shape::Model(m) => Some(m),
            _ => None,
        }
    }

    pub fn graph_map(&self) -> Option<&GraphMap> {
        self.graph.as_ref()
    }

    /// Roots of `rho(0, i t)` for `t > eps` on the example domains; the
    /// largest is the degenerate boundary point `p0 = (0, i c)`.
    pub fn axis_roots(&self) -> &[f64] {
        &self.axis_roots
    }

    pub fn p0(&self) -> Option<Point> {
        self.axis_roots
            .last()
            .map(|&c| Point::from_vec_unchecked(vec![C64::new(0.0, 0.0), C64::new(0.0, c)]))
    }

    /// Lower bound `c` with `c |v| <= kappa(z; v)` from the enclosing ball.
    pub fn metric_floor(&self) -> f64 {
        1.0 / self.enclosing_radius
    }

    /// Enclosing ball as a model domain.
    pub fn enclosing_model(&self) -> Model {
        Model::Ball {
            center: self.enclosing_center.coords().to_vec(),
            radius: self.enclosing_radius,
        }
    }

    /// The defining function.
    pub fn rho(&self, z: &[C64]) -> f64 {
        match &self.shape {
            Shape::Model(Model::Ball { center, radius }) => norm(&sub(z, center)) - radius,
            Shape::Model(Model::Polydisk { center, radii }) => z
                .iter()
                .zip(center)
                .zip(radii)
                .map(|((a, c), r)| (a - c).norm() - r)
                .fold(f64::NEG_INFINITY, f64::max),
            Shape::Flat(f) => f.rho(z),
            Shape::Custom(e) => e.eval(z),
        }
    }

    pub(crate) fn inside(&self, z: &[C64]) -> bool {
        self.rho(z) < 0.0
    }

    fn check_dim(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::Input(format!(
                "point has dimension {} but the domain has dimension {}",
                z.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn contains(&self, z: &Point) -> Result<bool> {
        self.check_dim(z)?;
        if z.coords().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("point has a non-finite coordinate".into()));
        }
        Ok(self.inside(z.coords()))
    }

    pub(crate) fn require_inside(&self, z: &Point) -> Result<()> {
        if !self.contains(z)? {
            return Err(Error::OutsideDomain(format!(
                "{:?} is not an interior point",
                z.coords()
            )));
        }
        Ok(())
    }

    fn ray_limit(&self, z: &[C64]) -> f64 {
        let off = norm(&sub(z, self.enclosing_center.coords()));
        (off + self.enclosing_radius) * (1.0 + 1e-9) + 1e-300
    }

    /// Largest `t` (within relative tolerance) with `z + s u` inside for all
    /// sampled `s <= t`; `u` must be a unit vector.
    pub(crate) fn exit_radius(&self, z: &[C64], u: &[C64], buf: &mut [C64]) -> f64 {
        let mut inside = |t: f64| {
            ray_point(z, u, C64::new(t, 0.0), buf);
            self.inside(buf)
        };
        let mut lo = self.ray_limit(z);
        loop {
            lo *= 0.5;
            if lo < 1e-300 {
                return 0.0;
            }
            if inside(lo) {
                break;
            }
        }
        let mut hi = 2.0 * lo;
        if !self.convex {
            let marks = 32;
            for j in 1..marks {
                let t = lo * j as f64 / marks as f64;
                if !inside(t) {
                    hi = t;
                    lo = lo * (j - 1) as f64 / marks as f64;
                    break;
                }
            }
        }
        while hi - lo > RAY_REL_TOL * hi {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Nearest boundary point by ray bisection over a direction set followed
    /// by Nelder–Mead refinement of the best directions.
    pub(crate) fn nearest_boundary_raw(&self, z: &[C64]) -> BoundaryHit {
        if let Shape::Model(m) = &self.shape {
            let (distance, direction) = m.nearest_boundary(z);
            return BoundaryHit {
                distance,
                direction,
            };
        }
        let mut buf = vec![C64::new(0.0, 0.0); self.dim];
        let dirs = sphere_directions(self.dim, RAY_DIRECTIONS);
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(dirs.len());
        let mut best = f64::INFINITY;
        for (i, u) in dirs.iter().enumerate() {
            if best.is_finite() {
                ray_point(z, u, C64::new(best, 0.0), &mut buf);
                if self.inside(&buf) {
                    continue;
                }
            }
            let r = self.exit_radius(z, u, &mut buf);
            best = best.min(r);
            scored.push((r, i));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut hit = BoundaryHit {
            distance: scored[0].0,
            direction: dirs[scored[0].1].clone(),
        };
        let dim2 = 2 * self.dim;
        for &(_, idx) in scored.iter().take(2) {
            let u0 = &dirs[idx];
            let make = |p: &[f64]| -> Vec<C64> {
                let v: Vec<C64> = (0..self.dim)
                    .map(|k| u0[k] + C64::new(p[2 * k], p[2 * k + 1]))
                    .collect();
                let n = norm(&v);
                v.into_iter().map(|c| c / n).collect()
            };
            let mut buf2 = vec![C64::new(0.0, 0.0); self.dim];
            let res = nelder_mead(
                |p| self.exit_radius(z, &make(p), &mut buf2),
                &vec![0.0; dim2],
                0.05,
                120 * dim2,
                1e-12,
            );
            if res.fx < hit.distance {
                hit = BoundaryHit {
                    distance: res.fx,
                    direction: make(&res.x),
                };
            }
        }
        hit
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn boundary_distance(&self, z: &Point) -> Result<f64> {
        Ok(self.nearest_boundary(z)?.distance)
    }

    pub fn nearest_boundary(&self, z: &Point) -> Result<BoundaryHit> {
        self.require_inside(z)?;
        Ok(self.nearest_boundary_raw(z.coords()))
    }

    /// `r(z; v)`: radius of the largest disc `{z + zeta v/|v|}` inside the
    /// domain, minimized over sampled phases of `zeta`.
    pub fn line_radius(&self, z: &Point, v: &Direction) -> Result<f64> {
        self.require_inside(z)?;
        if v.dim() != self.dim {
            return Err(Error::Input("direction dimension mismatch".into()));
        }
        let u = v.normalized()?;
        Ok(self.line_radius_raw(z.coords(), u.coords()))
    }

    /// Line radius for a unit `u`, without validation.
    pub(crate) fn line_radius_raw(&self, z: &[C64], u: &[C64]) -> f64 {
        if let Shape::Model(m) = &self.shape {
            return m.line_radius(z, u);
        }
        let mut buf = vec![C64::new(0.0, 0.0); self.dim];
        let mut best = f64::INFINITY;
        let probe = |theta: f64, best: &mut f64, buf: &mut Vec<C64>| {
            let rot = C64::from_polar(1.0, theta);
            let ur: Vec<C64> = u.iter().map(|c| c * rot).collect();
            if best.is_finite() {
                ray_point(z, &ur, C64::new(*best, 0.0), buf);
                if self.inside(buf) {
                    return;
                }
            }
            let r = self.exit_radius(z, &ur, buf);
            *best = best.min(r);
        };
        let tau = 2.0 * std::f64::consts::PI;
        let mut m = LINE_PHASES;
        for k in 0..m {
            probe(tau * k as f64 / m as f64, &mut best, &mut buf);
        }
        while m < LINE_PHASES_MAX {
            let before = best;
            let m2 = 2 * m;
            for k in 0..m {
                probe(tau * (2 * k + 1) as f64 / m2 as f64, &mut best, &mut buf);
            }
            m = m2;
            if before - best <= PHASE_STABILITY * before {
                break;
            }
        }
        best
    }

    /// Uniform sample of the enclosing ball conditioned on lying in the domain.
    pub fn sample_interior<R: Rng>(&self, r: &mut R) -> Result<Point> {
        let c = self.enclosing_center.coords();
        for _ in 0..200_000 {
            let u = crate::sampling::random_unit(r, self.dim);
            let t: f64 = self.enclosing_radius * r.random::<f64>().powf(1.0 / (2 * self.dim) as f64);
            let z: Vec<C64> = c.iter().zip(&u).map(|(a, b)| a + b * t).collect();
            if self.inside(&z) {
                return Ok(Point::from_vec_unchecked(z));
            }
        }
        Err(Error::Sampling("no interior point found by rejection sampling".into()))
    }

    /// Checks midpoint membership on random interior pairs.
    pub fn convexity_probe(&self, samples: usize, seed: u64) -> Result<ConvexityReport> {
        if samples == 0 {
            return Err(Error::Input("samples must be at least 1".into()));
        }
        let mut r = rng(seed);
        for i in 0..samples {
            let a = self.sample_interior(&mut r)?;
            let b = self.sample_interior(&mut r)?;
            let mid = a.lerp(&b, 0.5);
            if !self.inside(mid.coords()) {
                return Ok(ConvexityReport {
                    convex: false,
                    pairs_checked: i + 1,
                    witness: Some((a, b)),
                });
            }
        }
        Ok(ConvexityReport {
            convex: true,
            pairs_checked: samples,
            witness: None,
        })
    }
}

