//! Two-sided bounds on the Kobayashi–Royden metric and the shell suprema
//! `M(r) = sup { 1 / kappa(z; v) : delta(z) <= r, |v| = 1 }`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{norm, Direction, Point, C64};
use crate::model::Model;
use crate::sampling::{complex_line_directions, random_unit, substream};

/// Relative shell width `h`: shell points satisfy `r (1 - h) < delta <= r`.
pub const SHELL_WIDTH: f64 = 0.25;
/// Relative width the shell search aims for before settling for the full band.
const SHELL_TARGET: f64 = 1e-3;
/// Safety factor on the sampled line radius in the convex half-bound.
const PHASE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    ExactModel,
    EnclosingBall,
    ConvexHalfBound,
    LineRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: BoundMethod,
    pub upper_method: BoundMethod,
}

/// A Euclidean ball used to localize shell statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, z: &[C64]) -> bool {
        crate::geom::dist(z, self.center.coords()) < self.radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellBudget {
    /// Number of shell points to collect.
    pub points: usize,
    /// Number of complex directions tried at each point.
    pub directions: usize,
    pub seed: u64,
}

impl Default for ShellBudget {
    fn default() -> Self {
        ShellBudget {
            points: 24,
            directions: 24,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellPoint {
    pub point: Point,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MShellEstimate {
    pub r: f64,
    pub m_lower: f64,
    pub m_upper: f64,
    pub localizer: Option<Ball>,
    pub sample_count: usize,
    /// Point and direction attaining `m_lower`.
    pub witness: Option<(Point, Direction)>,
    pub points: Vec<ShellPoint>,
}

/// Exact metric of a model domain.
pub fn exact_model_metric(model: &Model, z: &Point, v: &Direction) -> Result<f64> {
    model.metric(z.coords(), v.coords())
}

/// Certified bounds `lower <= kappa(z; v) <= upper`.
pub fn metric_bounds(domain: &Domain, z: &Point, v: &Direction) -> Result<MetricEstimate> {
    domain.require_inside(z)?;
    if v.dim() != domain.dim() {
        return Err(Error::Input("direction dimension mismatch".into()));
    }
    if v.norm() <= 0.0 {
        return Err(Error::Input("direction must be non-zero".into()));
    }
    Ok(metric_bounds_raw(domain, z.coords(), v.coords()))
}

/// [`metric_bounds`] without validation; `z` must be inside and `v` non-zero.
pub(crate) fn metric_bounds_raw(domain: &Domain, z: &[C64], v: &[C64]) -> MetricEstimate {
    if let Some(m) = domain.model() {
        let k = m.metric_unchecked(z, v);
        return MetricEstimate {
            lower: k,
            upper: k,
            lower_method: BoundMethod::ExactModel,
            upper_method: BoundMethod::ExactModel,
        };
    }
    let n = norm(v);
    let u: Vec<C64> = v.iter().map(|c| c / n).collect();
    let r = domain.line_radius_raw(z, &u);
    let upper = n / r;
    let ball = domain.enclosing_model().metric_unchecked(z, v);
    let (mut lower, mut method) = (ball, BoundMethod::EnclosingBall);
    if domain.is_convex() {
        let half = n / (2.0 * r * (1.0 + PHASE_SLACK));
        if half > lower {
            lower = half;
            method = BoundMethod::ConvexHalfBound;
        }
    }
    MetricEstimate {
        lower: lower.min(upper),
        upper,
        lower_method: method,
        upper_method: BoundMethod::LineRadius,
    }
}

/// Upper metric bound only; cheaper on model domains and used by quadrature.
pub(crate) fn metric_upper_raw(domain: &Domain, z: &[C64], v: &[C64]) -> f64 {
    if let Some(m) = domain.model() {
        return m.metric_unchecked(z, v);
    }
    let n = norm(v);
    if n == 0.0 {
        return 0.0;
    }
    let u: Vec<C64> = v.iter().map(|c| c / n).collect();
    n / domain.line_radius_raw(z, &u)
}

pub(crate) fn metric_lower_raw(domain: &Domain, z: &[C64], v: &[C64]) -> f64 {
    if norm(v) == 0.0 {
        return 0.0;
    }
    metric_bounds_raw(domain, z, v).lower
}

fn depth(domain: &Domain, z: &[C64]) -> f64 {
    if !domain.inside(z) {
        return 0.0;
    }
    domain.nearest_boundary_raw(z).distance
}

/// Walks `z(t) = x + t u` from `t_small` (shallow or outside) toward `t_deep`
/// (depth above `r`) until the depth lands in the shell band.
fn band_search(
    domain: &Domain,
    x: &[C64],
    u: &[C64],
    mut t_small: f64,
    mut t_deep: f64,
    r: f64,
) -> Option<ShellPoint> {
    let at = |t: f64| -> Vec<C64> { x.iter().zip(u).map(|(a, b)| a + b * t).collect() };
    let mut fallback: Option<ShellPoint> = None;
    for _ in 0..80 {
        let t = 0.5 * (t_small + t_deep);
        let z = at(t);
        let d = depth(domain, &z);
        if d > r {
            t_deep = t;
        } else if d <= r * (1.0 - SHELL_WIDTH) {
            t_small = t;
        } else {
            let p = ShellPoint {
                point: Point::from_vec_unchecked(z),
                delta: d,
            };
            if d > r * (1.0 - SHELL_TARGET) {
                return Some(p);
            }
            fallback = Some(p);
            t_small = t;
        }
        if (t_deep - t_small).abs() <= 1e-15 * t_deep.abs().max(t_small.abs()) {
            break;
        }
    }
    fallback
}

fn random_shell_point(
    domain: &Domain,
    r: f64,
    localizer: Option<&Ball>,
    mut g: rand_chacha::ChaCha8Rng,
) -> Option<ShellPoint> {
    let x = match localizer {
        Some(b) => {
            let mut hit = None;
            for _ in 0..2000 {
                let dir = random_unit(&mut g, domain.dim());
                let t = b.radius * g.random::<f64>().powf(1.0 / (2 * domain.dim()) as f64);
                let z: Vec<C64> = b.center.coords().iter().zip(&dir).map(|(a, c)| a + c * t).collect();
                if domain.inside(&z) {
                    hit = Some(z);
                    break;
                }
            }
            hit?
        }
        None => domain.sample_interior(&mut g).ok()?.into_coords(),
    };
    if depth(domain, &x) <= r {
        return None;
    }
    let u = random_unit(&mut g, domain.dim());
    let mut buf = vec![C64::new(0.0, 0.0); domain.dim()];
    let exit = domain.exit_radius(&x, &u, &mut buf);
    // walk back from the exit point toward x
    let e: Vec<C64> = x.iter().zip(&u).map(|(a, b)| a + b * exit).collect();
    let back: Vec<C64> = u.iter().map(|c| -c).collect();
    band_search(domain, &e, &back, 0.0, exit, r)
}

/// Boundary-proximal points with `delta` in the shell band: first along the
/// inward normals of the domain landmarks, then along random rays from
/// random interior points.
pub fn shell_points(
    domain: &Domain,
    r: f64,
    localizer: Option<&Ball>,
    count: usize,
    seed: u64,
) -> Result<Vec<ShellPoint>> {
    if !(r > 0.0 && r < domain.enclosing_radius()) {
        return Err(Error::Input(format!(
            "shell radius {r} must lie in (0, {})",
            domain.enclosing_radius()
        )));
    }
    let keep = |p: &ShellPoint| localizer.is_none_or(|b| b.contains(p.point.coords()));
    let mut out: Vec<ShellPoint> = Vec::new();
    for lm in domain.landmarks() {
        let x = lm.point.coords();
        let u = lm.inward_normal.coords();
        if let Some(p) = band_search(domain, x, u, 0.0, 2.0 * r, r) {
            if keep(&p) {
                out.push(p);
            }
        }
    }
    let batch = count.max(1);
    for round in 0..40u64 {
        if out.len() >= count {
            break;
        }
        let lo = round * batch as u64;
        let found: Vec<Option<ShellPoint>> = (lo..lo + batch as u64)
            .into_par_iter()
            .map(|i| random_shell_point(domain, r, localizer, substream(seed, i)).filter(&keep))
            .collect();
        for p in found.into_iter().flatten() {
            if out.len() >= count {
                break;
            }
            out.push(p);
        }
    }
    if out.is_empty() {
        return Err(Error::Sampling(format!(
            "no point found in the shell {} < delta <= {r}",
            r * (1.0 - SHELL_WIDTH)
        )));
    }
    Ok(out)
}

/// Estimates `M(r)` (or the localized version when `localizer` is given).
pub fn estimate_m_shell(
    domain: &Domain,
    r: f64,
    localizer: Option<&Ball>,
    budget: &ShellBudget,
) -> Result<MShellEstimate> {
    if budget.points == 0 || budget.directions == 0 {
        return Err(Error::Input("shell budget must be at least one point and direction".into()));
    }
    let pts = shell_points(domain, r, localizer, budget.points, budget.seed)?;
    let dirs = complex_line_directions(domain.dim(), budget.directions);
    let per_point: Vec<(f64, f64, usize)> = pts
        .par_iter()
        .map(|p| {
            let mut best = (0.0f64, 0.0f64, 0usize);
            for (j, u) in dirs.iter().enumerate() {
                let b = metric_bounds_raw(domain, p.point.coords(), u);
                if 1.0 / b.upper > best.0 {
                    best.0 = 1.0 / b.upper;
                    best.2 = j;
                }
                best.1 = best.1.max(1.0 / b.lower);
            }
            best
        })
        .collect();
    let mut m_lower = 0.0;
    let mut m_upper = 0.0;
    let mut witness = None;
    for (p, &(lo, hi, j)) in pts.iter().zip(&per_point) {
        if lo > m_lower {
            m_lower = lo;
            witness = Some((p.point.clone(), Direction::from_vec_unchecked(dirs[j].clone())));
        }
        m_upper = f64::max(m_upper, hi);
    }
    Ok(MShellEstimate {
        r,
        m_lower,
        m_upper,
        localizer: localizer.cloned(),
        sample_count: pts.len() * dirs.len(),
        witness,
        points: pts,
    })
}
