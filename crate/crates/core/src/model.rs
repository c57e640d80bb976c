//! Closed forms on the model domains: balls (the disk when `d = 1`) and
//! polydisks. These serve as exact metrics on the built-in model kinds and as
//! oracles for the estimators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{artanh_from_complement, hdot, norm, norm_sqr, sub, C64};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Model {
    Ball { center: Vec<C64>, radius: f64 },
    Polydisk { center: Vec<C64>, radii: Vec<f64> },
}

/// Kobayashi distance of the unit disk between `a` and `b`.
pub fn disk_distance(a: C64, b: C64) -> f64 {
    let denom = (C64::new(1.0, 0.0) - a.conj() * b).norm_sqr();
    let rho2 = (a - b).norm_sqr() / denom;
    let comp = (1.0 - a.norm()) * (1.0 + a.norm()) * (1.0 - b.norm()) * (1.0 + b.norm()) / denom;
    pseudo_to_distance(rho2, comp)
}

pub(crate) fn pseudo_to_distance(rho2: f64, comp: f64) -> f64 {
    let rho = rho2.max(0.0).sqrt();
    if rho < 0.5 {
        rho.atanh()
    } else {
        artanh_from_complement(rho.min(1.0), comp)
    }
}

/// Kobayashi distance of the unit ball of `C^d`.
pub fn unit_ball_distance(a: &[C64], b: &[C64]) -> f64 {
    let ab = hdot(a, b);
    let na = norm_sqr(a);
    let nb = norm_sqr(b);
    let denom = (C64::new(1.0, 0.0) - ab).norm_sqr();
    let cs = (na * nb - ab.norm_sqr()).max(0.0);
    let diff = norm_sqr(&sub(a, b));
    let rho2 = ((diff - cs) / denom).max(0.0);
    let ra = na.sqrt();
    let rb = nb.sqrt();
    let comp = (1.0 - ra) * (1.0 + ra) * (1.0 - rb) * (1.0 + rb) / denom;
    pseudo_to_distance(rho2, comp)
}

/// Kobayashi–Royden metric of the unit ball.
pub fn unit_ball_metric(z: &[C64], v: &[C64]) -> f64 {
    let r = norm(z);
    let one_minus = (1.0 - r) * (1.0 + r);
    let zv = hdot(v, z).norm_sqr();
    (norm_sqr(v) / one_minus + zv / (one_minus * one_minus)).sqrt()
}

/// Unit-speed disk geodesic from `a` to `b` evaluated at arc length `u`.
pub fn disk_geodesic_at(a: C64, b: C64, u: f64) -> C64 {
    let one = C64::new(1.0, 0.0);
    let e = (b - a) / (one - a.conj() * b);
    let m = e.norm();
    if m == 0.0 {
        return a;
    }
    let xi = e / m * u.tanh();
    (xi + a) / (one + a.conj() * xi)
}

impl Model {
    pub fn unit_disk() -> Model {
        Model::Ball {
            center: vec![C64::new(0.0, 0.0)],
            radius: 1.0,
        }
    }

    pub fn unit_ball(dim: usize) -> Model {
        Model::Ball {
            center: vec![C64::new(0.0, 0.0); dim],
            radius: 1.0,
        }
    }

    pub fn unit_polydisk(dim: usize) -> Model {
        Model::Polydisk {
            center: vec![C64::new(0.0, 0.0); dim],
            radii: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Model::Ball { center, .. } | Model::Polydisk { center, .. } => center.len(),
        }
    }

    pub fn contains(&self, z: &[C64]) -> bool {
        match self {
            Model::Ball { center, radius } => norm(&sub(z, center)) < *radius,
            Model::Polydisk { center, radii } => z
                .iter()
                .zip(center)
                .zip(radii)
                .all(|((a, c), r)| (a - c).norm() < *r),
        }
    }

    fn require_inside(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::Input(format!(
                "point has dimension {} but the model has dimension {}",
                z.len(),
                self.dim()
            )));
        }
        if !self.contains(z) {
            return Err(Error::OutsideDomain(format!("{z:?} is not inside the model domain")));
        }
        Ok(())
    }

    /// Euclidean distance to the boundary and the unit direction realizing it.
    pub fn nearest_boundary(&self, z: &[C64]) -> (f64, Vec<C64>) {
        match self {
            Model::Ball { center, radius } => {
                let w = sub(z, center);
                let n = norm(&w);
                let dir = if n > 0.0 {
                    w.iter().map(|c| c / n).collect()
                } else {
                    let mut e = vec![C64::new(0.0, 0.0); w.len()];
                    e[0] = C64::new(1.0, 0.0);
                    e
                };
                (radius - n, dir)
            }
            Model::Polydisk { center, radii } => {
                let mut best = (f64::INFINITY, 0);
                for (k, ((a, c), r)) in z.iter().zip(center).zip(radii).enumerate() {
                    let d = r - (a - c).norm();
                    if d < best.0 {
                        best = (d, k);
                    }
                }
                let k = best.1;
                let w = z[k] - center[k];
                let mut dir = vec![C64::new(0.0, 0.0); z.len()];
                dir[k] = if w.norm() > 0.0 { w / w.norm() } else { C64::new(1.0, 0.0) };
                (best.0, dir)
            }
        }
    }

    /// Radius of the largest disc `{z + zeta u : |zeta| < r}` inside the model,
    /// for a unit vector `u`.
    pub fn line_radius(&self, z: &[C64], u: &[C64]) -> f64 {
        match self {
            Model::Ball { center, radius } => {
                let w = sub(z, center);
                let a = hdot(&w, u).norm();
                (radius * radius - norm_sqr(&w) + a * a).max(0.0).sqrt() - a
            }
            Model::Polydisk { center, radii } => z
                .iter()
                .zip(center)
                .zip(radii)
                .zip(u)
                .filter(|(_, uk)| uk.norm() > 0.0)
                .map(|(((a, c), r), uk)| (r - (a - c).norm()) / uk.norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Exact Kobayashi–Royden metric `kappa(z; v)`.
    pub fn metric(&self, z: &[C64], v: &[C64]) -> Result<f64> {
        self.require_inside(z)?;
        if v.len() != z.len() {
            return Err(Error::Input("direction dimension mismatch".into()));
        }
        Ok(self.metric_unchecked(z, v))
    }

    pub(crate) fn metric_unchecked(&self, z: &[C64], v: &[C64]) -> f64 {
        match self {
            Model::Ball { center, radius } => {
                let a: Vec<C64> = sub(z, center).iter().map(|c| c / radius).collect();
                let vs: Vec<C64> = v.iter().map(|c| c / radius).collect();
                unit_ball_metric(&a, &vs)
            }
            Model::Polydisk { center, radii } => z
                .iter()
                .zip(center)
                .zip(radii)
                .zip(v)
                .map(|(((a, c), r), vk)| {
                    let s = (a - c).norm() / r;
                    vk.norm() / r / ((1.0 - s) * (1.0 + s))
                })
                .fold(0.0, f64::max),
        }
    }

    /// Exact Kobayashi distance.
    pub fn distance(&self, z: &[C64], w: &[C64]) -> Result<f64> {
        self.require_inside(z)?;
        self.require_inside(w)?;
        Ok(self.distance_unchecked(z, w))
    }

    pub(crate) fn distance_unchecked(&self, z: &[C64], w: &[C64]) -> f64 {
        match self {
            Model::Ball { center, radius } => {
                let a: Vec<C64> = sub(z, center).iter().map(|c| c / radius).collect();
                let b: Vec<C64> = sub(w, center).iter().map(|c| c / radius).collect();
                unit_ball_distance(&a, &b)
            }
            Model::Polydisk { center, radii } => (0..z.len())
                .map(|k| disk_distance((z[k] - center[k]) / radii[k], (w[k] - center[k]) / radii[k]))
                .fold(0.0, f64::max),
        }
    }

    /// Samples the unit-speed Kobayashi geodesic from `z` to `w` at `samples`
    /// equally spaced arc-length parameters; returns the parameters and points.
    pub fn geodesic(&self, z: &[C64], w: &[C64], samples: usize) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
        self.require_inside(z)?;
        self.require_inside(w)?;
        if samples < 2 {
            return Err(Error::Input("a geodesic needs at least two samples".into()));
        }
        let total = self.distance_unchecked(z, w);
        if total == 0.0 {
            return Err(Error::Input("geodesic endpoints coincide".into()));
        }
        let grid: Vec<f64> = (0..samples)
            .map(|i| total * i as f64 / (samples - 1) as f64)
            .collect();
        let pts = match self {
            Model::Ball { center, radius } => {
                let a: Vec<C64> = sub(z, center).iter().map(|c| c / radius).collect();
                let b: Vec<C64> = sub(w, center).iter().map(|c| c / radius).collect();
                let diff = sub(&b, &a);
                let len = norm(&diff);
                let e: Vec<C64> = diff.iter().map(|c| c / len).collect();
                // the affine slice a + zeta e meets the ball in the disc
                // |zeta - m| < rad, which is totally geodesic
                let m = -hdot(&a, &e);
                let rad = (1.0 - norm_sqr(&a) + m.norm_sqr()).sqrt();
                let xa = -m / rad;
                let xb = (C64::new(len, 0.0) - m) / rad;
                grid.iter()
                    .map(|&u| {
                        let xi = disk_geodesic_at(xa, xb, u);
                        let zeta = m + xi * rad;
                        a.iter()
                            .zip(&e)
                            .zip(center)
                            .map(|((ak, ek), ck)| ck + (ak + zeta * ek) * *radius)
                            .collect()
                    })
                    .collect()
            }
            Model::Polydisk { center, radii } => {
                let comps: Vec<(C64, C64, f64)> = (0..z.len())
                    .map(|k| {
                        let a = (z[k] - center[k]) / radii[k];
                        let b = (w[k] - center[k]) / radii[k];
                        (a, b, disk_distance(a, b))
                    })
                    .collect();
                grid.iter()
                    .map(|&u| {
                        comps
                            .iter()
                            .enumerate()
                            .map(|(k, &(a, b, dk))| {
                                let s = if dk == 0.0 { 0.0 } else { u * dk / total };
                                center[k] + disk_geodesic_at(a, b, s) * radii[k]
                            })
                            .collect()
                    })
                    .collect()
            }
        };
        Ok((grid, pts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn disk_metric_values() {
        let m = Model::unit_disk();
        assert_relative_eq!(m.metric(&[c(0.0, 0.0)], &[c(1.0, 0.0)]).unwrap(), 1.0);
        assert_relative_eq!(
            m.metric(&[c(0.5, 0.0)], &[c(1.0, 0.0)]).unwrap(),
            4.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bidisk_metric_is_max_of_factors() {
        let m = Model::unit_polydisk(2);
        let k = m.metric(&[c(0.5, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(k, 4.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn outside_point_is_rejected() {
        let m = Model::unit_disk();
        assert!(matches!(
            m.metric(&[c(1.0, 0.0)], &[c(1.0, 0.0)]),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn ball_metric_at_center_of_radius_two() {
        let m = Model::Ball {
            center: vec![c(0.0, 0.0); 2],
            radius: 2.0,
        };
        let k = m.metric(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_relative_eq!(k, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn distances_match_artanh() {
        let d = Model::unit_disk();
        assert_relative_eq!(
            d.distance(&[c(0.0, 0.0)], &[c(0.5, 0.0)]).unwrap(),
            0.5f64.atanh(),
            epsilon = 1e-14
        );
        let p = Model::unit_polydisk(2);
        assert_relative_eq!(
            p.distance(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(0.5, 0.0), c(0.3, 0.0)]).unwrap(),
            0.5f64.atanh(),
            epsilon = 1e-14
        );
        let b = Model::unit_ball(2);
        // restricted to a coordinate slice the ball distance is the disk distance
        assert_relative_eq!(
            b.distance(&[c(-0.3, 0.0), c(0.0, 0.0)], &[c(0.6, 0.2), c(0.0, 0.0)]).unwrap(),
            disk_distance(c(-0.3, 0.0), c(0.6, 0.2)),
            epsilon = 1e-13
        );
    }

    #[test]
    fn near_boundary_distance_keeps_precision() {
        let r = 1.0 - 2f64.powi(-30);
        let d = disk_distance(c(r, 0.0), c(-r, 0.0));
        assert_relative_eq!(d, 2.0 * r.atanh(), max_relative = 1e-12);
    }

    #[test]
    fn ball_line_radius_in_tangent_direction() {
        let b = Model::unit_ball(2);
        let r = b.line_radius(&[c(0.0, 0.0), c(0.6, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_relative_eq!(r, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn radial_disk_geodesic_is_tanh() {
        let d = Model::unit_disk();
        let (grid, pts) = d.geodesic(&[c(0.0, 0.0)], &[c(0.8, 0.0)], 33).unwrap();
        assert_relative_eq!(*grid.last().unwrap(), 0.8f64.atanh(), epsilon = 1e-14);
        for (u, p) in grid.iter().zip(&pts) {
            assert!((p[0] - c(u.tanh(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn ball_geodesic_has_exact_unit_speed() {
        let b = Model::unit_ball(2);
        let z = [c(0.2, -0.1), c(0.4, 0.3)];
        let w = [c(-0.5, 0.1), c(0.1, -0.6)];
        let (grid, pts) = b.geodesic(&z, &w, 9).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = b.distance(&pts[i], &pts[j]).unwrap();
                assert_relative_eq!(d, grid[j] - grid[i], epsilon = 1e-10);
            }
        }
        assert!(crate::geom::dist(&pts[8], &w) < 1e-12);
    }
}
