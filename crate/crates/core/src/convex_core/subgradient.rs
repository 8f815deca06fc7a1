//! Outer polygonal approximation of subdifferentials.

use serde::Serialize;

use crate::convex_core::GridFunction;
use crate::geom::{self, Point};
use crate::ma_solver::StencilSet;

/// Convex polygon of slopes. Unbounded sets are clipped to a box and flagged.
#[derive(Clone, Debug, Serialize)]
pub struct SubgradientSet {
    pub vertices: Vec<Point>,
    pub empty: bool,
    pub bounded: bool,
}

impl SubgradientSet {
    fn empty() -> Self {
        Self { vertices: Vec::new(), empty: true, bounded: true }
    }

    pub fn area(&self) -> f64 {
        if self.vertices.len() < 3 {
            0.0
        } else {
            geom::polygon_area(&self.vertices)
        }
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for a in &self.vertices {
            for b in &self.vertices {
                d = d.max(geom::dist(*a, *b));
            }
        }
        d
    }

    pub fn centroid(&self) -> Option<Point> {
        match self.vertices.len() {
            0 => None,
            1 | 2 => {
                let n = self.vertices.len() as f64;
                let s = self.vertices.iter().fold([0.0, 0.0], |a, &p| geom::add(a, p));
                Some(geom::scale(s, 1.0 / n))
            }
            _ if self.area() <= 0.0 => {
                let n = self.vertices.len() as f64;
                let s = self.vertices.iter().fold([0.0, 0.0], |a, &p| geom::add(a, p));
                Some(geom::scale(s, 1.0 / n))
            }
            _ => Some(geom::polygon_centroid(&self.vertices)),
        }
    }

    /// Closed membership with absolute slack `eps`.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        !self.empty && geom::in_convex_polygon(&self.vertices, p, eps)
    }
}

/// Slopes in the box `[-bound, bound]^2` satisfying `p . e <= (u(x0 + e) - u(x0)) / |e|`
/// for every lattice direction `e` of the standard stencil with a finite
/// endpoint.
pub fn subgradients(u: &GridFunction, k: usize) -> SubgradientSet {
    subgradients_with(u, k, &StencilSet::standard())
}

pub fn subgradients_with(u: &GridFunction, k: usize, stencil: &StencilSet) -> SubgradientSet {
    let Some(u0) = u.get(k) else {
        return SubgradientSet::empty();
    };
    let g = u.grid();
    let mut planes: Vec<(Point, f64)> = Vec::new();
    let mut scale = 1.0f64;
    for d in stencil.directions() {
        for s in [1i64, -1] {
            let e = [s * d[0], s * d[1]];
            let Some(n) = g.offset(k, e[0], e[1]) else {
                continue;
            };
            let Some(v) = u.get(n) else { continue };
            let len = ((e[0] * e[0] + e[1] * e[1]) as f64).sqrt() * g.h;
            let dir = [e[0] as f64 * g.h / len, e[1] as f64 * g.h / len];
            // round-off slack
            let q = (v - u0 + 64.0 * f64::EPSILON * (v.abs() + u0.abs())) / len;
            scale = scale.max(q.abs());
            planes.push((dir, q));
        }
    }
    let bound = 1e3 * scale;
    let poly = geom::halfplane_intersection(&planes, [-bound, -bound], [bound, bound]);
    if poly.is_empty() {
        return SubgradientSet::empty();
    }
    let bounded = poly.iter().all(|p| p[0].abs() < bound * (1.0 - 1e-12) && p[1].abs() < bound * (1.0 - 1e-12));
    SubgradientSet { vertices: poly, empty: false, bounded }
}
