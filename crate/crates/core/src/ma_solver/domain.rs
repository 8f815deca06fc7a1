//! Bounded convex planar domains.
//!
//! Every supported shape is stored as a Minkowski sum `P + B(0, r)` of a
//! convex core polygon `P` (possibly a point or a segment) and a closed disk.
//! Disks, polygons, stadiums and the rounded inner offsets used by the
//! exhaustion all fit this form, and the signed distance is exact for it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, add, cross, dist, dot, norm, scale, sub, Point};

/// Declarative description, also the JSON layout `{kind, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DomainSpec {
    Disk {
        center: Point,
        radius: f64,
    },
    /// Counter-clockwise convex polygon.
    Polygon {
        vertices: Vec<Point>,
    },
    /// Points within `radius` of the segment `[a, b]`.
    Stadium {
        a: Point,
        b: Point,
        radius: f64,
    },
    /// Minkowski sum of a convex polygon and a disk.
    Rounded {
        vertices: Vec<Point>,
        radius: f64,
    },
    /// Intersection of the half-planes `x . (cos a, sin a) <= s` for each
    /// sampled direction angle `a` and support value `s`.
    Smooth {
        angles: Vec<f64>,
        support: Vec<f64>,
    },
}

/// A piece of the boundary curve, traversed counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryPiece {
    Segment { from: Point, to: Point },
    Arc { center: Point, radius: f64, start: f64, sweep: f64 },
}

impl BoundaryPiece {
    pub fn length(&self) -> f64 {
        match *self {
            BoundaryPiece::Segment { from, to } => dist(from, to),
            BoundaryPiece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    /// Point at arclength fraction `s` in `[0, 1]`.
    pub fn at(&self, s: f64) -> Point {
        match *self {
            BoundaryPiece::Segment { from, to } => geom::lerp(from, to, s),
            BoundaryPiece::Arc { center, radius, start, sweep } => {
                let a = start + s * sweep;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
        }
    }
}

/// Disk containing the domain whose boundary passes through a given point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExteriorCircle {
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarDomain {
    spec: DomainSpec,
    core: Vec<Point>,
    radius: f64,
    // (outward unit normal, offset) per core edge when the core has area
    planes: Vec<(Point, f64)>,
}

const GEOM_TOL: f64 = 1e-12;

impl PlanarDomain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let (core, radius) = match &spec {
            DomainSpec::Disk { center, radius } => {
                check_radius(*radius, true)?;
                (vec![*center], *radius)
            }
            DomainSpec::Polygon { vertices } => (validate_polygon(vertices)?, 0.0),
            DomainSpec::Stadium { a, b, radius } => {
                check_radius(*radius, true)?;
                if dist(*a, *b) <= GEOM_TOL {
                    return Err(Error::InvalidDomain("stadium segment is degenerate".into()));
                }
                (vec![*a, *b], *radius)
            }
            DomainSpec::Rounded { vertices, radius } => {
                check_radius(*radius, false)?;
                let core = if vertices.len() <= 2 { vertices.clone() } else { validate_polygon(vertices)? };
                if core.is_empty() || (core.len() < 3 && *radius <= 0.0) {
                    return Err(Error::InvalidDomain("rounded domain has empty interior".into()));
                }
                (core, *radius)
            }
            DomainSpec::Smooth { angles, support } => {
                if angles.len() != support.len() || angles.len() < 3 {
                    return Err(Error::InvalidDomain("need at least three support samples".into()));
                }
                let big = support.iter().fold(1.0f64, |m, s| m.max(s.abs())) * 4.0;
                let planes: Vec<(Point, f64)> =
                    angles.iter().zip(support).map(|(a, s)| ([a.cos(), a.sin()], *s)).collect();
                let poly = geom::halfplane_intersection(&planes, [-big, -big], [big, big]);
                (validate_polygon(&geom::convex_hull(&poly))?, 0.0)
            }
        };
        let planes = edge_planes(&core);
        Ok(Self { spec, core, radius, planes })
    }

    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        Self::new(DomainSpec::Disk { center, radius })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Self::new(DomainSpec::Polygon { vertices })
    }

    pub fn stadium(a: Point, b: Point, radius: f64) -> Result<Self> {
        Self::new(DomainSpec::Stadium { a, b, radius })
    }

    pub fn rounded(vertices: Vec<Point>, radius: f64) -> Result<Self> {
        Self::new(DomainSpec::Rounded { vertices, radius })
    }

    pub fn unit_disk() -> Self {
        Self::disk([0.0, 0.0], 1.0).expect("unit disk")
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    /// Vertices of the core polygon (one point for a disk, two for a stadium).
    pub fn core(&self) -> &[Point] {
        &self.core
    }

    /// Rounding radius of the Minkowski sum.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_polygon(&self) -> bool {
        self.radius == 0.0
    }

    /// Signed distance to the core polygon, nonnegative for point and segment cores.
    fn core_sdf(&self, p: Point) -> f64 {
        match self.core.len() {
            1 => dist(p, self.core[0]),
            2 => geom::point_segment_distance(p, self.core[0], self.core[1]),
            n => {
                let mut inside = f64::INFINITY;
                let mut outside = false;
                for &(nrm, b) in &self.planes {
                    let s = b - dot(nrm, p);
                    if s < 0.0 {
                        outside = true;
                        break;
                    }
                    inside = inside.min(s);
                }
                if !outside {
                    return -inside;
                }
                (0..n)
                    .map(|i| geom::point_segment_distance(p, self.core[i], self.core[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Exact signed distance to the boundary, negative inside.
    pub fn sdf(&self, p: Point) -> f64 {
        self.core_sdf(p) - self.radius
    }

    /// Open interior test.
    pub fn contains(&self, p: Point) -> bool {
        self.sdf(p) < 0.0
    }

    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        self.sdf(p) <= tol
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.core {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d] - self.radius);
                hi[d] = hi[d].max(p[d] + self.radius);
            }
        }
        (lo, hi)
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        dist(lo, hi)
    }

    /// Support function `max over the closure of x . dir` for a unit direction.
    pub fn support(&self, dir: Point) -> f64 {
        self.core.iter().map(|&p| dot(p, dir)).fold(f64::NEG_INFINITY, f64::max) + self.radius * norm(dir)
    }

    /// Largest `t` with `x + t d` in the closure, for `x` inside and `t <= tmax`;
    /// `None` when `x + tmax d` is still in the open domain.
    pub fn ray_exit(&self, x: Point, d: Point, tmax: f64) -> Option<f64> {
        if self.sdf(add(x, scale(d, tmax))) < 0.0 {
            return None;
        }
        if self.radius == 0.0 && self.core.len() >= 3 {
            let mut t = tmax;
            for &(nrm, b) in &self.planes {
                let nd = dot(nrm, d);
                if nd > 0.0 {
                    t = t.min((b - dot(nrm, x)) / nd);
                }
            }
            return Some(t.max(0.0));
        }
        if self.core.len() == 1 {
            // |x + t d - c| = r
            let c = self.core[0];
            let q = sub(x, c);
            let a = dot(d, d);
            let b = dot(q, d);
            let cc = dot(q, q) - self.radius * self.radius;
            let disc = (b * b - a * cc).max(0.0);
            let t = if b >= 0.0 { -cc / (b + disc.sqrt()) } else { (disc.sqrt() - b) / a };
            return Some(t.clamp(0.0, tmax));
        }
        let (mut lo, mut hi) = (0.0, tmax);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sdf(add(x, scale(d, mid))) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }

    pub fn boundary_pieces(&self) -> Vec<BoundaryPiece> {
        let r = self.radius;
        let n = self.core.len();
        if n == 1 {
            return vec![BoundaryPiece::Arc { center: self.core[0], radius: r, start: 0.0, sweep: 2.0 * PI }];
        }
        let normals: Vec<Point> = (0..n)
            .map(|i| {
                let e = sub(self.core[(i + 1) % n], self.core[i]);
                let l = norm(e);
                [e[1] / l, -e[0] / l]
            })
            .collect();
        let mut pieces = Vec::with_capacity(2 * n);
        for i in 0..n {
            let j = (i + 1) % n;
            let nrm = normals[i];
            pieces.push(BoundaryPiece::Segment {
                from: add(self.core[i], scale(nrm, r)),
                to: add(self.core[j], scale(nrm, r)),
            });
            if r > 0.0 {
                let a0 = nrm[1].atan2(nrm[0]);
                let next = normals[j];
                let mut sweep = next[1].atan2(next[0]) - a0;
                while sweep < 0.0 {
                    sweep += 2.0 * PI;
                }
                if sweep > 1e-14 {
                    pieces.push(BoundaryPiece::Arc { center: self.core[j], radius: r, start: a0, sweep });
                }
            }
        }
        pieces
    }

    pub fn perimeter(&self) -> f64 {
        self.boundary_pieces().iter().map(BoundaryPiece::length).sum()
    }

    /// About `n` boundary points evenly spread by arclength, counter-clockwise,
    /// always containing the start of every piece (the polygon vertices).
    pub fn sample_boundary(&self, n: usize) -> Vec<Point> {
        let pieces = self.boundary_pieces();
        let total: f64 = pieces.iter().map(BoundaryPiece::length).sum();
        let mut out = Vec::with_capacity(n + pieces.len());
        for piece in &pieces {
            let m = ((piece.length() / total) * n as f64).round().max(1.0) as usize;
            for s in 0..m {
                out.push(piece.at(s as f64 / m as f64));
            }
        }
        geom::dedup_cyclic(&mut out, 1e-14);
        out
    }

    /// An interior reference point; polar angle around it orders the boundary.
    pub fn reference_point(&self) -> Point {
        geom::polygon_centroid(&self.core)
    }

    /// Polar angle of `p` seen from [`Self::reference_point`], in `[0, 2 pi)`.
    pub fn boundary_angle(&self, p: Point) -> f64 {
        let c = self.reference_point();
        let a = (p[1] - c[1]).atan2(p[0] - c[0]);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Index of the straight boundary piece containing `p`, if any.
    pub fn straight_piece_of(&self, p: Point, tol: f64) -> Option<usize> {
        self.boundary_pieces().iter().position(|piece| match *piece {
            BoundaryPiece::Segment { from, to } => {
                dist(from, to) > tol && geom::point_segment_distance(p, from, to) <= tol
            }
            BoundaryPiece::Arc { .. } => false,
        })
    }

    /// Center and radius of the largest inscribed disk.
    pub fn inscribed_disk(&self) -> (Point, f64) {
        // -sdf is concave; compass search from the core centroid
        let mut c = self.reference_point();
        let mut best = -self.sdf(c);
        let mut step = 0.25 * self.diameter();
        while step > 1e-13 * self.diameter().max(1.0) {
            let mut improved = false;
            for k in 0..8 {
                let a = k as f64 * PI / 4.0;
                let q = [c[0] + step * a.cos(), c[1] + step * a.sin()];
                let v = -self.sdf(q);
                if v > best {
                    best = v;
                    c = q;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (c, best)
    }

    /// Outward unit normals spanning the normal cone at a boundary point: one
    /// normal on smooth points, the two edge normals at a polygon vertex.
    pub fn normal_cone(&self, x0: Point) -> Vec<Point> {
        let tol = 1e-9 * self.diameter().max(1.0);
        if self.radius > 0.0 || self.core.len() < 3 {
            let p = self.nearest_core_point(x0);
            let d = sub(x0, p);
            let l = norm(d);
            return if l > 0.0 { vec![scale(d, 1.0 / l)] } else { Vec::new() };
        }
        self.planes.iter().filter(|(n, b)| (dot(*n, x0) - b).abs() <= tol).map(|(n, _)| *n).collect()
    }

    fn nearest_core_point(&self, p: Point) -> Point {
        let n = self.core.len();
        if n == 1 {
            return self.core[0];
        }
        let m = if n == 2 { 1 } else { n };
        let mut best = self.core[0];
        let mut bd = f64::INFINITY;
        for i in 0..m {
            let a = self.core[i];
            let b = self.core[(i + 1) % n];
            let e = sub(b, a);
            let t = (dot(sub(p, a), e) / dot(e, e)).clamp(0.0, 1.0);
            let q = geom::lerp(a, b, t);
            let d = dist(p, q);
            if d < bd {
                bd = d;
                best = q;
            }
        }
        best
    }

    /// Smallest witness disk for the exterior circle condition at the
    /// boundary point `x0`, searched over the normal cone.
    pub fn exterior_circle(&self, x0: Point) -> Option<ExteriorCircle> {
        let cone = self.normal_cone(x0);
        let candidates: Vec<Point> = match cone.len() {
            0 => return None,
            1 => cone,
            _ => {
                let a0 = cone[0][1].atan2(cone[0][0]);
                let mut sweep = cone[1][1].atan2(cone[1][0]) - a0;
                if sweep > PI {
                    sweep -= 2.0 * PI;
                }
                if sweep < -PI {
                    sweep += 2.0 * PI;
                }
                (1..64)
                    .map(|k| {
                        let a = a0 + sweep * k as f64 / 64.0;
                        [a.cos(), a.sin()]
                    })
                    .collect()
            }
        };
        let scale_len = self.diameter().max(1.0);
        let tol = 1e-10 * scale_len;
        let mut best: Option<ExteriorCircle> = None;
        'normals: for nrm in candidates {
            let mut radius = self.radius.max(tol);
            for &p in &self.core {
                let a = dot(nrm, sub(p, x0)) + self.radius;
                let b = dot(sub(p, x0), sub(p, x0)) - self.radius * self.radius;
                if a > tol {
                    continue 'normals;
                }
                if a >= -tol {
                    if b > tol * scale_len {
                        continue 'normals;
                    }
                    continue;
                }
                radius = radius.max(b / (-2.0 * a));
            }
            if best.map_or(true, |c| radius < c.radius) {
                best = Some(ExteriorCircle { center: sub(x0, scale(nrm, radius)), radius });
            }
        }
        best
    }

    /// Exact containment `self subset other` of the closed domains.
    pub fn is_contained_in(&self, other: &PlanarDomain, tol: f64) -> bool {
        self.core.iter().all(|&p| other.sdf(p) <= -self.radius + tol)
    }

    /// Inner parallel body: points at distance at least `s` from the complement.
    pub fn inset(&self, s: f64) -> Result<PlanarDomain> {
        if s <= self.radius {
            return Self::rounded_or_disk(self.core.clone(), self.radius - s);
        }
        let e = s - self.radius;
        if self.core.len() < 3 {
            return Err(Error::InvalidDomain("inset removes the whole domain".into()));
        }
        let shifted: Vec<(Point, f64)> = self.planes.iter().map(|&(n, b)| (n, b - e)).collect();
        let mut poly = self.core.clone();
        for (n, b) in shifted {
            poly = geom::clip_halfplane(&poly, n, b);
        }
        let poly = geom::convex_hull(&poly);
        if poly.len() < 3 || geom::polygon_area(&poly) <= 1e-14 * self.diameter().powi(2) {
            return Err(Error::InvalidDomain("inset removes the whole domain".into()));
        }
        Self::rounded_or_disk(poly, 0.0)
    }

    /// Strictly convex inner approximation `(self - B(2 delta)) + B(delta)`.
    pub fn rounded_inset(&self, delta: f64) -> Result<PlanarDomain> {
        let inner = self.inset(2.0 * delta)?;
        Self::rounded_or_disk(inner.core, inner.radius + delta)
    }

    fn rounded_or_disk(core: Vec<Point>, radius: f64) -> Result<PlanarDomain> {
        match core.len() {
            1 => Self::disk(core[0], radius),
            2 => Self::stadium(core[0], core[1], radius),
            _ if radius == 0.0 => Self::polygon(core),
            _ => Self::rounded(core, radius),
        }
    }

    /// Interior offset `e` along the inward normal from a boundary point.
    pub fn inward_normal(&self, x0: Point) -> Option<Point> {
        let cone = self.normal_cone(x0);
        match cone.len() {
            0 => None,
            1 => Some(scale(cone[0], -1.0)),
            _ => {
                let s = add(cone[0], cone[1]);
                let l = norm(s);
                (l > 0.0).then(|| scale(s, -1.0 / l))
            }
        }
    }

    /// End points of the chord cut by the line `x[axis] = c`, lowest first.
    pub fn chord(&self, axis: usize, c: f64) -> Option<(Point, Point)> {
        let other = 1 - axis;
        let (lo, hi) = self.bbox();
        if c <= lo[axis] || c >= hi[axis] {
            return None;
        }
        let at = |s: f64| {
            let mut p = [0.0; 2];
            p[axis] = c;
            p[other] = s;
            p
        };
        // the signed distance is convex along the line
        let (mut a, mut b) = (lo[other], hi[other]);
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if self.sdf(at(m1)) < self.sdf(at(m2)) {
                b = m2;
            } else {
                a = m1;
            }
            if b - a <= 1e-15 * (hi[other] - lo[other]) {
                break;
            }
        }
        let mid = at(0.5 * (a + b));
        if self.sdf(mid) >= 0.0 {
            return None;
        }
        let span = hi[other] - lo[other] + 1.0;
        let mut dir = [0.0; 2];
        dir[other] = 1.0;
        let t1 = self.ray_exit(mid, dir, span)?;
        let t0 = self.ray_exit(mid, scale(dir, -1.0), span)?;
        Some((add(mid, scale(dir, -t0)), add(mid, scale(dir, t1))))
    }

    /// Does `p` lie on the open interior of a straight boundary piece?
    pub fn on_flat_part(&self, p: Point) -> bool {
        let tol = 1e-9 * self.diameter().max(1.0);
        self.boundary_pieces().iter().any(|piece| match *piece {
            BoundaryPiece::Segment { from, to } => {
                let l = dist(from, to);
                l > tol && geom::point_segment_distance(p, from, to) <= tol && dist(p, from) > tol && dist(p, to) > tol
            }
            BoundaryPiece::Arc { .. } => false,
        })
    }
}

fn check_radius(r: f64, strict: bool) -> Result<()> {
    if !r.is_finite() || r < 0.0 || (strict && r == 0.0) {
        return Err(Error::InvalidDomain(format!("invalid radius {r}")));
    }
    Ok(())
}

fn validate_polygon(vertices: &[Point]) -> Result<Vec<Point>> {
    if vertices.len() < 3 {
        return Err(Error::InvalidDomain("polygon needs at least three vertices".into()));
    }
    let n = vertices.len();
    let scale_len = vertices.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    for i in 0..n {
        if !vertices[i][0].is_finite() || !vertices[i][1].is_finite() {
            return Err(Error::InvalidDomain("non-finite vertex".into()));
        }
        if dist(vertices[i], vertices[(i + 1) % n]) <= GEOM_TOL * scale_len {
            return Err(Error::InvalidDomain(format!("duplicate vertex {i}")));
        }
    }
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        if cross(sub(b, a), sub(c, b)) <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "polygon is not strictly convex and counter-clockwise at vertex {}",
                (i + 1) % n
            )));
        }
    }
    // a strictly left-turning cycle can still wind twice
    let mut turn = 0.0;
    for i in 0..n {
        let e0 = sub(vertices[(i + 1) % n], vertices[i]);
        let e1 = sub(vertices[(i + 2) % n], vertices[(i + 1) % n]);
        turn += cross(e0, e1).atan2(dot(e0, e1));
    }
    if (turn - 2.0 * PI).abs() > 1e-6 {
        return Err(Error::InvalidDomain("polygon winds more than once".into()));
    }
    Ok(vertices.to_vec())
}

fn edge_planes(core: &[Point]) -> Vec<(Point, f64)> {
    let n = core.len();
    if n < 3 {
        return Vec::new();
    }
    (0..n)
        .map(|i| {
            let e = sub(core[(i + 1) % n], core[i]);
            let l = norm(e);
            let nrm = [e[1] / l, -e[0] / l];
            (nrm, dot(nrm, core[i]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PlanarDomain {
        PlanarDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(PlanarDomain::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(PlanarDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(PlanarDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(PlanarDomain::disk([0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn signed_distance_is_exact_on_disk_and_square() {
        let d = PlanarDomain::unit_disk();
        assert!((d.sdf([0.5, 0.0]) + 0.5).abs() < 1e-15);
        assert!((d.sdf([0.0, 2.0]) - 1.0).abs() < 1e-15);
        let s = square();
        assert!((s.sdf([0.5, 0.25]) + 0.25).abs() < 1e-15);
        assert!((s.sdf([2.0, 2.0]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn stadium_distance() {
        let s = PlanarDomain::stadium([-1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        assert!((s.sdf([0.0, 0.0]) + 0.5).abs() < 1e-15);
        assert!((s.sdf([2.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((s.perimeter() - (4.0 + PI)).abs() < 1e-12);
    }

    #[test]
    fn ray_exit_hits_boundary() {
        let d = PlanarDomain::unit_disk();
        let t = d.ray_exit([0.5, 0.0], [1.0, 0.0], 2.0).unwrap();
        assert!((t - 0.5).abs() < 1e-14);
        assert!(d.ray_exit([0.0, 0.0], [0.1, 0.0], 1.0).is_none());
        let st = PlanarDomain::stadium([-1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        let t = st.ray_exit([1.0, 0.0], [0.0, 1.0], 1.0).unwrap();
        assert!((t - 0.5).abs() < 1e-14);
        let t = square().ray_exit([0.5, 0.5], [1.0, 1.0], 3.0).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_samples_lie_on_boundary_and_include_vertices() {
        for d in [PlanarDomain::unit_disk(), square(), PlanarDomain::stadium([0.0, 0.0], [1.0, 0.0], 0.3).unwrap()] {
            let pts = d.sample_boundary(100);
            assert!(pts.len() >= 90);
            for p in &pts {
                assert!(d.sdf(*p).abs() < 1e-12);
            }
        }
        let pts = square().sample_boundary(40);
        for v in [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] {
            assert!(pts.iter().any(|p| dist(*p, v) < 1e-15));
        }
    }

    #[test]
    fn exterior_circle_at_vertices_but_not_on_edges() {
        let s = square();
        let c = s.exterior_circle([1.0, 1.0]).unwrap();
        assert!((c.radius - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(s.exterior_circle([0.5, 0.0]).is_none());
        let d = PlanarDomain::unit_disk();
        let c = d.exterior_circle([0.0, 1.0]).unwrap();
        assert!((c.radius - 1.0).abs() < 1e-12 && norm(c.center) < 1e-12);
        let st = PlanarDomain::stadium([-1.0, 0.0], [1.0, 0.0], 0.5).unwrap();
        assert!(st.exterior_circle([0.0, 0.5]).is_none());
        let arc = st.exterior_circle([1.5, 0.0]).unwrap();
        // the witness contains the far cap and touches the sample point
        assert!((dist(arc.center, [1.5, 0.0]) - arc.radius).abs() < 1e-9);
        assert!(dist(arc.center, [-1.0, 0.0]) + 0.5 <= arc.radius + 1e-9);
    }

    #[test]
    fn insets_and_containment() {
        let s = square();
        let v = s.rounded_inset(0.05).unwrap();
        assert!(v.is_contained_in(&s, 1e-12));
        assert!((v.sdf([0.5, 0.5]) + 0.45).abs() < 1e-12);
        assert!(!s.is_contained_in(&v, 1e-12));
        let d = PlanarDomain::unit_disk().rounded_inset(0.1).unwrap();
        assert!(matches!(d.spec(), DomainSpec::Disk { radius, .. } if (radius - 0.9).abs() < 1e-15));
        assert!(s.inset(0.6).is_err());
    }

    #[test]
    fn inscribed_disk_of_square() {
        let (c, r) = square().inscribed_disk();
        assert!((r - 0.5).abs() < 1e-9);
        assert!(dist(c, [0.5, 0.5]) < 1e-6);
    }

    #[test]
    fn smooth_kind_from_support_samples() {
        let n = 64;
        let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
        let d = PlanarDomain::new(DomainSpec::Smooth { support: vec![1.0; n], angles }).unwrap();
        assert!(d.contains([0.99, 0.0]));
        assert!(!d.contains([1.01, 0.0]));
    }

    #[test]
    fn json_layout_is_kind_and_params() {
        let s = serde_json::to_string(PlanarDomain::unit_disk().spec()).unwrap();
        assert_eq!(s, r#"{"kind":"disk","params":{"center":[0.0,0.0],"radius":1.0}}"#);
    }
}
