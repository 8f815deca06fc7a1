use serde::{Deserialize, Serialize};

use crate::convex_core::Grid;
use crate::error::{Error, Result};
use crate::geom::{self, dist, Point};
use crate::ma_solver::PlanarDomain;

/// A boundary point with an extended-real value (`None` is `+inf`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Point,
    pub value: Option<f64>,
}

/// Extended-real function on the boundary of a planar domain, sampled at
/// points ordered counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFunction {
    samples: Vec<BoundarySample>,
    domain: PlanarDomain,
}

const ON_BOUNDARY_TOL: f64 = 1e-9;

impl BoundaryFunction {
    /// Samples must lie on the boundary; they are re-ordered counter-clockwise
    /// and exact duplicates are merged keeping the smaller value.
    pub fn new(domain: PlanarDomain, samples: Vec<BoundarySample>) -> Result<Self> {
        let tol = ON_BOUNDARY_TOL * domain.diameter().max(1.0);
        for (i, s) in samples.iter().enumerate() {
            if domain.sdf(s.point).abs() > tol {
                return Err(Error::InvalidInput(format!("sample {i} is not on the domain boundary")));
            }
            if let Some(v) = s.value {
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!("sample {i} has a non-finite value")));
                }
            }
        }
        let mut keyed: Vec<(f64, BoundarySample)> =
            samples.into_iter().map(|s| (domain.boundary_angle(s.point), s)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<BoundarySample> = Vec::with_capacity(keyed.len());
        for (_, s) in keyed {
            match merged.last_mut() {
                Some(last) if dist(last.point, s.point) <= 1e-14 * domain.diameter().max(1.0) => {
                    last.value = match (last.value, s.value) {
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, b) => a.or(b),
                    };
                }
                _ => merged.push(s),
            }
        }
        Ok(Self { samples: merged, domain })
    }

    /// Samples `f` at about `n` boundary points spread by arclength.
    pub fn from_fn(domain: PlanarDomain, n: usize, f: impl Fn(Point) -> Option<f64>) -> Result<Self> {
        let samples = domain.sample_boundary(n).into_iter().map(|p| BoundarySample { point: p, value: f(p) }).collect();
        Self::new(domain, samples)
    }

    /// As [`Self::from_fn`], adding the points where grid lines cross the
    /// boundary so that the hull of the samples contains every grid node of
    /// the domain on which `f` is finite.
    pub fn from_fn_on_grid(
        domain: PlanarDomain,
        grid: &Grid,
        n: usize,
        f: impl Fn(Point) -> Option<f64>,
    ) -> Result<Self> {
        let mut pts = domain.sample_boundary(n);
        for j in 0..grid.ny {
            if let Some((a, b)) = domain.chord(1, grid.point(0, j)[1]) {
                pts.push(a);
                pts.push(b);
            }
        }
        for i in 0..grid.nx {
            if let Some((a, b)) = domain.chord(0, grid.point(i, 0)[0]) {
                pts.push(a);
                pts.push(b);
            }
        }
        let samples = pts.into_iter().map(|p| BoundarySample { point: p, value: f(p) }).collect();
        Self::new(domain, samples)
    }

    /// `0` at the given boundary points, `+inf` at `n_background` other samples.
    pub fn indicator(domain: PlanarDomain, points: &[Point], n_background: usize) -> Result<Self> {
        let tol = 1e-12 * domain.diameter().max(1.0);
        let mut samples: Vec<BoundarySample> = domain
            .sample_boundary(n_background)
            .into_iter()
            .filter(|p| points.iter().all(|q| dist(*p, *q) > tol))
            .map(|p| BoundarySample { point: p, value: None })
            .collect();
        samples.extend(points.iter().map(|&p| BoundarySample { point: p, value: Some(0.0) }));
        Self::new(domain, samples)
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    pub fn finite_samples(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.samples.iter().filter_map(|s| s.value.map(|v| (s.point, v)))
    }

    pub fn finite_count(&self) -> usize {
        self.samples.iter().filter(|s| s.value.is_some()).count()
    }

    pub fn is_finite_everywhere(&self) -> bool {
        self.samples.iter().all(|s| s.value.is_some())
    }

    fn scale(&self) -> f64 {
        self.finite_samples().fold(1.0f64, |m, (_, v)| m.max(v.abs()))
    }

    /// Discrete lower semicontinuity: a sample may rise above its larger
    /// neighbour by at most twice the neighbouring increment, rescaled by the
    /// sample spacing. A `+inf` sample between two finite neighbours fails.
    pub fn check_lower_semicontinuous(&self, rtol: f64) -> Result<()> {
        let n = self.samples.len();
        if n < 3 {
            return Ok(());
        }
        let tol = rtol * self.scale();
        let val = |k: isize| self.samples[k.rem_euclid(n as isize) as usize].value;
        let pt = |k: isize| self.samples[k.rem_euclid(n as isize) as usize].point;
        for i in 0..n as isize {
            let (prev, next) = (val(i - 1), val(i + 1));
            match val(i) {
                None => {
                    if prev.is_some() && next.is_some() {
                        return Err(Error::NotLowerSemicontinuous { index: i as usize });
                    }
                }
                Some(v) => {
                    // (neighbour value, allowed rise) for one side
                    let side = |near: isize, far: isize| -> Option<(f64, f64)> {
                        let a = val(near)?;
                        let rise = match val(far) {
                            Some(b) => {
                                let d_near = dist(pt(i), pt(near));
                                let d_far = dist(pt(near), pt(far));
                                if d_far > 0.0 {
                                    2.0 * (a - b).abs() * (d_near / d_far).max(1.0)
                                } else {
                                    0.0
                                }
                            }
                            None => 0.0,
                        };
                        Some((a, rise))
                    };
                    let sides: Vec<(f64, f64)> =
                        [side(i - 1, i - 2), side(i + 1, i + 2)].into_iter().flatten().collect();
                    let Some(&(top, _)) = sides.iter().max_by(|x, y| x.0.total_cmp(&y.0)) else {
                        continue;
                    };
                    let rise = sides.iter().fold(0.0f64, |m, s| m.max(s.1));
                    if v > top + rise + tol {
                        return Err(Error::NotLowerSemicontinuous { index: i as usize });
                    }
                }
            }
        }
        Ok(())
    }

    /// Finite samples on each straight boundary piece must be convex along it.
    pub fn check_convex_on_segments(&self, rtol: f64) -> Result<()> {
        let tol = ON_BOUNDARY_TOL * self.domain.diameter().max(1.0);
        let pieces = self.domain.boundary_pieces();
        let mut groups: Vec<Vec<(f64, f64, usize)>> = vec![Vec::new(); pieces.len()];
        for (idx, s) in self.samples.iter().enumerate() {
            let Some(v) = s.value else { continue };
            if let Some(k) = self.domain.straight_piece_of(s.point, tol) {
                if let crate::ma_solver::BoundaryPiece::Segment { from, .. } = pieces[k] {
                    groups[k].push((dist(from, s.point), v, idx));
                }
            }
        }
        let slope_tol = rtol * self.scale();
        for mut g in groups {
            g.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in g.windows(3) {
                let (s0, v0, _) = w[0];
                let (s1, v1, idx) = w[1];
                let (s2, v2, _) = w[2];
                if s1 - s0 <= 0.0 || s2 - s1 <= 0.0 {
                    continue;
                }
                let left = (v1 - v0) / (s1 - s0);
                let right = (v2 - v1) / (s2 - s1);
                if right < left - slope_tol * (1.0 / (s1 - s0) + 1.0 / (s2 - s1)) {
                    return Err(Error::NotConvexOnSegment { index: idx });
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check_lower_semicontinuous(1e-9)?;
        self.check_convex_on_segments(1e-9)
    }

    /// Convex hull of the finite samples, counter-clockwise.
    pub fn dom_hull(&self) -> Vec<Point> {
        let pts: Vec<Point> = self.finite_samples().map(|(p, _)| p).collect();
        geom::convex_hull(&pts)
    }

    /// Interior of the convex hull of `dom phi` as a domain: the whole domain
    /// when every sample is finite, otherwise the hull polygon.
    pub fn hull_domain(&self) -> Result<PlanarDomain> {
        if self.finite_count() == 0 {
            return Err(Error::AllInfinite);
        }
        if self.is_finite_everywhere() {
            return Ok(self.domain.clone());
        }
        let hull = self.dom_hull();
        let area = geom::polygon_area(&hull);
        if hull.len() < 3 || area <= 1e-12 * self.domain.diameter().powi(2) {
            return Err(Error::DegenerateHull);
        }
        PlanarDomain::polygon(hull).map_err(|_| Error::DegenerateHull)
    }
}
