//! Lower convex envelope of lifted boundary samples.
//!
//! The samples lie on the boundary of their planar hull, so the envelope is
//! a triangulated lower hull whose vertices are samples. It is built by
//! pruning each straight run of the hull to its one-dimensional lower hull,
//! ear-clipping the resulting polygon and applying Lawson flips until every
//! interior edge is locally convex.

use std::collections::HashMap;

use crate::convex_core::{BoundaryFunction, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::{self, barycentric, dist, orient, sub, Point};

#[derive(Clone, Debug)]
enum Shape {
    Point,
    /// Samples along a line, sorted by the parameter.
    Segment {
        origin: Point,
        dir: Point,
        params: Vec<f64>,
    },
    Triangulated {
        triangles: Vec<[usize; 3]>,
        buckets: Buckets,
    },
}

#[derive(Clone, Debug)]
struct Buckets {
    lo: Point,
    cell: Point,
    n: usize,
    lists: Vec<Vec<usize>>,
}

/// Piecewise-linear convex envelope over the hull of a sample set.
#[derive(Clone, Debug)]
pub struct Envelope {
    points: Vec<Point>,
    values: Vec<f64>,
    hull: Vec<Point>,
    shape: Shape,
    eps: f64,
}

impl Envelope {
    /// Envelope of finite samples lying on the boundary of their convex hull.
    pub fn from_samples(points: &[Point], values: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::AllInfinite);
        }
        if points.len() != values.len() {
            return Err(Error::InvalidInput("points and values differ in length".into()));
        }
        let scale = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        let eps = 1e-12 * scale;
        // merge duplicates keeping the smaller value
        let mut pv: Vec<(Point, f64)> = points.iter().copied().zip(values.iter().copied()).collect();
        pv.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]).then(a.0[1].total_cmp(&b.0[1])));
        let mut uniq: Vec<(Point, f64)> = Vec::with_capacity(pv.len());
        for (p, v) in pv {
            match uniq.last_mut() {
                Some(last) if dist(last.0, p) <= eps => last.1 = last.1.min(v),
                _ => uniq.push((p, v)),
            }
        }
        let pts: Vec<Point> = uniq.iter().map(|x| x.0).collect();
        let hull = geom::convex_hull(&pts);
        if hull.len() == 1 {
            return Ok(Self { points: vec![uniq[0].0], values: vec![uniq[0].1], hull, shape: Shape::Point, eps });
        }
        if hull.len() == 2 {
            let origin = hull[0];
            let d = sub(hull[1], hull[0]);
            let l = geom::norm(d);
            let dir = [d[0] / l, d[1] / l];
            let mut run: Vec<(f64, f64, Point)> =
                uniq.iter().map(|&(p, v)| (geom::dot(sub(p, origin), dir), v, p)).collect();
            run.sort_by(|a, b| a.0.total_cmp(&b.0));
            let keep = lower_hull_1d(&run.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>());
            let points: Vec<Point> = keep.iter().map(|&k| run[k].2).collect();
            let values: Vec<f64> = keep.iter().map(|&k| run[k].1).collect();
            let params: Vec<f64> = keep.iter().map(|&k| run[k].0).collect();
            return Ok(Self { points, values, hull, shape: Shape::Segment { origin, dir, params }, eps });
        }
        // cyclic order along the hull boundary
        let nh = hull.len();
        let perim_tol = 1e-9 * scale;
        let mut keyed: Vec<(usize, f64, Point, f64)> = Vec::with_capacity(uniq.len());
        for &(p, v) in &uniq {
            let mut found = None;
            for e in 0..nh {
                let a = hull[e];
                let b = hull[(e + 1) % nh];
                if geom::point_segment_distance(p, a, b) <= perim_tol {
                    let t = dist(a, p);
                    // a vertex belongs to the edge it starts
                    if t >= dist(a, b) - eps {
                        continue;
                    }
                    found = Some((e, t));
                    break;
                }
            }
            match found {
                Some((e, t)) => keyed.push((e, t, p, v)),
                None => {
                    return Err(Error::InvalidInput(
                        "envelope samples must lie on the boundary of their convex hull".into(),
                    ))
                }
            }
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        // prune every edge run to its 1D lower hull; runs start at a hull vertex
        let mut cycle: Vec<(Point, f64)> = Vec::with_capacity(keyed.len());
        let mut start = 0;
        while start < keyed.len() {
            let e = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == e {
                end += 1;
            }
            // include the next run's first vertex as the right end point
            let next = &keyed[end % keyed.len()];
            let mut run: Vec<(f64, f64)> = keyed[start..end].iter().map(|k| (k.1, k.3)).collect();
            let edge_len = dist(hull[e], hull[(e + 1) % nh]);
            run.push((edge_len, next.3));
            let keep = lower_hull_1d(&run);
            for &k in &keep {
                if k < end - start {
                    cycle.push((keyed[start + k].2, keyed[start + k].3));
                }
            }
            start = end;
        }
        let points: Vec<Point> = cycle.iter().map(|c| c.0).collect();
        let values: Vec<f64> = cycle.iter().map(|c| c.1).collect();
        let mut triangles = ear_clip(&points);
        lawson_flips(&points, &values, &mut triangles);
        let buckets = Buckets::new(&points, &triangles);
        Ok(Self { points, values, hull, shape: Shape::Triangulated { triangles, buckets }, eps })
    }

    /// Envelope of the finite samples of a boundary function.
    pub fn of_boundary(phi: &BoundaryFunction) -> Result<Self> {
        if phi.finite_count() == 0 {
            return Err(Error::AllInfinite);
        }
        phi.check_lower_semicontinuous(1e-9)?;
        phi.check_convex_on_segments(1e-9)?;
        let (pts, vals): (Vec<Point>, Vec<f64>) = phi.finite_samples().unzip();
        Self::from_samples(&pts, &vals)
    }

    /// Convex hull of the samples (counter-clockwise, collinear points dropped).
    pub fn hull(&self) -> &[Point] {
        &self.hull
    }

    /// Samples that are vertices of the lower hull.
    pub fn vertices(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.values.iter().copied())
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        match &self.shape {
            Shape::Triangulated { triangles, .. } => triangles,
            _ => &[],
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        geom::in_convex_polygon(&self.hull, p, self.eps)
    }

    /// Envelope value, `None` outside the closed hull.
    pub fn eval(&self, p: Point) -> Option<f64> {
        match &self.shape {
            Shape::Point => (dist(p, self.points[0]) <= self.eps).then_some(self.values[0]),
            Shape::Segment { origin, dir, params } => {
                let d = sub(p, *origin);
                let s = geom::dot(d, *dir);
                if geom::cross(*dir, d).abs() > self.eps {
                    return None;
                }
                let n = params.len();
                if s < params[0] - self.eps || s > params[n - 1] + self.eps {
                    return None;
                }
                if n == 1 {
                    return Some(self.values[0]);
                }
                let k = params.partition_point(|&t| t <= s).clamp(1, n - 1);
                let t = ((s - params[k - 1]) / (params[k] - params[k - 1])).clamp(0.0, 1.0);
                Some(self.values[k - 1] + t * (self.values[k] - self.values[k - 1]))
            }
            Shape::Triangulated { triangles, buckets } => {
                if !self.contains(p) {
                    return None;
                }
                let mut best: Option<(f64, [f64; 3], usize)> = None;
                for &t in buckets.candidates(p) {
                    let [a, b, c] = triangles[t];
                    let l = barycentric(p, self.points[a], self.points[b], self.points[c]);
                    let worst = l[0].min(l[1]).min(l[2]);
                    if worst >= 0.0 {
                        best = Some((worst, l, t));
                        break;
                    }
                    if best.map_or(true, |b| worst > b.0) {
                        best = Some((worst, l, t));
                    }
                }
                let (_, l, t) = best?;
                let [a, b, c] = triangles[t];
                let l = [l[0].max(0.0), l[1].max(0.0), l[2].max(0.0)];
                let s = l[0] + l[1] + l[2];
                Some((l[0] * self.values[a] + l[1] * self.values[b] + l[2] * self.values[c]) / s)
            }
        }
    }

    /// Samples the envelope on a grid; `+inf` outside the hull.
    pub fn to_grid(&self, grid: &Grid) -> GridFunction {
        GridFunction::from_fn(*grid, |p| self.eval(p))
    }
}

/// Envelope of a boundary function sampled at the grid nodes.
pub fn convex_envelope(phi: &BoundaryFunction, grid: &Grid) -> Result<GridFunction> {
    Ok(Envelope::of_boundary(phi)?.to_grid(grid))
}

/// Indices of the strict lower convex hull of `(s, v)` pairs sorted by `s`.
fn lower_hull_1d(run: &[(f64, f64)]) -> Vec<usize> {
    let mut keep: Vec<usize> = Vec::with_capacity(run.len());
    for k in 0..run.len() {
        while keep.len() >= 2 {
            let (s0, v0) = run[keep[keep.len() - 2]];
            let (s1, v1) = run[keep[keep.len() - 1]];
            let (s2, v2) = run[k];
            // drop the middle point unless strictly below the chord
            let cross = (s1 - s0) * (v2 - v0) - (s2 - s0) * (v1 - v0);
            let tol = 1e-14 * (s2 - s0) * (1.0 + v0.abs().max(v1.abs()).max(v2.abs()));
            if cross <= tol {
                keep.pop();
            } else {
                break;
            }
        }
        keep.push(k);
    }
    keep
}

/// Triangulates a counter-clockwise polygon whose vertices may include
/// collinear runs, never creating zero-area triangles.
fn ear_clip(points: &[Point]) -> Vec<[usize; 3]> {
    let scale = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = 1e-13 * scale * scale;
    let mut ring: Vec<usize> = (0..points.len()).collect();
    let mut area: f64 = geom::polygon_area(points);
    let mut tris = Vec::with_capacity(points.len().saturating_sub(2));
    while ring.len() > 3 {
        let n = ring.len();
        let mut best: Option<(usize, f64)> = None;
        for k in 0..n {
            let a = ring[(k + n - 1) % n];
            let b = ring[k];
            let c = ring[(k + 1) % n];
            let ear = 0.5 * orient(points[a], points[b], points[c]);
            if ear <= tol || area - ear <= tol {
                continue;
            }
            // prefer fat ears for better conditioned interpolation
            if best.map_or(true, |(_, e)| ear > e) {
                best = Some((k, ear));
            }
        }
        let Some((k, ear)) = best else { break };
        let a = ring[(k + n - 1) % n];
        let b = ring[k];
        let c = ring[(k + 1) % n];
        tris.push([a, b, c]);
        area -= ear;
        ring.remove(k);
    }
    if ring.len() == 3 {
        tris.push([ring[0], ring[1], ring[2]]);
    }
    tris
}

fn plane_value(points: &[Point], values: &[f64], t: [usize; 3], p: Point) -> f64 {
    let l = barycentric(p, points[t[0]], points[t[1]], points[t[2]]);
    l[0] * values[t[0]] + l[1] * values[t[1]] + l[2] * values[t[2]]
}

fn lawson_flips(points: &[Point], values: &[f64], tris: &mut [[usize; 3]]) {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for e in 0..3 {
            edges.entry(key(tri[e], tri[(e + 1) % 3])).or_default().push(t);
        }
    }
    let vscale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let pscale = points.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let mut stack: Vec<(usize, usize)> = edges.keys().copied().collect();
    stack.sort();
    let max_flips = 50 * points.len() * points.len() + 100;
    let mut flips = 0;
    while let Some(e) = stack.pop() {
        let Some(ts) = edges.get(&e) else { continue };
        if ts.len() != 2 {
            continue;
        }
        let (t0, t1) = (ts[0], ts[1]);
        let (a, b) = e;
        let c = *tris[t0].iter().find(|&&v| v != a && v != b).unwrap();
        let d = *tris[t1].iter().find(|&&v| v != a && v != b).unwrap();
        let below = values[d] < plane_value(points, values, tris[t0], points[d]) - 1e-13 * vscale;
        if !below {
            continue;
        }
        // the flipped diagonal must produce two proper triangles
        let (pa, pb, pc, pd) = (points[a], points[b], points[c], points[d]);
        let tol = 1e-13 * pscale * pscale;
        let o1 = orient(pc, pd, pa);
        let o2 = orient(pc, pd, pb);
        if !((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) {
            continue;
        }
        let new0 = if orient(pc, pd, pa) > 0.0 { [c, d, a] } else { [d, c, a] };
        let new1 = if orient(pc, pd, pb) > 0.0 { [c, d, b] } else { [d, c, b] };
        tris[t0] = new0;
        tris[t1] = new1;
        flips += 1;
        edges.remove(&e);
        edges.insert(key(c, d), vec![t0.min(t1), t0.max(t1)]);
        // (c, b) moves from t0 to t1 and (d, a) from t1 to t0
        for (edge, from, to) in [(key(c, b), t0, t1), (key(d, a), t1, t0)] {
            if let Some(ts) = edges.get_mut(&edge) {
                for t in ts.iter_mut().filter(|t| **t == from) {
                    *t = to;
                }
                ts.sort_unstable();
            }
        }
        for &(x, y) in &[(a, c), (c, b), (b, d), (d, a)] {
            stack.push(key(x, y));
        }
        if flips > max_flips {
            break;
        }
    }
}

impl Buckets {
    fn new(points: &[Point], tris: &[[usize; 3]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let n = ((tris.len() as f64).sqrt().ceil() as usize).clamp(1, 64);
        let cell = [((hi[0] - lo[0]) / n as f64).max(1e-300), ((hi[1] - lo[1]) / n as f64).max(1e-300)];
        let mut lists = vec![Vec::new(); n * n];
        for (t, tri) in tris.iter().enumerate() {
            let mut tlo = [f64::INFINITY; 2];
            let mut thi = [f64::NEG_INFINITY; 2];
            for &v in tri {
                for d in 0..2 {
                    tlo[d] = tlo[d].min(points[v][d]);
                    thi[d] = thi[d].max(points[v][d]);
                }
            }
            let i0 = (((tlo[0] - lo[0]) / cell[0]).floor() as isize - 1).clamp(0, n as isize - 1) as usize;
            let i1 = (((thi[0] - lo[0]) / cell[0]).floor() as isize + 1).clamp(0, n as isize - 1) as usize;
            let j0 = (((tlo[1] - lo[1]) / cell[1]).floor() as isize - 1).clamp(0, n as isize - 1) as usize;
            let j1 = (((thi[1] - lo[1]) / cell[1]).floor() as isize + 1).clamp(0, n as isize - 1) as usize;
            for j in j0..=j1 {
                for i in i0..=i1 {
                    lists[j * n + i].push(t);
                }
            }
        }
        Self { lo, cell, n, lists }
    }

    fn candidates(&self, p: Point) -> &[usize] {
        let i = (((p[0] - self.lo[0]) / self.cell[0]).floor() as isize).clamp(0, self.n as isize - 1) as usize;
        let j = (((p[1] - self.lo[1]) / self.cell[1]).floor() as isize).clamp(0, self.n as isize - 1) as usize;
        &self.lists[j * self.n + i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_solver::PlanarDomain;

    /// Brute force: best supporting plane through triples (and pairs, single
    /// points for degenerate configurations) of lifted samples.
    pub(crate) fn triple_oracle(points: &[Point], values: &[f64], p: Point) -> Option<f64> {
        let n = points.len();
        let mut best: Option<f64> = None;
        let feasible = |f: &dyn Fn(Point) -> f64| (0..n).all(|k| f(points[k]) <= values[k] + 1e-10);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (points[i], points[j], points[k]);
                    let det = orient(a, b, c);
                    if det.abs() < 1e-12 {
                        continue;
                    }
                    let l = barycentric(p, a, b, c);
                    if l.iter().any(|&x| x < -1e-12) {
                        continue;
                    }
                    let f = |q: Point| {
                        let m = barycentric(q, a, b, c);
                        m[0] * values[i] + m[1] * values[j] + m[2] * values[k]
                    };
                    if feasible(&f) {
                        let v = f(p);
                        best = Some(best.map_or(v, |b: f64| b.max(v)));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn constant_data_gives_constant_envelope() {
        let d = PlanarDomain::unit_disk();
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], 1.0 / 16.0, 1).unwrap();
        let phi = BoundaryFunction::from_fn_on_grid(d.clone(), &g, 64, |_| Some(0.0)).unwrap();
        let env = convex_envelope(&phi, &g).unwrap();
        for k in 0..g.len() {
            let p = g.point_of(k);
            if d.contains(p) {
                assert_eq!(env.get(k), Some(0.0));
            }
            if d.sdf(p) > 1e-9 {
                assert_eq!(env.get(k), None);
            }
        }
    }

    #[test]
    fn triangle_indicator_envelope() {
        let d = PlanarDomain::unit_disk();
        let tri = [[1.0, 0.0], [-0.5, 0.75f64.sqrt()], [-0.5, -(0.75f64.sqrt())]];
        let phi = BoundaryFunction::indicator(d, &tri, 64).unwrap();
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], 1.0 / 16.0, 1).unwrap();
        let env = convex_envelope(&phi, &g).unwrap();
        for k in 0..g.len() {
            let p = g.point_of(k);
            let inside = geom::in_convex_polygon(&tri, p, 1e-12);
            assert_eq!(env.get(k).is_some(), inside, "node {p:?}");
            if inside {
                assert!(env.get(k).unwrap().abs() < 1e-15);
            }
        }
    }

    /// `x^2` on the circle lifts onto a ruled surface: vertical chords at
    /// fixed `x` lie on it, so the envelope is `x^2`.
    #[test]
    fn many_samples_on_a_circle() {
        let n = 2000;
        let (pts, vals): (Vec<Point>, Vec<f64>) = (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                ([a.cos(), a.sin()], a.cos() * a.cos())
            })
            .unzip();
        let env = Envelope::from_samples(&pts, &vals).unwrap();
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], 1.0 / 32.0, 0).unwrap();
        for k in 0..g.len() {
            let p = g.point_of(k);
            if geom::norm(p) < 0.99 {
                assert!((env.eval(p).unwrap() - p[0] * p[0]).abs() < 2e-3, "{p:?}");
            }
        }
    }

    #[test]
    fn square_corners_match_triple_oracle() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let vals = [0.0, 1.0, 0.0, 1.0];
        let env = Envelope::from_samples(&pts, &vals).unwrap();
        let g = Grid::covering([0.0, 0.0], [1.0, 1.0], 1.0 / 8.0, 0).unwrap();
        for k in 0..g.len() {
            let p = g.point_of(k);
            let want = triple_oracle(&pts, &vals, p).unwrap();
            assert!((env.eval(p).unwrap() - want).abs() < 1e-12, "{p:?}");
        }
        // the lower diagonal joins the two zero corners
        assert!((env.eval([0.5, 0.5]).unwrap()).abs() < 1e-15);
        // frozen value from the oracle: the plane through (0,0,0), (1,0,1), (1,1,0)
        assert!((env.eval([0.75, 0.25]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn collinear_runs_keep_their_lower_hull() {
        let d = PlanarDomain::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let f = |p: Point| (p[0] - 0.5).powi(2) + (p[1] - 0.5).powi(2);
        let phi = BoundaryFunction::from_fn(d, 40, |p| Some(f(p))).unwrap();
        let env = Envelope::of_boundary(&phi).unwrap();
        // on the edges the envelope is the chordal interpolant of the samples
        for s in phi.finite_samples() {
            assert!((env.eval(s.0).unwrap() - s.1).abs() < 1e-12);
        }
        let (pts, vals): (Vec<Point>, Vec<f64>) = phi.finite_samples().unzip();
        for &p in &[[0.5, 0.5], [0.2, 0.7], [0.9, 0.1]] {
            let want = triple_oracle(&pts, &vals, p).unwrap();
            assert!((env.eval(p).unwrap() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_sample_sets() {
        let env = Envelope::from_samples(&[[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]], &[1.0, 1.0, 0.0]).unwrap();
        assert!((env.eval([0.25, 0.25]).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(env.eval([0.5, 0.0]), None);
        let one = Envelope::from_samples(&[[0.3, 0.2]], &[2.0]).unwrap();
        assert_eq!(one.eval([0.3, 0.2]), Some(2.0));
        assert_eq!(one.eval([0.3, 0.3]), None);
        assert!(Envelope::from_samples(&[], &[]).is_err());
    }

    #[test]
    fn all_infinite_is_an_error() {
        let phi = BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 16, |_| None).unwrap();
        assert!(matches!(Envelope::of_boundary(&phi), Err(Error::AllInfinite)));
    }
}
