//! Small planar geometry kit shared by the domain, envelope and surface code.

pub type Point = [f64; 2];

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

#[inline]
pub fn perp(a: Point) -> Point {
    [-a[1], a[0]]
}

pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Counter-clockwise convex hull by the monotone chain.
///
/// Points are processed in lexicographic order and collinear points are
/// dropped, so the output starts at the lexicographically smallest point.
/// Degenerate inputs give one or two points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(lex_cmp);
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs())).max(1e-300);
    let eps = 1e-14 * scale * scale;
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        // all collinear: keep the extreme pair
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Signed area of a polygon (positive when counter-clockwise).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn polygon_centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let a = polygon_area(poly);
    if n < 3 || a.abs() < 1e-300 {
        let s = poly.iter().fold([0.0, 0.0], |acc, p| add(acc, *p));
        return scale(s, 1.0 / n.max(1) as f64);
    }
    let mut c = [0.0, 0.0];
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = cross(p, q);
        c[0] += (p[0] + q[0]) * w;
        c[1] += (p[1] + q[1]) * w;
    }
    scale(c, 1.0 / (6.0 * a))
}

/// Keeps the part of a convex polygon where `normal . x <= offset`.
pub fn clip_halfplane(poly: &[Point], normal: Point, offset: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    if n == 0 {
        return out;
    }
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let sp = dot(normal, p) - offset;
        let sq = dot(normal, q) - offset;
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push(lerp(p, q, t));
        }
    }
    dedup_cyclic(&mut out, 1e-15);
    out
}

pub(crate) fn dedup_cyclic(poly: &mut Vec<Point>, tol: f64) {
    if poly.is_empty() {
        return;
    }
    let scale = poly.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = tol * scale;
    let mut out: Vec<Point> = Vec::with_capacity(poly.len());
    for &p in poly.iter() {
        if out.last().map_or(true, |&q| dist(p, q) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && dist(out[0], out[out.len() - 1]) <= tol {
        out.pop();
    }
    *poly = out;
}

/// Intersection of half-planes `n_k . x <= b_k`, clipped to a box.
pub fn halfplane_intersection(planes: &[(Point, f64)], lo: Point, hi: Point) -> Vec<Point> {
    let mut poly = vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
    for &(n, b) in planes {
        poly = clip_halfplane(&poly, n, b);
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Closed containment test for a counter-clockwise convex polygon.
pub fn in_convex_polygon(poly: &[Point], p: Point, eps: f64) -> bool {
    let n = poly.len();
    match n {
        0 => false,
        1 => dist(poly[0], p) <= eps,
        2 => point_segment_distance(p, poly[0], poly[1]) <= eps,
        _ => (0..n).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            let e = sub(b, a);
            let l = norm(e);
            l == 0.0 || cross(e, sub(p, a)) / l >= -eps
        }),
    }
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let e = sub(b, a);
    let ll = dot(e, e);
    if ll == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), e) / ll).clamp(0.0, 1.0);
    dist(p, lerp(a, b, t))
}

/// Barycentric coordinates of `p` in the triangle `abc`.
pub fn barycentric(p: Point, a: Point, b: Point, c: Point) -> [f64; 3] {
    let d = orient(a, b, c);
    let l0 = orient(p, b, c) / d;
    let l1 = orient(a, p, c) / d;
    [l0, l1, 1.0 - l0 - l1]
}
