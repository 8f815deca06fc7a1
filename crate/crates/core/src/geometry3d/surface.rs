use rayon::prelude::*;
use serde::Serialize;

use crate::cagc::TwoStepSolution;
use crate::convex_core::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ma_solver::{ma_operator, Discretization, PlanarDomain, PointFn, SolverOptions, StencilSet};

pub type Vec3 = [f64; 3];
pub type Mat2 = [[f64; 2]; 2];

/// Cells scanned when measuring the distance to the edge of `dom u`.
const DEPTH_REACH: i64 = 8;

/// Affine normal data at one sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineData {
    /// Affine normal `N`, the Legendre map of `w`.
    pub normal: Vec3,
    /// Affine conormal `N* = (x, -1) / w`.
    pub conormal: Vec3,
    /// Affine metric `-D^2 u / w`.
    pub metric: Mat2,
    /// Shape operator `(D^2 u)^{-1} D^2 w`.
    pub shape: Mat2,
    /// `det D^2 w / det D^2 u` from the discrete Monge-Ampere operator.
    pub det_s: f64,
    /// `-(det D^2 u)^{-1/4}`.
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub node: usize,
    pub x: Point,
    /// `(Du, x . Du - u)`.
    pub position: Vec3,
    /// Images of the coordinate vectors under the differential of the map.
    pub tangents: [Vec3; 2],
    /// Distance to the nearest node outside `dom u`, capped at a few cells.
    pub depth: f64,
    pub affine: Option<AffineData>,
}

/// Sampled surface `x -> (Du(x), x . Du(x) - u(x))` with quad connectivity.
#[derive(Clone, Debug)]
pub struct AffineSurface {
    pub grid: Grid,
    pub samples: Vec<SurfaceSample>,
    /// Triangles as sample indices, counter-clockwise in the parameter plane.
    pub faces: Vec<[usize; 3]>,
    /// Sample nodes whose difference Hessian is not positive definite; they
    /// carry a position but no affine data.
    pub indefinite: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl AffineSurface {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_index(&self, node: usize) -> Option<usize> {
        self.index.get(node).copied().flatten()
    }

    pub fn sample_at(&self, node: usize) -> Option<&SurfaceSample> {
        self.sample_index(node).map(|i| &self.samples[i])
    }

    fn neighbour(&self, s: &SurfaceSample, di: i64, dj: i64) -> Option<&SurfaceSample> {
        self.sample_at(self.grid.offset(s.node, di, dj)?)
    }
}

#[derive(Clone, Copy, Debug)]
struct Jet {
    value: f64,
    grad: Point,
    hess: Mat2,
    centered: bool,
}

/// First and second derivative along the unit direction of `d`, centred when
/// both neighbours are finite and one-sided otherwise.
fn directional(u: &GridFunction, k: usize, d: [i64; 2]) -> Option<(f64, f64, bool)> {
    let g = u.grid();
    let c = u.get(k)?;
    let len = ((d[0] * d[0] + d[1] * d[1]) as f64).sqrt() * g.h;
    let at = |s: i64| g.offset(k, s * d[0], s * d[1]).and_then(|n| u.get(n));
    match (at(1), at(-1)) {
        (Some(f), Some(b)) => Some(((f - b) / (2.0 * len), (f + b - 2.0 * c) / (len * len), true)),
        (Some(f), None) => {
            let f2 = at(2)?;
            Some(((-3.0 * c + 4.0 * f - f2) / (2.0 * len), (c - 2.0 * f + f2) / (len * len), false))
        }
        (None, Some(b)) => {
            let b2 = at(-2)?;
            Some(((3.0 * c - 4.0 * b + b2) / (2.0 * len), (c - 2.0 * b + b2) / (len * len), false))
        }
        (None, None) => None,
    }
}

fn jet(u: &GridFunction, k: usize) -> Option<Jet> {
    let (ux, uxx, cx) = directional(u, k, [1, 0])?;
    let (uy, uyy, cy) = directional(u, k, [0, 1])?;
    let (_, dp, cp) = directional(u, k, [1, 1])?;
    let (_, dm, cm) = directional(u, k, [1, -1])?;
    let uxy = 0.5 * (dp - dm);
    Some(Jet { value: u.get(k)?, grad: [ux, uy], hess: [[uxx, uxy], [uxy, uyy]], centered: cx && cy && cp && cm })
}

fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut r = [[0.0; 2]; 2];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

fn inv2(m: &Mat2) -> Mat2 {
    let d = det2(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

pub(crate) fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

fn legendre_point(x: Point, value: f64, grad: Point) -> Vec3 {
    [grad[0], grad[1], x[0] * grad[0] + x[1] * grad[1] - value]
}

fn depths(u: &GridFunction) -> Vec<f64> {
    let g = u.grid();
    let cap = (DEPTH_REACH + 1) as f64 * g.h;
    (0..g.len())
        .into_par_iter()
        .map(|k| {
            if !u.is_finite_at(k) {
                return 0.0;
            }
            let mut best = cap;
            for dj in -DEPTH_REACH..=DEPTH_REACH {
                for di in -DEPTH_REACH..=DEPTH_REACH {
                    let outside = match g.offset(k, di, dj) {
                        Some(n) => !u.is_finite_at(n),
                        None => true,
                    };
                    if outside {
                        best = best.min(((di * di + dj * dj) as f64).sqrt() * g.h);
                    }
                }
            }
            best
        })
        .collect()
}

/// Legendre map of `u` at every finite node where a full set of difference
/// quotients exists. A node whose difference Hessian is not positive
/// definite is reported when its wide-stencil Monge-Ampere value vanishes
/// and kept without affine data otherwise.
pub fn legendre_map_surface(u: &GridFunction) -> Result<AffineSurface> {
    if u.count_finite() == 0 {
        return Err(Error::AllInfinite);
    }
    let grid = *u.grid();
    let depth = depths(u);
    let nodes: Vec<usize> = u.finite_nodes().map(|(k, _)| k).collect();
    let jets: Vec<Option<(usize, Jet)>> = nodes.par_iter().map(|&k| jet(u, k).map(|j| (k, j))).collect();
    let mut degenerate = Vec::new();
    let mut indefinite = Vec::new();
    let mut samples = Vec::new();
    let mut index = vec![None; grid.len()];
    for (k, j) in jets.into_iter().flatten() {
        let h = &j.hess;
        if !(h[0][0] > 0.0 && det2(h) > 0.0) {
            match ma_operator(u, k) {
                Ok(m) if j.centered && m <= 0.0 => degenerate.push(k),
                _ => indefinite.push(k),
            }
        }
        let x = grid.point_of(k);
        let tangents = [0, 1].map(|c| {
            let v = [h[0][c], h[1][c]];
            [v[0], v[1], x[0] * v[0] + x[1] * v[1]]
        });
        index[k] = Some(samples.len());
        samples.push(SurfaceSample {
            node: k,
            x,
            position: legendre_point(x, j.value, j.grad),
            tangents,
            depth: depth[k],
            affine: None,
        });
    }
    if !degenerate.is_empty() {
        return Err(Error::DegenerateHessian { nodes: degenerate });
    }
    let mut surface = AffineSurface { grid, samples, faces: Vec::new(), indefinite, index };
    surface.faces = quad_faces(&surface);
    Ok(surface)
}

/// Splits each quad of four samples along its shorter diagonal in space.
fn quad_faces(s: &AffineSurface) -> Vec<[usize; 3]> {
    let g = s.grid;
    let mut faces = Vec::new();
    for j in 0..g.ny.saturating_sub(1) {
        for i in 0..g.nx.saturating_sub(1) {
            let ids =
                [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)].map(|k| s.sample_index(k));
            let [Some(a), Some(b), Some(c), Some(d)] = ids else { continue };
            let p = |i: usize| s.samples[i].position;
            let dist = |i: usize, j: usize| norm3([p(i)[0] - p(j)[0], p(i)[1] - p(j)[1], p(i)[2] - p(j)[2]]);
            if dist(a, c) <= dist(b, d) {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, b, d]);
                faces.push([b, c, d]);
            }
        }
    }
    faces
}

/// Discrete determinant used for `det D^2 u` and `det D^2 w`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Determinant {
    /// Wide-stencil Monge-Ampere operator, falling back to the difference
    /// Hessian where the stencil leaves the domain of the function.
    #[default]
    WideStencil,
    /// Determinant of the difference Hessian, for smooth sampled data.
    Hessian,
}

/// Fills the affine normal, conormal, metric and shape operator with
/// `w = -(det D^2 u)^{-1/4}`.
pub fn affine_invariants(u: &GridFunction) -> Result<AffineSurface> {
    affine_invariants_with(u, Determinant::WideStencil)
}

pub fn affine_invariants_with(u: &GridFunction, rule: Determinant) -> Result<AffineSurface> {
    let det_u = |k: usize| match rule {
        Determinant::WideStencil => ma_operator(u, k).ok().or_else(|| jet(u, k).map(|j| det2(&j.hess))),
        Determinant::Hessian => jet(u, k).map(|j| det2(&j.hess)),
    };
    fill_invariants(u, rule, det_u)
}

/// As [`affine_invariants`] for a Dirichlet solution on `domain`, with
/// `det D^2 u` from the solver discretization, whose arms end on the
/// boundary where `u` takes the values `boundary`.
pub fn affine_invariants_on(u: &GridFunction, domain: &PlanarDomain, boundary: PointFn) -> Result<AffineSurface> {
    let disc = Discretization::new(domain, *u.grid(), StencilSet::standard(), SolverOptions::default().boundary_eps);
    let values = disc.unknowns_from(u, |_| f64::NAN);
    let known = disc.known_values(boundary);
    let mut slot = vec![None; u.grid().len()];
    for (i, &k) in disc.unknown_nodes().iter().enumerate() {
        slot[k] = Some(i);
    }
    let det_u = |k: usize| {
        let i = slot[k]?;
        let m = disc.ma_value(i, &values, &known);
        m.is_finite().then_some(m)
    };
    fill_invariants(u, Determinant::WideStencil, det_u)
}

/// [`affine_invariants_on`] for a two-step solution on its hull.
pub fn solution_invariants(sol: &TwoStepSolution) -> Result<AffineSurface> {
    affine_invariants_on(&sol.u, &sol.hull, &|p| sol.envelope_value(p))
}

fn fill_invariants(
    u: &GridFunction,
    rule: Determinant,
    det_u: impl Fn(usize) -> Option<f64> + Sync,
) -> Result<AffineSurface> {
    let mut surface = legendre_map_surface(u)?;
    let grid = surface.grid;
    let det_w = |w: &GridFunction, k: usize, j: &Jet| match rule {
        Determinant::WideStencil => ma_operator(w, k).unwrap_or_else(|_| det2(&j.hess)),
        Determinant::Hessian => det2(&j.hess),
    };
    let nodes: Vec<usize> = u.finite_nodes().map(|(k, _)| k).collect();
    let dets: Vec<Option<f64>> = nodes.par_iter().map(|&k| det_u(k)).collect();
    let mut indefinite = vec![false; grid.len()];
    for &k in &surface.indefinite {
        indefinite[k] = true;
    }
    let mut did_u = vec![f64::NAN; grid.len()];
    let mut degenerate = Vec::new();
    let mut w_values = vec![None; grid.len()];
    for (&k, m) in nodes.iter().zip(dets) {
        let Some(m) = m else { continue };
        if !(m > 0.0 && m.is_finite()) {
            if surface.sample_index(k).is_some() && !indefinite[k] {
                degenerate.push(k);
            }
            continue;
        }
        did_u[k] = m;
        w_values[k] = Some(-m.powf(-0.25));
    }
    if !degenerate.is_empty() {
        return Err(Error::DegenerateHessian { nodes: degenerate });
    }
    let w = GridFunction::from_options(grid, w_values)?;
    let mut negative = Vec::new();
    let filled: Vec<Option<AffineData>> = surface
        .samples
        .par_iter()
        .map(|s| {
            let hu = jet(u, s.node).expect("sample has a jet").hess;
            if !(hu[0][0] > 0.0 && det2(&hu) > 0.0) {
                return None;
            }
            let jw = jet(&w, s.node)?;
            let wv = jw.value;
            let metric = [[-hu[0][0] / wv, -hu[0][1] / wv], [-hu[1][0] / wv, -hu[1][1] / wv]];
            Some(AffineData {
                normal: legendre_point(s.x, wv, jw.grad),
                conormal: [s.x[0] / wv, s.x[1] / wv, -1.0 / wv],
                metric,
                shape: mul2(&inv2(&hu), &jw.hess),
                det_s: det_w(&w, s.node, &jw) / did_u[s.node],
                w: wv,
            })
        })
        .collect();
    for (s, a) in surface.samples.iter_mut().zip(filled) {
        if let Some(a) = &a {
            if !(a.metric[0][0] > 0.0 && det2(&a.metric) > 0.0) {
                negative.push(s.node);
            }
        }
        s.affine = a;
    }
    if !negative.is_empty() {
        return Err(Error::NegativeMetric { nodes: negative });
    }
    Ok(surface)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CagcReport {
    pub pass: bool,
    pub k: f64,
    /// `max |det S - k| / k` over the checked samples.
    pub max_deviation: f64,
    pub checked: usize,
    pub worst_node: Option<usize>,
}

/// `|det S - k| / k <= rtol` at every sample more than `4h` inside `dom u`.
pub fn cagc_check(surface: &AffineSurface, k: f64, rtol: f64) -> CagcReport {
    let min_depth = 5.0 * surface.grid.h;
    let mut max_deviation = 0.0f64;
    let mut worst_node = None;
    let mut checked = 0;
    for s in &surface.samples {
        let Some(a) = &s.affine else { continue };
        if s.depth <= min_depth {
            continue;
        }
        checked += 1;
        let d = (a.det_s - k).abs() / k;
        if !(d <= max_deviation) {
            max_deviation = d;
            worst_node = Some(s.node);
        }
    }
    CagcReport { pass: checked > 0 && max_deviation <= rtol, k, max_deviation, checked, worst_node }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConormalReport {
    pub checked: usize,
    pub satisfied: usize,
    pub fraction: f64,
    /// `max |N* . N - 1|`.
    pub max_pairing_error: f64,
    /// `max |N* . T| / (|N*| |T|)` over both tangents.
    pub max_tangency: f64,
}

/// Conormal identities at samples more than `2h` inside `dom u`.
pub fn conormal_check(surface: &AffineSurface, tol: f64) -> ConormalReport {
    let min_depth = 3.0 * surface.grid.h;
    let (mut checked, mut satisfied) = (0, 0);
    let (mut pairing, mut tangency) = (0.0f64, 0.0f64);
    for s in &surface.samples {
        let Some(a) = &s.affine else { continue };
        if s.depth <= min_depth {
            continue;
        }
        checked += 1;
        let p = (dot3(a.conormal, a.normal) - 1.0).abs();
        let t =
            s.tangents.iter().map(|t| dot3(a.conormal, *t).abs() / (norm3(a.conormal) * norm3(*t))).fold(0.0, f64::max);
        pairing = pairing.max(p);
        tangency = tangency.max(t);
        if p <= tol && t <= tol {
            satisfied += 1;
        }
    }
    let fraction = if checked == 0 { 0.0 } else { satisfied as f64 / checked as f64 };
    ConormalReport { checked, satisfied, fraction, max_pairing_error: pairing, max_tangency: tangency }
}

/// Least-squares fit `N = mu (f - center)` of the affine normal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineSphereFit {
    pub center: Vec3,
    pub mu: f64,
    /// Surface scale recovered from `mu = lambda^{-3/2}`.
    pub lambda_normal: f64,
    /// Surface scale recovered from `det S = mu^2`.
    pub lambda_shape: f64,
    pub det_s_mean: f64,
    /// `max |det S - mean| / mean`.
    pub det_s_spread: f64,
    /// `max |N - mu (f - center)| / max |N|`.
    pub residual: f64,
    pub samples: usize,
}

pub fn affine_sphere_fit(surface: &AffineSurface, min_depth: f64) -> Option<AffineSphereFit> {
    let pts: Vec<(Vec3, Vec3, f64)> = surface
        .samples
        .iter()
        .filter(|s| s.depth > min_depth)
        .filter_map(|s| s.affine.as_ref().map(|a| (s.position, a.normal, a.det_s)))
        .collect();
    if pts.len() < 4 {
        return None;
    }
    let n = pts.len() as f64;
    let mut pm = [0.0; 3];
    let mut nm = [0.0; 3];
    for (p, q, _) in &pts {
        for c in 0..3 {
            pm[c] += p[c] / n;
            nm[c] += q[c] / n;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (p, q, _) in &pts {
        for c in 0..3 {
            num += (p[c] - pm[c]) * (q[c] - nm[c]);
            den += (p[c] - pm[c]) * (p[c] - pm[c]);
        }
    }
    if !(den > 0.0) {
        return None;
    }
    let mu = num / den;
    let center = [0, 1, 2].map(|c| pm[c] - nm[c] / mu);
    let mut res = 0.0f64;
    let mut nmax = 0.0f64;
    for (p, q, _) in &pts {
        let r = [0, 1, 2].map(|c| q[c] - mu * (p[c] - center[c]));
        res = res.max(norm3(r));
        nmax = nmax.max(norm3(*q));
    }
    let det_s_mean = pts.iter().map(|t| t.2).sum::<f64>() / n;
    let det_s_spread = pts.iter().map(|t| (t.2 - det_s_mean).abs() / det_s_mean).fold(0.0, f64::max);
    Some(AffineSphereFit {
        center,
        mu,
        lambda_normal: mu.powf(-2.0 / 3.0),
        lambda_shape: det_s_mean.powf(-1.0 / 3.0),
        det_s_mean,
        det_s_spread,
        residual: res / nmax,
        samples: pts.len(),
    })
}

fn lorentz(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// Gaussian curvature in `R^{2,1}` from the first and second fundamental
/// forms of the sampled positions, at samples whose eight neighbours are
/// samples too.
pub fn minkowski_curvature(surface: &AffineSurface) -> Vec<Option<f64>> {
    let h = surface.grid.h;
    surface
        .samples
        .iter()
        .map(|s| {
            let p = |di, dj| surface.neighbour(s, di, dj).map(|n| n.position);
            let c = s.position;
            let (e, w, n, so) = (p(1, 0)?, p(-1, 0)?, p(0, 1)?, p(0, -1)?);
            let (ne, nw, se, sw) = (p(1, 1)?, p(-1, 1)?, p(1, -1)?, p(-1, -1)?);
            let d1 = [0, 1, 2].map(|i| (e[i] - w[i]) / (2.0 * h));
            let d2 = [0, 1, 2].map(|i| (n[i] - so[i]) / (2.0 * h));
            let d11 = [0, 1, 2].map(|i| (e[i] + w[i] - 2.0 * c[i]) / (h * h));
            let d22 = [0, 1, 2].map(|i| (n[i] + so[i] - 2.0 * c[i]) / (h * h));
            let d12 = [0, 1, 2].map(|i| (ne[i] - nw[i] - se[i] + sw[i]) / (4.0 * h * h));
            let cross = [d1[1] * d2[2] - d1[2] * d2[1], d1[2] * d2[0] - d1[0] * d2[2], d1[0] * d2[1] - d1[1] * d2[0]];
            let normal = [cross[0], cross[1], -cross[2]];
            let nn = lorentz(normal, normal);
            if !(nn < 0.0) {
                return None;
            }
            let normal = normal.map(|v| v / (-nn).sqrt());
            let first = [[lorentz(d1, d1), lorentz(d1, d2)], [lorentz(d1, d2), lorentz(d2, d2)]];
            let second = [[lorentz(d11, normal), lorentz(d12, normal)], [lorentz(d12, normal), lorentz(d22, normal)]];
            Some(det2(&second) / det2(&first))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_solver::{cheng_yau, solver_grid, support_simplex, LAMBDA_2};

    fn hemisphere(h: f64) -> GridFunction {
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], h, 1).unwrap();
        GridFunction::from_fn(g, |p| {
            let r2 = p[0] * p[0] + p[1] * p[1];
            (r2 < 1.0).then(|| -(1.0 - r2).sqrt())
        })
    }

    fn inner(x: Point, r: f64) -> bool {
        x[0] * x[0] + x[1] * x[1] < r * r
    }

    fn paraboloid(h: f64) -> GridFunction {
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], h, 0).unwrap();
        GridFunction::from_fn(g, |p| Some(0.5 * (p[0] * p[0] + p[1] * p[1])))
    }

    #[test]
    fn hemisphere_maps_onto_the_hyperboloid() {
        for h in [1.0 / 32.0, 1.0 / 64.0] {
            let s = legendre_map_surface(&hemisphere(h)).unwrap();
            let mut worst = 0.0f64;
            for p in s.samples.iter().filter(|p| inner(p.x, 0.75)) {
                let q = p.position;
                worst = worst.max((q[2] - (1.0 + q[0] * q[0] + q[1] * q[1]).sqrt()).abs());
            }
            assert!(worst < 20.0 * h * h, "h = {h}: {worst}");
        }
    }

    #[test]
    fn paraboloid_is_self_conjugate_and_improper() {
        let u = paraboloid(1.0 / 16.0);
        let s = affine_invariants(&u).unwrap();
        for p in &s.samples {
            let q = p.position;
            assert!((q[2] - 0.5 * (q[0] * q[0] + q[1] * q[1])).abs() < 1e-12);
            let a = p.affine.as_ref().unwrap();
            assert!((a.w + 1.0).abs() < 1e-9);
            assert!(a.det_s.abs() < 1e-9);
            assert!(a.shape.iter().flatten().all(|v| v.abs() < 1e-6));
        }
        assert!(!cagc_check(&s, 1.0, 0.05).pass);
    }

    #[test]
    fn hemisphere_has_identity_shape_operator() {
        let s = affine_invariants_with(&hemisphere(1.0 / 64.0), Determinant::Hessian).unwrap();
        let mut worst = 0.0f64;
        for p in s.samples.iter().filter(|p| inner(p.x, 0.75)) {
            let a = p.affine.as_ref().unwrap();
            let sh = a.shape;
            worst = worst
                .max((sh[0][0] - 1.0).abs())
                .max((sh[1][1] - 1.0).abs())
                .max(sh[0][1].abs())
                .max((a.det_s - 1.0).abs());
            for c in 0..3 {
                worst = worst.max((a.normal[c] - p.position[c]).abs() / norm3(p.position));
            }
        }
        assert!(worst < 0.02, "{worst}");
        let fit = affine_sphere_fit(&s, 8.0 / 64.0).unwrap();
        assert!((fit.mu - 1.0).abs() < 0.01 && norm3(fit.center) < 0.01, "{fit:?}");
    }

    #[test]
    fn solver_output_reproduces_its_own_support_function() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 32.0).unwrap();
        let (w, _) = cheng_yau(&d, &grid, &Default::default()).unwrap();
        let s = affine_invariants_on(&w, &d, &|_| 0.0).unwrap();
        let r = cagc_check(&s, 1.0, 1e-6);
        assert!(r.pass && r.checked > 1000, "{r:?}");
        let fit = affine_sphere_fit(&s, 5.0 / 32.0).unwrap();
        assert!((fit.mu - 1.0).abs() < 1e-6 && fit.residual < 1e-6, "{fit:?}");
    }

    #[test]
    fn conormal_identities_hold_to_rounding() {
        let s = affine_invariants(&hemisphere(1.0 / 32.0)).unwrap();
        let r = conormal_check(&s, 1e-6);
        assert!(r.checked > 1000 && r.satisfied == r.checked, "{r:?}");
        assert!(r.max_pairing_error < 1e-12 && r.max_tangency < 1e-12, "{r:?}");
    }

    #[test]
    fn simplex_surface_has_constant_vertex_product() {
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let simplex = support_simplex(&verts.map(|v| v.to_vec()), 2, LAMBDA_2).unwrap();
        let h = 1.0 / 128.0;
        let g = Grid::covering([0.0, 0.0], [1.0, 1.0], h, 0).unwrap();
        let u = GridFunction::from_fn(g, |p| {
            (p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0).then(|| simplex.eval(&p).unwrap())
        });
        let s = legendre_map_surface(&u).unwrap();
        // supporting planes evaluated at the vertices are linear in the position
        let products: Vec<f64> = s
            .samples
            .iter()
            .filter(|p| p.x[0] > 0.1 && p.x[1] > 0.1 && p.x[0] + p.x[1] < 0.9)
            .map(|p| {
                let q = p.position;
                verts.iter().map(|v| -q[2] + v[0] * q[0] + v[1] * q[1]).product()
            })
            .collect();
        assert!(products.len() > 500);
        let mean = products.iter().sum::<f64>() / products.len() as f64;
        assert!(mean < 0.0);
        let spread = products.iter().map(|p| (p - mean).abs() / mean.abs()).fold(0.0, f64::max);
        assert!(spread < 0.02, "{spread}");
    }

    #[test]
    fn hyperboloid_mesh_has_unit_minkowski_curvature() {
        let s = legendre_map_surface(&hemisphere(1.0 / 64.0)).unwrap();
        let k = minkowski_curvature(&s);
        let mut worst = 0.0f64;
        let mut count = 0;
        for (p, k) in s.samples.iter().zip(&k) {
            if inner(p.x, 0.75) {
                worst = worst.max((k.unwrap() - 1.0).abs());
                count += 1;
            }
        }
        assert!(count > 1000 && worst < 0.02, "{worst}");
    }

    #[test]
    fn degenerate_hessians_are_listed() {
        let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], 0.125, 0).unwrap();
        let u = GridFunction::from_fn(g, |p| Some(p[0] * p[0]));
        let wide = (0..g.len()).filter(|&k| ma_operator(&u, k).is_ok()).count();
        match legendre_map_surface(&u) {
            Err(Error::DegenerateHessian { nodes }) => {
                assert!(wide > 0);
                assert_eq!(nodes.len(), wide);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn faces_take_the_shorter_diagonal() {
        let s = legendre_map_surface(&paraboloid(0.25)).unwrap();
        let g = s.grid;
        let mut quads = 0;
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                let c = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)];
                quads += c.iter().all(|&k| s.sample_index(k).is_some()) as usize;
            }
        }
        assert!(quads > 40);
        assert_eq!(s.faces.len(), 2 * quads);
        for f in &s.faces {
            let [a, b, c] = f.map(|i| s.samples[i].x);
            let area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            assert!(area > 0.0);
        }
    }
}
