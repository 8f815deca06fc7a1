use serde::Serialize;

use crate::cagc::two_step::{hull_center, TwoStepSolution};
use crate::convex_core::Grid;
use crate::convex_core::{
    inner_derivative_slope, BoundaryFunction, Classification, Envelope, GridFunction, InnerDerivativeOptions,
    InnerDerivativeReport,
};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::{boundary_growth_check, cheng_yau, envelope_at, ChengYauOptions, GrowthReport, PlanarDomain};

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    /// Largest violation of either bound.
    pub max_violation: f64,
    /// `max (env phi + sqrt(c) w_V - u)^+`.
    pub lower_violation: f64,
    /// `max (u - env phi)^+`.
    pub upper_violation: f64,
    pub nodes: usize,
}

/// `w_V` for the hull `V` on the solution grid.
pub fn hull_support(sol: &TwoStepSolution, opts: &ChengYauOptions) -> Result<GridFunction> {
    if sol.full_domain() {
        return Ok(sol.w_omega.clone());
    }
    Ok(cheng_yau(&sol.hull, sol.u.grid(), opts)?.0)
}

/// Checks `env phi + sqrt(c) w_V <= u <= env phi` node-wise.
pub fn sandwich_check(sol: &TwoStepSolution, w_hull: &GridFunction) -> SandwichReport {
    let grid = sol.u.grid();
    let sc = sol.c.sqrt();
    let (mut lower, mut upper, mut nodes) = (0.0f64, 0.0f64, 0);
    for (k, u) in sol.u.finite_nodes() {
        let e = sol.envelope_value(grid.point_of(k));
        let w = w_hull.get(k).unwrap_or(0.0).min(0.0);
        lower = lower.max(e + sc * w - u);
        upper = upper.max(u - e);
        nodes += 1;
    }
    SandwichReport { max_violation: lower.max(upper), lower_violation: lower, upper_violation: upper, nodes }
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticReport {
    /// `max (env phi - u)` over nodes within `2h` of the edge of `dom u`.
    pub gap: f64,
    pub collar_nodes: usize,
}

/// Boundary gap between `env phi` and `u`.
pub fn asymptotic_check(u: &GridFunction, phi: &BoundaryFunction) -> Result<AsymptoticReport> {
    let env = Envelope::of_boundary(phi)?;
    let center = hull_center(&env);
    let grid = u.grid();
    let mut gap = f64::NEG_INFINITY;
    let mut count = 0;
    for (k, v) in u.finite_nodes() {
        if !near_edge(u, k) {
            continue;
        }
        gap = gap.max(envelope_at(&env, center, grid.point_of(k)) - v);
        count += 1;
    }
    if count == 0 {
        return Err(Error::AllInfinite);
    }
    Ok(AsymptoticReport { gap, collar_nodes: count })
}

/// Whether a node lies within `2h` of a node outside `dom u` or the grid edge.
fn near_edge(u: &GridFunction, k: usize) -> bool {
    let g = u.grid();
    for di in -2i64..=2 {
        for dj in -2i64..=2 {
            if di * di + dj * dj > 4 {
                continue;
            }
            match g.offset(k, di, dj) {
                Some(n) if u.is_finite_at(n) => {}
                _ => return true,
            }
        }
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupReport {
    pub x0: Point,
    pub x1: Point,
    pub classification: Classification,
    pub inner: InnerDerivativeReport,
    /// Growth of `-w_Omega` at `x0` when `x0` lies on the boundary of the domain.
    pub growth: Option<GrowthReport>,
    /// Power of the distance in `c w_Omega^{-4}` at `x0`; `-2` and below force
    /// infinite inner derivatives.
    pub rhs_exponent: f64,
}

/// Inner-derivative classification of a family of solutions on refined grids
/// at a boundary point `x0` of the hull of `dom phi`.
pub fn blowup_diagnostic(levels: &[TwoStepSolution], x0: Point, opts: &InnerDerivativeOptions) -> Result<BlowupReport> {
    if levels.len() < 3 {
        return Err(Error::InvalidInput("at least three refinement levels are required".into()));
    }
    let finest = levels.iter().min_by(|a, b| a.u.grid().h.total_cmp(&b.u.grid().h)).unwrap();
    let hull = &finest.hull;
    let omega = finest.phi.domain();
    let tol = 1e-9 * omega.diameter().max(1.0);
    if hull.sdf(x0).abs() > tol {
        return Err(Error::NotBoundaryPoint(x0[0], x0[1]));
    }
    let coarsest = levels.iter().max_by(|a, b| a.u.grid().h.total_cmp(&b.u.grid().h)).unwrap();
    let x1 = probe_target(hull, coarsest.u.grid(), x0);
    let u0 = finest.envelope_value(x0);
    let fields: Vec<GridFunction> = levels.iter().map(|s| s.u.clone()).collect();
    let inner = inner_derivative_slope(&fields, x0, x1, Some(u0), opts)?;
    let growth =
        if omega.sdf(x0).abs() <= tol { boundary_growth_check(omega, &finest.w_omega, x0, 0.5).ok() } else { None };
    let rhs_exponent = growth.as_ref().map_or(0.0, |g| -4.0 * g.exponent);
    Ok(BlowupReport { x0, x1, classification: inner.classification, inner, growth, rhs_exponent })
}

/// Far end of the probe segment from `x0` toward the incenter of the hull.
/// When `x0` is a node the segment follows the nearest short lattice
/// direction with a dyadic length, so its dyadic subdivisions stay on nodes.
fn probe_target(hull: &PlanarDomain, grid: &Grid, x0: Point) -> Point {
    let (center, _) = hull.inscribed_disk();
    if grid.node_at(x0, 1e-9 * grid.h).is_none() {
        return center;
    }
    let to_center = geom::sub(center, x0);
    let len = geom::norm(to_center);
    let mut best = ([0i64, 0i64], f64::NEG_INFINITY);
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            if (a, b) == (0, 0) || gcd(a.unsigned_abs(), b.unsigned_abs()) != 1 {
                continue;
            }
            let v = [a as f64, b as f64];
            let cos = geom::dot(v, to_center) / (geom::norm(v) * len);
            if cos > best.1 {
                best = ([a, b], cos);
            }
        }
    }
    let v = [best.0[0] as f64 * grid.h, best.0[1] as f64 * grid.h];
    let mut m = 2f64.powi((len / geom::norm(v)).log2().floor() as i32);
    while m >= 1.0 {
        let x1 = geom::add(x0, geom::scale(v, m));
        if hull.sdf(x1) < -0.25 * len {
            return x1;
        }
        m *= 0.5;
    }
    center
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cagc::{fixtures, two_step_solve, TwoStepProblem};

    fn disk_solution(h: f64) -> TwoStepSolution {
        let phi = BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 256, |_| Some(0.0)).unwrap();
        two_step_solve(&TwoStepProblem::new(phi, 1.0, h).unwrap(), &Default::default()).unwrap()
    }

    #[test]
    fn zero_data_sandwich_is_tight() {
        let sol = disk_solution(1.0 / 16.0);
        let w = hull_support(&sol, &Default::default()).unwrap();
        let r = sandwich_check(&sol, &w);
        assert!(r.max_violation < 1e-8, "{r:?}");
    }

    #[test]
    fn inscribed_triangle_sandwich() {
        let phi = fixtures::inscribed_triangle(256).unwrap();
        let sol = two_step_solve(&TwoStepProblem::new(phi, 1.0, 1.0 / 16.0).unwrap(), &Default::default()).unwrap();
        let w = hull_support(&sol, &Default::default()).unwrap();
        let r = sandwich_check(&sol, &w);
        assert!(r.lower_violation < 1e-8 && r.upper_violation < 5e-3, "{r:?}");
    }

    #[test]
    fn disk_gap_shrinks_under_refinement() {
        let phi = BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 256, |_| Some(0.0)).unwrap();
        let a = asymptotic_check(&disk_solution(1.0 / 16.0).u, &phi).unwrap();
        let b = asymptotic_check(&disk_solution(1.0 / 32.0).u, &phi).unwrap();
        assert!(b.gap < a.gap && b.gap > 0.0, "{a:?} {b:?}");
        // the collar of width 2h reaches |w| ~ sqrt(4h)
        assert!(b.gap < 2.0 * (4.0f64 / 32.0).sqrt());
    }

    #[test]
    fn remark_fixture_keeps_a_gap() {
        let (u, phi) = fixtures::remark_conditions(1.0 / 32.0).unwrap();
        let r = asymptotic_check(&u, &phi).unwrap();
        assert!(r.gap > 0.5, "{r:?}");
    }

    #[test]
    fn interior_points_are_rejected() {
        let sols: Vec<_> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0].iter().map(|&h| disk_solution(h)).collect();
        let e = blowup_diagnostic(&sols, [0.2, 0.1], &Default::default());
        assert!(matches!(e, Err(Error::NotBoundaryPoint(..))));
        assert!(blowup_diagnostic(&sols[..2], [1.0, 0.0], &Default::default()).is_err());
    }

    #[test]
    fn disk_boundary_point_is_infinite() {
        let sols: Vec<_> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0].iter().map(|&h| disk_solution(h)).collect();
        let r = blowup_diagnostic(&sols, [1.0, 0.0], &Default::default()).unwrap();
        assert_eq!(r.classification, Classification::Infinite, "{:?}", r.inner);
        assert!((r.rhs_exponent + 2.0).abs() < 0.3, "{}", r.rhs_exponent);
    }
}
