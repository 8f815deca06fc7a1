//! Comparison and boundary-growth diagnostics for support functions.

use serde::Serialize;

use crate::convex_core::GridFunction;
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::cheng_yau::{cheng_yau, ChengYauOptions};
use crate::ma_solver::dirichlet::solver_grid;
use crate::ma_solver::PlanarDomain;

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub holds: bool,
    /// `min (w_1 - w_2)` over shared nodes.
    pub min_difference: f64,
    pub shared_nodes: usize,
}

/// Compares `w_{inner} >= w_{outer} - 2 tol` on the nodes both solutions share.
pub fn compare_support_functions(w_inner: &GridFunction, w_outer: &GridFunction, tol: f64) -> MonotonicityReport {
    let g1 = w_inner.grid();
    let g2 = w_outer.grid();
    let mut minimum = f64::INFINITY;
    let mut shared = 0;
    for (k, a) in w_inner.finite_nodes() {
        let p = g1.point_of(k);
        if let Some(b) = g2.node_at(p, 1e-9 * g1.h).and_then(|j| w_outer.get(j)) {
            shared += 1;
            minimum = minimum.min(a - b);
        }
    }
    MonotonicityReport { holds: shared > 0 && minimum >= -2.0 * tol, min_difference: minimum, shared_nodes: shared }
}

/// Solves both Cheng-Yau problems at spacing `h` and compares them.
pub fn domain_monotonicity_check(
    inner: &PlanarDomain,
    outer: &PlanarDomain,
    h: f64,
    opts: &ChengYauOptions,
) -> Result<MonotonicityReport> {
    if !inner.is_contained_in(outer, 1e-12 * outer.diameter().max(1.0)) {
        return Err(Error::NotContained);
    }
    let g1 = solver_grid(inner, h)?;
    let g2 = solver_grid(outer, h)?;
    let (w1, _) = cheng_yau(inner, &g1, opts)?;
    let (w2, _) = cheng_yau(outer, &g2, opts)?;
    Ok(compare_support_functions(&w1, &w2, opts.tol))
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub exponent: f64,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    pub normal: Point,
}

/// Least-squares slope of `log(-w)` against `log s` along the inward normal
/// at the boundary point `x0`, over `s` from `4h` to `max_fraction` of the
/// inradius.
pub fn boundary_growth_check(
    domain: &PlanarDomain,
    w: &GridFunction,
    x0: Point,
    max_fraction: f64,
) -> Result<GrowthReport> {
    let h = w.grid().h;
    let normal = domain.inward_normal(x0).ok_or(Error::NotBoundaryPoint(x0[0], x0[1]))?;
    if domain.sdf(x0).abs() > 1e-9 * domain.diameter().max(1.0) {
        return Err(Error::NotBoundaryPoint(x0[0], x0[1]));
    }
    let (_, r) = domain.inscribed_disk();
    let s_max = max_fraction * r;
    let s_min = 4.0 * h;
    let mut ds = Vec::new();
    let mut vs = Vec::new();
    let mut s = s_min;
    while s <= s_max * (1.0 + 1e-12) {
        let p = geom::add(x0, geom::scale(normal, s));
        if let Some(v) = w.interpolate(p) {
            if v < 0.0 {
                ds.push(s);
                vs.push(-v);
            }
        }
        s *= 2f64.sqrt();
    }
    if ds.len() < 4 {
        return Err(Error::InsufficientResolution(format!(
            "{} usable samples between {s_min:.3e} and {s_max:.3e}",
            ds.len()
        )));
    }
    let xs: Vec<f64> = ds.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    Ok(GrowthReport { exponent: fit_slope(&xs, &ys), distances: ds, values: vs, normal })
}

/// Slope of the least-squares line through `(x, y)`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_solver::support::support_ball;

    #[test]
    fn nested_disks() {
        let a = PlanarDomain::disk([0.0, 0.0], 1.0).unwrap();
        let b = PlanarDomain::disk([0.0, 0.0], 1.5).unwrap();
        let r = domain_monotonicity_check(&a, &b, 1.0 / 16.0, &Default::default()).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(matches!(domain_monotonicity_check(&b, &a, 0.1, &Default::default()), Err(Error::NotContained)));
    }

    #[test]
    fn closed_form_disk_growth_is_one_half() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 128.0).unwrap();
        let ball = support_ball(1.0, &[0.0, 0.0], 2).unwrap();
        let w = GridFunction::from_fn(grid, |p| ball.eval(&p).ok());
        let r = boundary_growth_check(&d, &w, [0.0, 1.0], 0.25).unwrap();
        assert!((r.exponent - 0.5).abs() < 0.05, "{}", r.exponent);
    }

    #[test]
    fn slope_fit() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 1.5, 2.0, 2.5];
        assert!((fit_slope(&xs, &ys) - 0.5).abs() < 1e-15);
    }
}
