//! Dirichlet problem `det D^2 u = g` in a convex domain.

use crate::convex_core::{Envelope, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::newton::{self, SolveReport, SolverOptions, Source};
use crate::ma_solver::stencil::{Discretization, StencilSet};
use crate::ma_solver::PlanarDomain;

pub type PointFn<'a> = &'a (dyn Fn(Point) -> f64 + Sync);

/// Grid with spacing `h` covering the domain with one spare layer.
pub fn solver_grid(domain: &PlanarDomain, h: f64) -> Result<Grid> {
    let (lo, hi) = domain.bbox();
    Grid::covering(lo, hi, h, 1)
}

/// Envelope of boundary data sampled along the boundary at spacing about `h / 4`.
pub fn boundary_envelope(domain: &PlanarDomain, boundary: PointFn, h: f64) -> Result<(Envelope, Vec<(Point, f64)>)> {
    let n = ((4.0 * domain.perimeter() / h).ceil() as usize).max(64);
    let samples: Vec<(Point, f64)> = domain.sample_boundary(n).into_iter().map(|p| (p, boundary(p))).collect();
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::InvalidInput("boundary data must be finite".into()));
    }
    let (pts, vals): (Vec<Point>, Vec<f64>) = samples.iter().copied().unzip();
    Ok((Envelope::from_samples(&pts, &vals)?, samples))
}

/// Envelope value at `p`, nudged toward the hull center when `p` falls in a
/// sliver between the sampled polygon and a curved boundary.
pub(crate) fn envelope_at(env: &Envelope, center: Point, p: Point) -> f64 {
    if let Some(v) = env.eval(p) {
        return v;
    }
    let mut eps = 1e-9;
    while eps < 1.0 {
        if let Some(v) = env.eval(geom::lerp(p, center, eps)) {
            return v;
        }
        eps *= 4.0;
    }
    env.eval(center).unwrap_or(0.0)
}

#[derive(Clone, Debug, Default)]
pub struct DirichletOptions<'a> {
    pub solver: SolverOptions,
    /// Starting values; the Perron-type guess is used where absent.
    pub initial: Option<&'a GridFunction>,
    pub stencil: Option<StencilSet>,
}

/// Solves `MA_h(u) = g` with `u = boundary` on the boundary.
pub fn solve_dirichlet(
    domain: &PlanarDomain,
    grid: &Grid,
    rhs: PointFn,
    boundary: PointFn,
    opts: &DirichletOptions,
) -> Result<(GridFunction, SolveReport)> {
    let stencil = opts.stencil.clone().unwrap_or_default();
    let disc = Discretization::new(domain, *grid, stencil, opts.solver.boundary_eps);
    solve_on(domain, &disc, rhs, boundary, opts)
}

pub(crate) fn solve_on(
    domain: &PlanarDomain,
    disc: &Discretization,
    rhs: PointFn,
    boundary: PointFn,
    opts: &DirichletOptions,
) -> Result<(GridFunction, SolveReport)> {
    let grid = disc.grid();
    let nodes = disc.unknown_nodes();
    let g: Vec<f64> = nodes.iter().map(|&k| rhs(grid.point_of(k))).collect();
    if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput("right-hand side must be finite and nonnegative".into()));
    }
    let (env, samples) = boundary_envelope(domain, boundary, grid.h)?;
    let vscale = samples.iter().fold(1.0f64, |m, s| m.max(s.1.abs()));
    for &(p, v) in &samples {
        let e = env.eval(p).unwrap_or(f64::NEG_INFINITY);
        if v - e > 1e-9 * vscale {
            return Err(Error::NonConvexBoundaryData(format!(
                "data {v} exceeds the convex envelope {e} at ({}, {})",
                p[0], p[1]
            )));
        }
    }
    let known = disc.known_values(boundary);
    let (center, radius) = {
        let (lo, hi) = domain.bbox();
        (geom::lerp(lo, hi, 0.5), 0.5 * geom::dist(lo, hi))
    };
    let gmax = g.iter().fold(0.0f64, |m, &v| m.max(v));
    let hull_center = geom::polygon_centroid(env.hull());
    let perron = |p: Point| {
        envelope_at(&env, hull_center, p) - 0.5 * gmax.sqrt() * (radius * radius - geom::dist(p, center).powi(2))
    };
    let coarse = match opts.initial {
        None => coarse_solution(domain, disc, rhs, boundary, opts),
        Some(_) => None,
    };
    let u0 = match opts.initial.or(coarse.as_ref()) {
        Some(init) => disc.unknowns_from(init, perron),
        None => nodes.iter().map(|&k| perron(grid.point_of(k))).collect(),
    };
    let (u, report) = newton::solve(disc, &known, Source::Fixed(&g), u0, &opts.solver)?;
    Ok((disc.to_grid_function(&u, &known), report))
}

fn coarse_solution(
    domain: &PlanarDomain,
    disc: &Discretization,
    rhs: PointFn,
    boundary: PointFn,
    opts: &DirichletOptions,
) -> Option<GridFunction> {
    if opts.solver.coarsen_above == 0 || disc.unknown_count() <= opts.solver.coarsen_above {
        return None;
    }
    let (lo, hi) = domain.bbox();
    let grid = Grid::covering(lo, hi, 2.0 * disc.grid().h, 1).ok()?;
    let coarse = Discretization::new(domain, grid, disc.stencil().clone(), opts.solver.boundary_eps);
    if coarse.unknown_count() < 16 {
        return None;
    }
    solve_on(domain, &coarse, rhs, boundary, opts).ok().map(|r| r.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_core::BoundaryFunction;
    use crate::ma_solver::ma_operator;

    /// Radial solution of `u' u'' / r = 1`, `u(1) = 0`, `u'(0) = 0`:
    /// `u'(r)^2 = r^2` gives `u'(r) = r`, so `u = (r^2 - 1) / 2`. The shooting
    /// integrator below confirms it independently of the closed form.
    fn radial_oracle(r: f64) -> f64 {
        // integrate v = u' from v(eps) with v v' = r, then u' = v
        let n = 20000;
        let dr = 1.0 / n as f64;
        let mut v = 0.0f64;
        let mut us = vec![0.0; n + 1];
        for i in 0..n {
            let ri = i as f64 * dr;
            // (v^2 / 2)' = r exactly integrated over the step
            let e = 0.5 * v * v + 0.5 * ((ri + dr).powi(2) - ri * ri);
            let vn = (2.0 * e).sqrt();
            us[i + 1] = us[i] + 0.5 * (v + vn) * dr;
            v = vn;
        }
        let shift = us[n];
        let k = ((r / dr).round() as usize).min(n);
        us[k] - shift
    }

    #[test]
    fn unit_disk_constant_rhs() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 32.0).unwrap();
        let (u, rep) = solve_dirichlet(&d, &grid, &|_| 1.0, &|_| 0.0, &Default::default()).unwrap();
        assert!(rep.converged && rep.monotone_violations == 0);
        assert!((radial_oracle(0.0) + 0.5).abs() < 1e-6);
        let mut err = 0.0f64;
        for (k, v) in u.finite_nodes() {
            let r = geom::norm(grid.point_of(k));
            err = err.max((v - radial_oracle(r)).abs());
        }
        assert!(err < 2e-2, "{err}");
        assert!(u.is_convex(1e-9));
    }

    #[test]
    fn zero_rhs_reproduces_the_envelope() {
        let d = PlanarDomain::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap();
        let grid = solver_grid(&d, 1.0 / 16.0).unwrap();
        let f = |p: Point| p[0] * p[1];
        let (u, rep) = solve_dirichlet(&d, &grid, &|_| 0.0, &f, &Default::default()).unwrap();
        assert!(rep.converged);
        let phi = BoundaryFunction::from_fn_on_grid(d.clone(), &grid, 256, |p| Some(f(p))).unwrap();
        let env = Envelope::of_boundary(&phi).unwrap();
        for (k, v) in u.finite_nodes() {
            let p = grid.point_of(k);
            assert!((v - env.eval(p).unwrap()).abs() < 0.05, "{p:?}");
        }
    }

    #[test]
    fn nonconvex_data_on_a_flat_side_is_rejected() {
        let d = PlanarDomain::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap();
        let grid = solver_grid(&d, 1.0 / 8.0).unwrap();
        let r = solve_dirichlet(&d, &grid, &|_| 1.0, &|p| -(p[0] * p[0]), &Default::default());
        assert!(matches!(r, Err(Error::NonConvexBoundaryData(_))));
    }

    #[test]
    fn interior_operator_matches_rhs() {
        let d = PlanarDomain::disk([0.1, 0.0], 0.9).unwrap();
        let grid = solver_grid(&d, 1.0 / 32.0).unwrap();
        let g = |p: Point| 1.0 + p[0] * p[0];
        let (u, _) = solve_dirichlet(&d, &grid, &g, &|p| p[1], &Default::default()).unwrap();
        for k in 0..grid.len() {
            if let Ok(m) = ma_operator(&u, k) {
                assert!((m - g(grid.point_of(k))).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn different_initial_guesses_agree() {
        let d = PlanarDomain::disk([0.0, 0.0], 1.0).unwrap();
        let grid = solver_grid(&d, 1.0 / 16.0).unwrap();
        let g = |p: Point| 2.0 + p[0];
        let b = |p: Point| 0.3 * p[0];
        let opts = SolverOptions::default();
        let (u1, _) = solve_dirichlet(&d, &grid, &g, &b, &Default::default()).unwrap();
        let other = GridFunction::from_fn(grid, |p| Some(-3.0 * (1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0)));
        let o = DirichletOptions { initial: Some(&other), ..Default::default() };
        let (u2, _) = solve_dirichlet(&d, &grid, &g, &b, &o).unwrap();
        for k in 0..grid.len() {
            if let (Some(a), Some(b)) = (u1.get(k), u2.get(k)) {
                assert!((a - b).abs() <= 10.0 * opts.tol.max(1e-10));
            }
        }
    }
}
