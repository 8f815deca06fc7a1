//! The Cheng-Yau equation `det D^2 w = (-w)^{-4}`, `w = 0` on the boundary.

use serde::Serialize;

use crate::convex_core::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ma_solver::dirichlet::{solve_on, DirichletOptions};
use crate::ma_solver::newton::{self, SolveReport, SolverOptions, Source};
use crate::ma_solver::stencil::{Discretization, StencilSet};
use crate::ma_solver::PlanarDomain;

/// Fewest unknowns accepted by [`cheng_yau`].
pub const MIN_INTERIOR_NODES: usize = 64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ChengYauMethod {
    /// Newton on the coupled system with the source `(-w)^{-4}`.
    #[default]
    Coupled,
    /// Relaxed iteration of Dirichlet solves with the source frozen at the
    /// previous iterate and capped within `collar` grid spacings of the boundary.
    FixedPoint { relaxation: f64, collar: f64, max_outer: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChengYauOptions {
    pub solver: SolverOptions,
    pub method: ChengYauMethod,
    /// Sup-norm increment at which the fixed-point iteration stops.
    pub tol: f64,
    pub stencil: StencilSet,
}

impl Default for ChengYauOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            method: ChengYauMethod::Coupled,
            tol: 1e-8,
            stencil: StencilSet::standard(),
        }
    }
}

/// `-r^{1/6} sqrt(dist(x, boundary))`, the boundary behaviour of the ball
/// solution of inradius `r`.
fn initial_guess(domain: &PlanarDomain, disc: &Discretization) -> Vec<f64> {
    let (_, r) = domain.inscribed_disk();
    let c = r.powf(1.0 / 6.0);
    disc.unknown_nodes().iter().map(|&k| -c * (-domain.sdf(disc.grid().point_of(k))).max(1e-300).sqrt()).collect()
}

/// Support function `w_Omega` on `grid`.
pub fn cheng_yau(domain: &PlanarDomain, grid: &Grid, opts: &ChengYauOptions) -> Result<(GridFunction, SolveReport)> {
    let disc = Discretization::new(domain, *grid, opts.stencil.clone(), opts.solver.boundary_eps);
    cheng_yau_on(domain, &disc, 1.0, opts)
}

/// Solves `det D^2 w = scale (-w)^{-4}` on an existing discretization.
pub(crate) fn cheng_yau_on(
    domain: &PlanarDomain,
    disc: &Discretization,
    scale: f64,
    opts: &ChengYauOptions,
) -> Result<(GridFunction, SolveReport)> {
    let n = disc.unknown_count();
    if n < MIN_INTERIOR_NODES {
        return Err(Error::DomainTooSmall { interior: n });
    }
    let known = vec![0.0; disc.known_points().len()];
    let mut u0 = initial_guess(domain, disc);
    if let Some(coarse) = coarse_solution(domain, disc, scale, opts) {
        let grid = disc.grid();
        for (i, &k) in disc.unknown_nodes().iter().enumerate() {
            if let Some(v) = coarse.interpolate(grid.point_of(k)) {
                if v < 0.0 {
                    u0[i] = v;
                }
            }
        }
    }
    match opts.method {
        ChengYauMethod::Coupled => {
            let (w, report) = newton::solve(disc, &known, Source::NegativePower { scale }, u0, &opts.solver)?;
            Ok((disc.to_grid_function(&w, &known), report))
        }
        ChengYauMethod::FixedPoint { relaxation, collar, max_outer } => {
            fixed_point(domain, disc, scale, u0, relaxation, collar, max_outer, opts)
        }
    }
}

fn coarse_solution(
    domain: &PlanarDomain,
    disc: &Discretization,
    scale: f64,
    opts: &ChengYauOptions,
) -> Option<GridFunction> {
    if opts.solver.coarsen_above == 0 || disc.unknown_count() <= opts.solver.coarsen_above {
        return None;
    }
    let (lo, hi) = domain.bbox();
    let grid = Grid::covering(lo, hi, 2.0 * disc.grid().h, 1).ok()?;
    let coarse = Discretization::new(domain, grid, disc.stencil().clone(), opts.solver.boundary_eps);
    if coarse.unknown_count() < MIN_INTERIOR_NODES {
        return None;
    }
    cheng_yau_on(domain, &coarse, scale, opts).ok().map(|r| r.0)
}

#[allow(clippy::too_many_arguments)]
fn fixed_point(
    domain: &PlanarDomain,
    disc: &Discretization,
    scale: f64,
    mut w: Vec<f64>,
    relaxation: f64,
    collar: f64,
    max_outer: usize,
    opts: &ChengYauOptions,
) -> Result<(GridFunction, SolveReport)> {
    let grid = *disc.grid();
    let nodes = disc.unknown_nodes().to_vec();
    let mut total = None::<SolveReport>;
    let zero = |_: Point| 0.0;
    for outer in 0..max_outer {
        let wmin = w.iter().fold(0.0f64, |m, &v| m.min(v));
        let cap = -0.5 * wmin;
        let mut g = GridFunction::infinite(grid);
        for (i, &k) in nodes.iter().enumerate() {
            let p = grid.point_of(k);
            let mut m = -w[i];
            if -domain.sdf(p) < collar * grid.h {
                m = m.max(cap);
            }
            g.set(k, Some(scale / m.powi(4)));
        }
        let rhs = |p: Point| grid.node_at(p, 1e-9 * grid.h).and_then(|k| g.get(k)).unwrap_or(0.0);
        let dopts =
            DirichletOptions { solver: opts.solver.clone(), initial: None, stencil: Some(disc.stencil().clone()) };
        let (next, report) = solve_on(domain, disc, &rhs, &zero, &dopts)?;
        let mut change = 0.0f64;
        for (i, &k) in nodes.iter().enumerate() {
            let v = next.get(k).unwrap();
            let nv = relaxation * v + (1.0 - relaxation) * w[i];
            change = change.max((nv - w[i]).abs());
            w[i] = nv;
        }
        let mut acc = total.take().unwrap_or(report.clone());
        if outer > 0 {
            acc.newton_steps += report.newton_steps;
            acc.gs_sweeps += report.gs_sweeps;
            acc.wall_time += report.wall_time;
        }
        acc.iterations = outer + 1;
        total = Some(acc);
        if change < opts.tol {
            let known = vec![0.0; disc.known_points().len()];
            let mut rep = total.unwrap();
            rep.monotone_violations = newton::monotone_violations(disc, &w, &known);
            rep.residual = newton::residual(disc, &w, &known, Source::NegativePower { scale });
            return Ok((disc.to_grid_function(&w, &known), rep));
        }
    }
    let known = vec![0.0; disc.known_points().len()];
    Err(Error::NoConvergence {
        iterations: max_outer,
        residual: newton::residual(disc, &w, &known, Source::NegativePower { scale }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_solver::dirichlet::solver_grid;
    use crate::ma_solver::support::{support_ball, support_simplex, LAMBDA_2};

    fn disk_error(h: f64, center: Point, r: f64) -> (f64, GridFunction) {
        let d = PlanarDomain::disk(center, r).unwrap();
        let grid = solver_grid(&d, h).unwrap();
        let (w, rep) = cheng_yau(&d, &grid, &Default::default()).unwrap();
        assert!(rep.converged && rep.monotone_violations == 0);
        let exact = support_ball(r, &center, 2).unwrap();
        let mut err = 0.0f64;
        for (k, v) in w.finite_nodes() {
            err = err.max((v - exact.eval(&grid.point_of(k)).unwrap_or(0.0)).abs());
        }
        (err, w)
    }

    #[test]
    fn unit_disk_support_function() {
        let (err, w) = disk_error(1.0 / 32.0, [0.0, 0.0], 1.0);
        assert!(err < 3e-2, "{err}");
        assert!(w.is_convex(1e-9));
        assert!(w.finite_nodes().all(|(_, v)| v <= 0.0));
    }

    #[test]
    fn extended_stencil_is_closer_on_the_disk() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 32.0).unwrap();
        let exact = support_ball(1.0, &[0.0, 0.0], 2).unwrap();
        let err = |opts: &ChengYauOptions| {
            let (w, _) = cheng_yau(&d, &grid, opts).unwrap();
            w.finite_nodes().map(|(k, v)| (v - exact.eval(&grid.point_of(k)).unwrap_or(0.0)).abs()).fold(0.0, f64::max)
        };
        let standard = err(&Default::default());
        let extended = err(&ChengYauOptions { stencil: StencilSet::extended(), ..Default::default() });
        assert!(extended < 0.9 * standard, "{standard} {extended}");
    }

    #[test]
    fn shifted_disk_center_value() {
        let r = 1.5;
        let (_, w) = disk_error(1.0 / 16.0, [0.25, -0.5], r);
        let k = w.grid().node_at([0.25, -0.5], 1e-9).unwrap();
        assert!((w.get(k).unwrap() + r.powf(2.0 / 3.0)).abs() < 3e-2 * r.powf(2.0 / 3.0));
    }

    fn triangle_fit(n: f64) -> (f64, f64) {
        let tri = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let d = PlanarDomain::polygon(tri.clone()).unwrap();
        let grid = solver_grid(&d, 1.0 / n).unwrap();
        let (w, _) = cheng_yau(&d, &grid, &Default::default()).unwrap();
        let kb = grid.node_at([1.0 / 3.0, 1.0 / 3.0], 1e-9).unwrap();
        // t0 t1 t2 = 1/27 and vol = 1/2 at the barycenter
        let lambda = 0.5 / 27.0 / (-w.get(kb).unwrap()).powi(3);
        let fit = support_simplex(&tri.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), 2, lambda).unwrap();
        let mut err = 0.0f64;
        for (k, v) in w.finite_nodes() {
            let p = grid.point_of(k);
            let dist = p[0].min(p[1]).min((1.0 - p[0] - p[1]) / 2f64.sqrt());
            if dist >= 0.1 {
                err = err.max((v - fit.eval(&p).unwrap()).abs());
            }
        }
        (lambda, err)
    }

    #[test]
    fn triangle_matches_simplex_formula() {
        let (l24, e24) = triangle_fit(24.0);
        let (l48, e48) = triangle_fit(48.0);
        assert!(e24 < 4e-2 && e48 < 3e-2, "{e24} {e48}");
        assert!(l48 > LAMBDA_2 && l48 < l24, "{l24} {l48}");
        assert!((l48 / LAMBDA_2 - 1.0).abs() < 0.12, "{l48}");
    }

    #[test]
    fn fixed_point_agrees_with_coupled() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 16.0).unwrap();
        let (a, _) = cheng_yau(&d, &grid, &Default::default()).unwrap();
        let opts = ChengYauOptions {
            method: ChengYauMethod::FixedPoint { relaxation: 0.5, collar: 0.0, max_outer: 200 },
            tol: 1e-9,
            ..Default::default()
        };
        let (b, rep) = cheng_yau(&d, &grid, &opts).unwrap();
        assert!(rep.iterations > 1);
        for k in 0..grid.len() {
            if let (Some(x), Some(y)) = (a.get(k), b.get(k)) {
                assert!((x - y).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn too_small_domain() {
        let d = PlanarDomain::disk([0.0, 0.0], 0.1).unwrap();
        let grid = solver_grid(&d, 0.05).unwrap();
        assert!(matches!(cheng_yau(&d, &grid, &Default::default()), Err(Error::DomainTooSmall { .. })));
    }
}
