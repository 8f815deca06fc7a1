use serde::Serialize;

use crate::convex_core::{BoundaryFunction, Envelope, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::{
    cheng_yau, envelope_at, solve_on, solver_grid, ChengYauOptions, DirichletOptions, Discretization, PlanarDomain,
    SolveReport, SolverOptions, StencilSet,
};

/// `c = k^{-2/3}`.
pub fn c_from_k(k: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::NonPositive { name: "k", value: k });
    }
    Ok(k.powf(-2.0 / 3.0))
}

/// `k = c^{-3/2}`.
pub fn k_from_c(c: f64) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::NonPositive { name: "c", value: c });
    }
    Ok(c.powf(-1.5))
}

#[derive(Clone, Debug)]
pub struct TwoStepProblem {
    pub omega: PlanarDomain,
    pub phi: BoundaryFunction,
    pub c: f64,
    /// Grid spacing.
    pub h: f64,
}

impl TwoStepProblem {
    pub fn new(phi: BoundaryFunction, c: f64, h: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonPositive { name: "c", value: c });
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::NonPositive { name: "h", value: h });
        }
        if phi.finite_count() < 3 {
            return Err(Error::DegenerateHull);
        }
        Ok(Self { omega: phi.domain().clone(), phi, c, h })
    }

    pub fn with_k(phi: BoundaryFunction, k: f64, h: f64) -> Result<Self> {
        Self::new(phi, c_from_k(k)?, h)
    }

    pub fn k(&self) -> f64 {
        self.c.powf(-1.5)
    }

    pub fn grid(&self) -> Result<Grid> {
        solver_grid(&self.omega, self.h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepOptions {
    pub solver: SolverOptions,
    pub cheng_yau: ChengYauOptions,
    /// First exhaustion offset; a quarter of the inradius of the hull when absent.
    pub delta0: Option<f64>,
    /// Cauchy increment below which the exhaustion stops early.
    pub tol: f64,
    pub max_levels: usize,
}

impl Default for TwoStepOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            cheng_yau: ChengYauOptions::default(),
            delta0: None,
            tol: 1e-8,
            max_levels: 12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustionLevel {
    /// Offset of the subdomain; `0` for the hull itself.
    pub delta: f64,
    /// Sup-norm change against the previous level on the first subdomain.
    pub increment: Option<f64>,
    pub iterations: usize,
    pub unknowns: usize,
}

#[derive(Clone, Debug)]
pub struct TwoStepSolution {
    pub u: GridFunction,
    pub w_omega: GridFunction,
    pub envelope: Envelope,
    /// Interior of the convex hull of `dom phi`.
    pub hull: PlanarDomain,
    pub levels: Vec<ExhaustionLevel>,
    pub report: SolveReport,
    pub c: f64,
    pub phi: BoundaryFunction,
}

impl TwoStepSolution {
    /// `env phi` at `p`, extended into the thin region between the sampled
    /// hull and a curved boundary.
    pub fn envelope_value(&self, p: Point) -> f64 {
        envelope_at(&self.envelope, hull_center(&self.envelope), p)
    }

    /// Whether the hull is the whole domain.
    pub fn full_domain(&self) -> bool {
        self.phi.is_finite_everywhere()
    }
}

pub(crate) fn hull_center(env: &Envelope) -> Point {
    geom::polygon_centroid(env.hull())
}

/// Solves the problem, computing `w_Omega` on the problem grid first.
pub fn two_step_solve(problem: &TwoStepProblem, opts: &TwoStepOptions) -> Result<TwoStepSolution> {
    let grid = problem.grid()?;
    let (w, _) = cheng_yau(&problem.omega, &grid, &opts.cheng_yau)?;
    two_step_solve_with(problem, &w, opts)
}

/// Solves the problem with a precomputed `w_Omega` on the problem grid.
pub fn two_step_solve_with(
    problem: &TwoStepProblem,
    w: &GridFunction,
    opts: &TwoStepOptions,
) -> Result<TwoStepSolution> {
    let phi = &problem.phi;
    phi.validate()?;
    let hull = phi.hull_domain()?;
    let envelope = Envelope::of_boundary(phi)?;
    let grid = *w.grid();
    if grid != problem.grid()? {
        return Err(Error::InvalidInput("w_Omega lives on a different grid".into()));
    }
    let center = hull_center(&envelope);
    let boundary = |p: Point| envelope_at(&envelope, center, p);
    let c = problem.c;
    let node_tol = 1e-9 * grid.h;
    let rhs = |p: Point| match grid.node_at(p, node_tol).and_then(|k| w.get(k)) {
        Some(v) if v < 0.0 => c / (v * v * v * v),
        _ => f64::NAN,
    };

    let (_, inradius) = hull.inscribed_disk();
    let delta0 = opts.delta0.unwrap_or(0.25 * inradius);
    let mut levels = Vec::new();
    let mut prev: Option<GridFunction> = None;
    let mut probe_nodes: Option<Vec<usize>> = None;
    let mut delta = delta0;
    let mut level = 0;
    while delta >= 0.25 * grid.h && level < opts.max_levels {
        level += 1;
        let Ok(sub) = hull.rounded_inset(delta) else {
            delta *= 0.5;
            continue;
        };
        let disc = Discretization::new(&sub, grid, StencilSet::standard(), opts.solver.boundary_eps);
        if disc.unknown_count() == 0 {
            delta *= 0.5;
            continue;
        }
        let (u, rep) = solve_on(
            &sub,
            &disc,
            &rhs,
            &boundary,
            &DirichletOptions { solver: opts.solver.clone(), initial: prev.as_ref(), stencil: None },
        )?;
        let nodes = probe_nodes.get_or_insert_with(|| disc.unknown_nodes().to_vec());
        let increment = prev.as_ref().map(|p| sup_difference(p, &u, nodes));
        levels.push(ExhaustionLevel { delta, increment, iterations: rep.iterations, unknowns: rep.unknowns });
        prev = Some(u);
        if increment.is_some_and(|d| d < opts.tol) {
            break;
        }
        delta *= 0.5;
    }
    let disc = Discretization::new(&hull, grid, StencilSet::standard(), opts.solver.boundary_eps);
    let (u, report) = solve_on(
        &hull,
        &disc,
        &rhs,
        &boundary,
        &DirichletOptions { solver: opts.solver.clone(), initial: prev.as_ref(), stencil: None },
    )?;
    let increment = match (&prev, &probe_nodes) {
        (Some(p), Some(nodes)) => Some(sup_difference(p, &u, nodes)),
        _ => None,
    };
    levels.push(ExhaustionLevel { delta: 0.0, increment, iterations: report.iterations, unknowns: report.unknowns });
    Ok(TwoStepSolution { u, w_omega: w.clone(), envelope, hull, levels, report, c, phi: phi.clone() })
}

fn sup_difference(a: &GridFunction, b: &GridFunction, nodes: &[usize]) -> f64 {
    nodes.iter().filter_map(|&k| Some((a.get(k)? - b.get(k)?).abs())).fold(0.0, f64::max)
}
