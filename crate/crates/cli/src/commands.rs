use anyhow::anyhow;
use cagc_core::cagc::{
    asymptotic_check, blowup_diagnostic, foliation, hull_support, sandwich_check, two_step_solve, BlowupReport,
    FoliationDiagnostics, FoliationOptions, FoliationResult, SandwichReport, TwoStepProblem, TwoStepSolution,
};
use cagc_core::convex_core::{Classification, GridFunction};
use cagc_core::geometry3d::{
    cagc_check, conormal_check, minkowski_curvature, solution_invariants, write_obj, write_vertex_scalars, CagcReport,
    ConormalReport,
};
use cagc_core::io::fmt_f64;
use cagc_core::ma_solver::{boundary_growth_check, cheng_yau, solver_grid, PlanarDomain};
use cagc_core::{Point, SolveReport};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::output::Output;
use crate::status::{Classify, Failure, Outcome};

/// Relative tolerance of the constant-curvature check in the diagnostics.
pub const CAGC_RTOL: f64 = 0.05;
/// Tolerance of the conormal identities.
pub const CONORMAL_TOL: f64 = 1e-6;

/// Solver statistics without the wall time, so that reports are reproducible.
#[derive(Debug, Serialize)]
pub struct SolveSummary {
    pub iterations: usize,
    pub newton_steps: usize,
    pub gs_sweeps: usize,
    pub residual: f64,
    pub converged: bool,
    pub unknowns: usize,
}

impl From<&SolveReport> for SolveSummary {
    fn from(r: &SolveReport) -> Self {
        Self {
            iterations: r.iterations,
            newton_steps: r.newton_steps,
            gs_sweeps: r.gs_sweeps,
            residual: r.residual,
            converged: r.converged,
            unknowns: r.unknowns,
        }
    }
}

#[derive(Debug, Serialize)]
struct Growth {
    point: Point,
    exponent: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ChengYauLevel {
    h: f64,
    solve: SolveSummary,
    w_min: Option<f64>,
    /// `w` at the origin, when the origin lies in the domain.
    w_origin: Option<f64>,
    growth: Vec<Growth>,
}

#[derive(Debug, Serialize)]
struct ChengYauReport {
    pass: bool,
    tol: f64,
    levels: Vec<ChengYauLevel>,
}

fn at_origin(domain: &PlanarDomain, u: &GridFunction) -> Option<f64> {
    domain.contains([0.0, 0.0]).then(|| u.interpolate([0.0, 0.0])).flatten()
}

pub fn cmd_cheng_yau(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome, Failure> {
    let domain = cfg.domain().usage()?;
    let mut levels = Vec::new();
    let mut finest = None;
    for h in cfg.spacings() {
        let grid = solver_grid(&domain, h).usage()?;
        let (w, report) = cheng_yau(&domain, &grid, &Default::default()).solver()?;
        let growth = cfg
            .growth_points
            .iter()
            .map(|&p| match boundary_growth_check(&domain, &w, p, 0.5) {
                Ok(g) => Growth { point: p, exponent: Some(g.exponent), error: None },
                Err(e) => Growth { point: p, exponent: None, error: Some(e.to_string()) },
            })
            .collect::<Vec<_>>();
        let level = ChengYauLevel {
            h,
            solve: (&report).into(),
            w_min: w.min_finite().map(|(_, v)| v),
            w_origin: at_origin(&domain, &w),
            growth,
        };
        println!(
            "level h={} unknowns={} residual={} w_min={}",
            fmt_f64(h),
            level.solve.unknowns,
            fmt_f64(level.solve.residual),
            level.w_min.map_or("none".into(), fmt_f64)
        );
        levels.push(level);
        finest = Some(w);
    }
    let pass = levels.iter().all(|l| l.solve.residual < cfg.tol);
    let report = ChengYauReport { pass, tol: cfg.tol, levels };
    if let Some(w) = &finest {
        out.json("w.json", &w.to_file()).usage()?;
    }
    out.json("report.json", &report).usage()?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail(format!("residual above tol {}", fmt_f64(cfg.tol))) })
}

#[derive(Debug, Serialize)]
struct TwoStepLevel {
    h: f64,
    solve: SolveSummary,
    exhaustion_levels: usize,
    sandwich: SandwichReport,
    /// `max (env phi - u)` on the collar of `dom u`.
    boundary_gap: Option<f64>,
    cagc: Option<CagcReport>,
    conormal: Option<ConormalReport>,
    invariants_error: Option<String>,
}

#[derive(Debug, Serialize)]
struct TwoStepReport {
    c: f64,
    k: f64,
    levels: Vec<TwoStepLevel>,
    blowup: Vec<BlowupReport>,
}

fn two_step_level(sol: &TwoStepSolution, k: f64) -> Result<TwoStepLevel, Failure> {
    let w_hull = hull_support(sol, &Default::default()).solver()?;
    let (cagc, conormal, invariants_error) = match solution_invariants(sol) {
        Ok(s) => (Some(cagc_check(&s, k, CAGC_RTOL)), Some(conormal_check(&s, CONORMAL_TOL)), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(TwoStepLevel {
        h: sol.u.grid().h,
        solve: (&sol.report).into(),
        exhaustion_levels: sol.levels.len(),
        sandwich: sandwich_check(sol, &w_hull),
        boundary_gap: asymptotic_check(&sol.u, &sol.phi).ok().map(|r| r.gap),
        cagc,
        conormal,
        invariants_error,
    })
}

fn solve_levels(cfg: &ScenarioConfig) -> Result<(Vec<TwoStepSolution>, Option<Point>), Failure> {
    let data = cfg.data().usage()?;
    let c = cfg.c().usage()?;
    let mut sols = Vec::new();
    for h in cfg.spacings() {
        let problem = TwoStepProblem::new(data.phi.clone(), c, h).usage()?;
        sols.push(two_step_solve(&problem, &Default::default()).solver()?);
    }
    Ok((sols, data.marked))
}

pub fn cmd_two_step(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome, Failure> {
    if cfg.blowup.is_some() && cfg.levels < 3 {
        return Err(Failure::Usage(anyhow!("blowup diagnostics need at least three levels")));
    }
    let k = cfg.k().usage()?;
    let (sols, marked) = solve_levels(cfg)?;
    let mut levels = Vec::new();
    for sol in &sols {
        let level = two_step_level(sol, k)?;
        println!(
            "level h={} unknowns={} residual={} sandwich={} cagc={}",
            fmt_f64(level.h),
            level.solve.unknowns,
            fmt_f64(level.solve.residual),
            fmt_f64(level.sandwich.max_violation),
            level.cagc.as_ref().map_or("none".into(), |c| fmt_f64(c.max_deviation))
        );
        levels.push(level);
    }
    let mut blowup = Vec::new();
    let mut finite_at = Vec::new();
    if let Some(spec) = &cfg.blowup {
        let points = match (&spec.points, marked) {
            (Some(p), _) => p.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => sols[0].phi.dom_hull(),
        };
        for x0 in points {
            let r = blowup_diagnostic(&sols, x0, &Default::default()).usage()?;
            println!("blowup x0=({}, {}) {}", fmt_f64(x0[0]), fmt_f64(x0[1]), r.classification);
            if r.classification == Classification::Finite {
                finite_at.push(x0);
            }
            blowup.push(r);
        }
    }
    let finest = sols.last().expect("at least one level");
    out.json("u.json", &finest.u.to_file()).usage()?;
    if cfg.mesh {
        let surface = solution_invariants(finest).solver()?;
        let curvature = minkowski_curvature(&surface);
        out.text("mesh.obj", |mut w| write_obj(&surface, &mut w)).usage()?;
        out.text("mesh.csv", |mut w| write_vertex_scalars(&surface, &curvature, &mut w)).usage()?;
    }
    let report = TwoStepReport { c: finest.c, k, levels, blowup };
    out.json("diagnostics.json", &report).usage()?;
    if cfg.blowup.as_ref().is_some_and(|b| b.counterexample) && !finite_at.is_empty() {
        return Ok(Outcome::Counterexample(format!("finite inner derivative at {finite_at:?}")));
    }
    Ok(Outcome::Pass)
}

#[derive(Debug, Serialize)]
struct Leaf {
    t: f64,
    value: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FoliationLevel {
    h: f64,
    /// Point where the leaf values are read.
    probe: Point,
    leaves: Vec<Leaf>,
    diagnostics: FoliationDiagnostics,
}

#[derive(Debug, Serialize)]
struct FoliationReport {
    pass: bool,
    t: Vec<f64>,
    levels: Vec<FoliationLevel>,
}

fn foliation_pass(d: &FoliationDiagnostics) -> bool {
    d.monotone.iter().all(|&m| m) && d.concave.iter().all(|&c| c) && d.k_convexity_violations == 0
}

fn probe_point(r: &FoliationResult) -> Point {
    let hull = &r.solutions[0].hull;
    if hull.contains([0.0, 0.0]) {
        [0.0, 0.0]
    } else {
        hull.inscribed_disk().0
    }
}

pub fn cmd_foliation(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome, Failure> {
    let t = cfg.t.clone().ok_or_else(|| anyhow!("foliation needs a t list")).usage()?;
    let data = cfg.data().usage()?;
    let defaults = FoliationOptions::default();
    let f = &cfg.foliation;
    let opts = FoliationOptions {
        segments: f.segments.unwrap_or(defaults.segments),
        seed: f.seed.unwrap_or(defaults.seed),
        dual_radius: f.dual_radius.unwrap_or(defaults.dual_radius),
        dual_n: f.dual_n.unwrap_or(defaults.dual_n),
        ..defaults
    };
    let mut levels = Vec::new();
    let mut finest = None;
    for h in cfg.spacings() {
        let r = foliation(&data.phi, &t, h, &opts).map_err(|e| match e {
            cagc_core::Error::InvalidInput(_) => Failure::Usage(e.into()),
            _ => Failure::Solver(e.into()),
        })?;
        let probe = probe_point(&r);
        let leaves =
            r.t_values.iter().zip(&r.u_t).map(|(&t, u)| Leaf { t, value: u.interpolate(probe) }).collect::<Vec<_>>();
        let d = r.diagnostics.clone();
        println!(
            "level h={} monotone={} concave={} k_violations={}",
            fmt_f64(h),
            d.monotone.iter().all(|&m| m),
            d.concave.iter().all(|&c| c),
            d.k_convexity_violations
        );
        levels.push(FoliationLevel { h, probe, leaves, diagnostics: d });
        finest = Some(r);
    }
    let r = finest.expect("at least one level");
    for (i, u) in r.u_t.iter().enumerate() {
        out.json(&format!("u_t{i}.json"), &u.to_file()).usage()?;
    }
    out.text("k_samples.csv", |w| {
        writeln!(w, "y1,y2,xi,t,log_k")?;
        for s in &r.k_samples {
            let p = s.point;
            writeln!(w, "{},{},{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]), fmt_f64(s.t), fmt_f64(s.log_k))?;
        }
        Ok(())
    })
    .usage()?;
    let last = levels.last().expect("at least one level");
    out.text("leaves.csv", |w| {
        writeln!(w, "t,x1,x2,u")?;
        for l in &last.leaves {
            let v = l.value.map_or("inf".into(), fmt_f64);
            writeln!(w, "{},{},{},{v}", fmt_f64(l.t), fmt_f64(last.probe[0]), fmt_f64(last.probe[1]))?;
        }
        Ok(())
    })
    .usage()?;
    let pass = levels.iter().all(|l| foliation_pass(&l.diagnostics));
    out.json("report.json", &FoliationReport { pass, t, levels }).usage()?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail("foliation checks failed".into()) })
}
