//! Damped Newton iteration on the monotone scheme with a nonlinear
//! Gauss-Seidel fallback.

use std::time::{Duration, Instant};

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ma_solver::stencil::{Discretization, Target};

/// Right-hand side of `MA_h(u) = g`.
#[derive(Clone, Copy, Debug)]
pub enum Source<'a> {
    /// Prescribed per-unknown values.
    Fixed(&'a [f64]),
    /// `scale * (-u)^-4`, defined for `u < 0`.
    NegativePower { scale: f64 },
}

impl Source<'_> {
    #[inline]
    fn value(&self, i: usize, u: f64) -> f64 {
        match *self {
            Source::Fixed(g) => g[i],
            Source::NegativePower { scale } => {
                let m = -u;
                scale / (m * m * m * m)
            }
        }
    }

    #[inline]
    fn root(&self, i: usize, u: f64) -> f64 {
        match *self {
            Source::Fixed(g) => g[i].sqrt(),
            Source::NegativePower { scale } => scale.sqrt() / (u * u),
        }
    }

    #[inline]
    fn root_derivative(&self, u: f64) -> f64 {
        match *self {
            Source::Fixed(_) => 0.0,
            Source::NegativePower { scale } => {
                let m = -u;
                2.0 * scale.sqrt() / (m * m * m)
            }
        }
    }

    #[inline]
    fn admissible(&self, u: f64) -> bool {
        match self {
            Source::Fixed(_) => u.is_finite(),
            Source::NegativePower { .. } => u < 0.0 && u.is_finite(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop when a full Newton step moves no unknown by more than this.
    pub tol: f64,
    pub max_newton: usize,
    pub max_halvings: usize,
    /// Consecutive failed line searches before switching to Gauss-Seidel.
    pub gs_after_failures: usize,
    pub max_gs_sweeps: usize,
    /// Nodes within this many grid spacings of the boundary take the boundary data.
    pub boundary_eps: f64,
    /// Problems with more unknowns start from the solution at twice the spacing.
    pub coarsen_above: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_newton: 200,
            max_halvings: 30,
            gs_after_failures: 5,
            max_gs_sweeps: 5000,
            boundary_eps: 1e-6,
            coarsen_above: 1500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub newton_steps: usize,
    pub gs_sweeps: usize,
    /// `max |MA_h(u) - g| h^2` over unknowns.
    pub residual: f64,
    pub monotone_violations: usize,
    #[serde(serialize_with = "as_seconds")]
    pub wall_time: Duration,
    pub converged: bool,
    pub unknowns: usize,
}

fn as_seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Bound on the directional weight ratio in the concave form of the pair products.
const TAU: f64 = 1e4;

struct RowEval {
    residual: f64,
    pair: usize,
    t: f64,
}

/// `min_{t in [1/TAU, TAU]} (t a + b / t) / 2`, equal to `sqrt(ab)` for balanced
/// positive `a, b` and linear in `(a, b)` once the minimiser is fixed.
#[inline]
fn pair_root(a: f64, b: f64) -> (f64, f64) {
    let f = |t: f64| 0.5 * (t * a + b / t);
    if a > 0.0 && b > 0.0 {
        let t = (b / a).sqrt().clamp(1.0 / TAU, TAU);
        return (f(t), t);
    }
    let (lo, hi) = (f(1.0 / TAU), f(TAU));
    if lo <= hi {
        (lo, 1.0 / TAU)
    } else {
        (hi, TAU)
    }
}

fn row(disc: &Discretization, i: usize, center: f64, u: &[f64], known: &[f64], root_g: f64) -> RowEval {
    let mut best = RowEval { residual: f64::INFINITY, pair: 0, t: 1.0 };
    for p in 0..disc.stencil().len() {
        let a = disc.second_difference(i, 2 * p, center, u, known).value;
        let b = disc.second_difference(i, 2 * p + 1, center, u, known).value;
        let (v, t) = pair_root(a, b);
        if v < best.residual {
            best = RowEval { residual: v, pair: p, t };
        }
    }
    best.residual -= root_g;
    best
}

fn residuals(disc: &Discretization, u: &[f64], known: &[f64], src: &Source) -> Vec<RowEval> {
    (0..disc.unknown_count()).into_par_iter().map(|i| row(disc, i, u[i], u, known, src.root(i, u[i]))).collect()
}

fn merit(rows: &[RowEval]) -> f64 {
    rows.iter().map(|r| r.residual * r.residual).sum::<f64>()
}

fn jacobian(
    disc: &Discretization,
    u: &[f64],
    known: &[f64],
    src: &Source,
    rows: &[RowEval],
) -> Vec<Triplet<usize, usize, f64>> {
    let per_row: Vec<Vec<Triplet<usize, usize, f64>>> = (0..disc.unknown_count())
        .into_par_iter()
        .map(|i| {
            let r = &rows[i];
            let c = u[i];
            let mut diag = -src.root_derivative(c);
            let mut out = Vec::with_capacity(5);
            let arms = disc.arms(i);
            for (d, f) in [(2 * r.pair, 0.5 * r.t), (2 * r.pair + 1, 0.5 / r.t)] {
                let sd = disc.second_difference(i, d, c, u, known);
                diag += f * sd.c_center;
                for (arm, coef) in [(arms[2 * d], sd.c_fwd), (arms[2 * d + 1], sd.c_bwd)] {
                    if let Target::Unknown(j) = arm.target {
                        out.push(Triplet::new(i, j as usize, f * coef));
                    }
                }
            }
            out.push(Triplet::new(i, i, diag));
            out
        })
        .collect();
    per_row.into_iter().flatten().collect()
}

fn linear_solve(n: usize, triplets: &[Triplet<usize, usize, f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, triplets)
        .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
    let b = faer::Col::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[i]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearSolve("non-finite Newton step".into()));
    }
    Ok(out)
}

/// Solves the scalar monotone equation at unknown `i` with neighbours fixed.
fn gauss_seidel_update(disc: &Discretization, i: usize, u: &[f64], known: &[f64], src: &Source) -> f64 {
    let f = |c: f64| {
        if !src.admissible(c) {
            return f64::NEG_INFINITY;
        }
        row(disc, i, c, u, known, src.root(i, c)).residual
    };
    // the weighted neighbour average of every direction is an upper bracket
    let arms = disc.arms(i);
    let mut hi = f64::INFINITY;
    for d in 0..2 * disc.stencil().len() {
        let (fa, ba) = (arms[2 * d], arms[2 * d + 1]);
        let val = |t: Target| match t {
            Target::Unknown(j) => u[j as usize],
            Target::Known(j) => known[j as usize],
        };
        let avg = (ba.len * val(fa.target) + fa.len * val(ba.target)) / (fa.len + ba.len);
        hi = hi.min(avg);
    }
    if let Source::NegativePower { .. } = src {
        hi = hi.min(-1e-300);
    }
    let mut step = (hi - u[i]).abs().max(disc.grid().h * disc.grid().h).max(1e-12);
    let mut lo = hi - step;
    let mut guard = 0;
    while f(lo) <= 0.0 && guard < 200 {
        step *= 2.0;
        lo = hi - step;
        guard += 1;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn gauss_seidel_sweep(disc: &Discretization, u: &mut [f64], known: &[f64], src: &Source) -> f64 {
    let mut change = 0.0f64;
    for i in 0..disc.unknown_count() {
        let v = gauss_seidel_update(disc, i, u, known, src);
        change = change.max((v - u[i]).abs());
        u[i] = v;
    }
    change
}

/// `max |MA_h(u) - g(u)| h^2` over unknowns.
pub(crate) fn residual(disc: &Discretization, u: &[f64], known: &[f64], src: Source) -> f64 {
    ma_residual(disc, u, known, &src)
}

fn ma_residual(disc: &Discretization, u: &[f64], known: &[f64], src: &Source) -> f64 {
    let h2 = disc.grid().h * disc.grid().h;
    let worst = (0..disc.unknown_count())
        .into_par_iter()
        .map(|i| {
            let mut t = f64::INFINITY;
            for p in 0..disc.stencil().len() {
                let a = disc.second_difference(i, 2 * p, u[i], u, known).value;
                let b = disc.second_difference(i, 2 * p + 1, u[i], u, known).value;
                t = t.min(a.max(0.0) * b.max(0.0) + a.min(0.0) + b.min(0.0));
            }
            (t - src.value(i, u[i])).abs()
        })
        .reduce(|| 0.0, f64::max);
    worst * h2
}

pub(crate) fn monotone_violations(disc: &Discretization, u: &[f64], known: &[f64]) -> usize {
    let scale = u.iter().chain(known).fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale / (disc.grid().h * disc.grid().h);
    (0..disc.unknown_count()).into_par_iter().filter(|&i| disc.min_second_difference(i, u, known) < -tol).count()
}

/// Drives `u` to a root of `min_pairs sqrt(D_a D_b) - sqrt(g(u))` in its concave form.
pub(crate) fn solve(
    disc: &Discretization,
    known: &[f64],
    src: Source,
    mut u: Vec<f64>,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = disc.unknown_count();
    if u.iter().any(|&v| !src.admissible(v)) {
        return Err(Error::InvalidInput("initial guess outside the admissible set".into()));
    }
    let mut rows = residuals(disc, &u, known, &src);
    let mut m = merit(&rows);
    let mut newton_steps = 0;
    let mut gs_sweeps = 0;
    let mut failures = 0;
    let mut converged = n == 0;
    let mut iterations = 0;
    while !converged && iterations < opts.max_newton {
        iterations += 1;
        let trip = jacobian(disc, &u, known, &src, &rows);
        let rhs: Vec<f64> = rows.iter().map(|r| -r.residual).collect();
        let step = linear_solve(n, &trip, &rhs)?;
        newton_steps += 1;
        let step_norm = step.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(a, d)| a + alpha * d).collect();
            if trial.iter().all(|&v| src.admissible(v)) {
                let trial_rows = residuals(disc, &trial, known, &src);
                let tm = merit(&trial_rows);
                if tm < m || alpha == 1.0 {
                    u = trial;
                    rows = trial_rows;
                    m = tm;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if accepted {
            failures = 0;
            if alpha == 1.0 && step_norm <= opts.tol {
                converged = true;
            }
        } else if step_norm <= opts.tol {
            // the merit sits at round-off level
            converged = true;
        } else {
            failures += 1;
            if failures >= opts.gs_after_failures {
                failures = 0;
                let budget = opts.max_gs_sweeps.saturating_sub(gs_sweeps);
                if budget == 0 {
                    break;
                }
                let mut last = f64::INFINITY;
                for _ in 0..budget.min(50) {
                    last = gauss_seidel_sweep(disc, &mut u, known, &src);
                    gs_sweeps += 1;
                    if last <= opts.tol {
                        break;
                    }
                }
                rows = residuals(disc, &u, known, &src);
                m = merit(&rows);
                if last <= opts.tol {
                    converged = true;
                }
            }
        }
    }
    let residual = ma_residual(disc, &u, known, &src);
    let monotone = monotone_violations(disc, &u, known);
    let report = SolveReport {
        iterations,
        newton_steps,
        gs_sweeps,
        residual,
        monotone_violations: monotone,
        wall_time: start.elapsed(),
        converged,
        unknowns: n,
    };
    if !converged {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok((u, report))
}

/// Gauss-Seidel only; used to cross-check the Newton path.
#[cfg(test)]
pub(crate) fn solve_gauss_seidel(
    disc: &Discretization,
    known: &[f64],
    src: Source,
    mut u: Vec<f64>,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_gs_sweeps {
        let change = gauss_seidel_sweep(disc, &mut u, known, &src);
        sweeps += 1;
        if change <= opts.tol {
            converged = true;
            break;
        }
    }
    let residual = ma_residual(disc, &u, known, &src);
    if !converged {
        return Err(Error::NoConvergence { iterations: sweeps, residual });
    }
    Ok((
        u.clone(),
        SolveReport {
            iterations: sweeps,
            newton_steps: 0,
            gs_sweeps: sweeps,
            residual,
            monotone_violations: monotone_violations(disc, &u, known),
            wall_time: start.elapsed(),
            converged,
            unknowns: disc.unknown_count(),
        },
    ))
}
