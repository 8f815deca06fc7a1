use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cagc::two_step::{two_step_solve_with, TwoStepOptions, TwoStepProblem, TwoStepSolution};
use crate::convex_core::{legendre_transform, BoundaryFunction, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::cheng_yau;

#[derive(Clone, Debug)]
pub struct FoliationOptions {
    pub two_step: TwoStepOptions,
    /// Half-width of the square dual grid.
    pub dual_radius: f64,
    pub dual_n: usize,
    /// Random segments in the midpoint-convexity test of `K`.
    pub segments: usize,
    pub seed: u64,
    /// Absolute slack of the concavity-in-`t` test, relative to the data scale.
    pub concavity_tol: f64,
}

impl Default for FoliationOptions {
    fn default() -> Self {
        Self {
            two_step: TwoStepOptions::default(),
            dual_radius: 2.0,
            dual_n: 65,
            segments: 200,
            seed: 0,
            concavity_tol: 1e-7,
        }
    }
}

/// A point of the domain `D` above the boundary graph with its leaf.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KSample {
    pub point: [f64; 3],
    /// Leaf parameter: `c = e^{-t}`.
    pub t: f64,
    /// `log k = 3t / 2`.
    pub log_k: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FoliationDiagnostics {
    /// `u_{t_i} <= u_{t_{i+1}}` at every node.
    pub monotone: Vec<bool>,
    /// Strict inequality at every node off the boundary of `dom u`.
    pub strictly_monotone: Vec<bool>,
    /// Three-point concavity in `t` at every node, one flag per interior `t`.
    pub concave: Vec<bool>,
    pub max_concavity_defect: f64,
    /// `min (u*_{t_i} - u*_{t_{i+1}})` over the dual grid.
    pub min_leaf_gap: f64,
    pub leaves_disjoint: bool,
    pub k_segments: usize,
    pub k_convexity_violations: usize,
    pub max_k_convexity_defect: f64,
}

#[derive(Clone, Debug)]
pub struct FoliationResult {
    pub t_values: Vec<f64>,
    pub solutions: Vec<TwoStepSolution>,
    pub u_t: Vec<GridFunction>,
    pub dual: Grid,
    pub u_star: Vec<GridFunction>,
    pub k_samples: Vec<KSample>,
    pub time: TimeFunction,
    pub diagnostics: FoliationDiagnostics,
}

/// `K` on `D`: the leaf through `(y, xi)` solves `H(y, t) = xi`, where
/// `H(., t)` is the conjugate of the piecewise-linear interpolation in `t` of
/// the computed `u_t`.
#[derive(Clone, Debug)]
pub struct TimeFunction {
    t: Vec<f64>,
    points: Vec<Point>,
    /// `values[node * nt + i] = u_{t_i}(node)`.
    values: Vec<f64>,
}

const BISECTION_STEPS: usize = 40;

impl TimeFunction {
    pub fn new(t: &[f64], fields: &[GridFunction]) -> Result<Self> {
        if t.len() < 2 || t.len() != fields.len() {
            return Err(Error::InvalidInput("need at least two leaves".into()));
        }
        let grid = fields[0].grid();
        let nt = t.len();
        let mut points = Vec::new();
        let mut values = Vec::new();
        for k in 0..grid.len() {
            let vals: Option<Vec<f64>> = fields.iter().map(|f| f.get(k)).collect();
            if let Some(v) = vals {
                points.push(grid.point_of(k));
                values.extend(v);
            }
        }
        if points.is_empty() {
            return Err(Error::AllInfinite);
        }
        debug_assert_eq!(values.len(), points.len() * nt);
        Ok(Self { t: t.to_vec(), points, values })
    }

    /// Interval index and weight of `t` in the piecewise-linear interpolation,
    /// extrapolating linearly past both ends.
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.t.len();
        let i = match self.t.iter().position(|&s| s > t) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        }
        .min(n - 2);
        let s = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        (i, s)
    }

    /// `H(y, t) = max_x (x . y - u_t(x))`.
    pub fn support(&self, y: Point, t: f64) -> f64 {
        let nt = self.t.len();
        let (i, s) = self.locate(t);
        self.points
            .iter()
            .enumerate()
            .map(|(n, &x)| {
                let a = self.values[n * nt + i];
                let b = self.values[n * nt + i + 1];
                geom::dot(x, y) - (a + s * (b - a))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Leaf parameter `t` through `(y, xi)`; `None` when no bracket is found.
    pub fn time(&self, p: [f64; 3]) -> Option<f64> {
        let y = [p[0], p[1]];
        let xi = p[2];
        let span = self.t[self.t.len() - 1] - self.t[0];
        let (mut lo, mut hi) = (self.t[0], self.t[self.t.len() - 1]);
        let mut width = span;
        let mut guard = 0;
        while self.support(y, lo) < xi {
            lo -= width;
            width *= 2.0;
            guard += 1;
            if guard > 60 {
                return None;
            }
        }
        width = span;
        guard = 0;
        while self.support(y, hi) > xi {
            hi += width;
            width *= 2.0;
            guard += 1;
            if guard > 60 {
                return None;
            }
        }
        for _ in 0..BISECTION_STEPS {
            let m = 0.5 * (lo + hi);
            if self.support(y, m) > xi {
                lo = m;
            } else {
                hi = m;
            }
        }
        Some(0.5 * (lo + hi))
    }

    pub fn sample(&self, p: [f64; 3]) -> Option<KSample> {
        self.time(p).map(|t| KSample { point: p, t, log_k: 1.5 * t })
    }
}

/// Solves the two-step problem with `c = e^{-t}` for every `t` and assembles
/// the time function of the foliation.
pub fn foliation(phi: &BoundaryFunction, t_list: &[f64], h: f64, opts: &FoliationOptions) -> Result<FoliationResult> {
    if t_list.len() < 3 || t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("t values must be strictly increasing, at least three".into()));
    }
    let base = TwoStepProblem::new(phi.clone(), 1.0, h)?;
    let grid = base.grid()?;
    let (w, _) = cheng_yau(&base.omega, &grid, &opts.two_step.cheng_yau)?;
    let solutions: Vec<TwoStepSolution> = t_list
        .par_iter()
        .map(|&t| {
            let problem = TwoStepProblem { c: (-t).exp(), ..base.clone() };
            two_step_solve_with(&problem, &w, &opts.two_step)
        })
        .collect::<Result<_>>()?;
    let u_t: Vec<GridFunction> = solutions.iter().map(|s| s.u.clone()).collect();
    let scale = u_t.iter().fold(1.0f64, |m, u| m.max(u.scale()));

    let mut monotone = Vec::new();
    let mut strictly = Vec::new();
    for i in 0..t_list.len() - 1 {
        let (a, b) = (&u_t[i], &u_t[i + 1]);
        let mut strict = true;
        for (k, va) in a.finite_nodes() {
            let Some(vb) = b.get(k) else { continue };
            if va > vb + 1e-9 * scale {
                return Err(Error::MonotonicityViolation { node: k, t_lo: t_list[i], t_hi: t_list[i + 1] });
            }
            let p = grid.point_of(k);
            let off_edge = solutions[i].envelope_value(p) - vb > 1e-12 * scale;
            if off_edge && vb <= va {
                strict = false;
            }
        }
        monotone.push(true);
        strictly.push(strict);
    }

    let mut concave = Vec::new();
    let mut max_defect = 0.0f64;
    for i in 1..t_list.len() - 1 {
        let lam = (t_list[i + 1] - t_list[i]) / (t_list[i + 1] - t_list[i - 1]);
        let mut worst = 0.0f64;
        for (k, v) in u_t[i].finite_nodes() {
            if let (Some(a), Some(b)) = (u_t[i - 1].get(k), u_t[i + 1].get(k)) {
                worst = worst.max(lam * a + (1.0 - lam) * b - v);
            }
        }
        max_defect = max_defect.max(worst);
        concave.push(worst <= opts.concavity_tol * scale);
    }

    let r = opts.dual_radius;
    let dual = Grid::new([-r, -r], 2.0 * r / (opts.dual_n.max(2) - 1) as f64, opts.dual_n.max(2), opts.dual_n.max(2))?;
    let u_star: Vec<GridFunction> = u_t.par_iter().map(|u| legendre_transform(u, &dual)).collect::<Result<_>>()?;
    let mut min_gap = f64::INFINITY;
    for i in 0..u_star.len() - 1 {
        for (k, a) in u_star[i].finite_nodes() {
            if let Some(b) = u_star[i + 1].get(k) {
                min_gap = min_gap.min(a - b);
            }
        }
    }

    let time = TimeFunction::new(t_list, &u_t)?;
    let nt = t_list.len();
    let lattice: Vec<[f64; 3]> = (0..9)
        .flat_map(|i| (0..9).map(move |j| [r * (i as f64 / 8.0 - 0.5), r * (j as f64 / 8.0 - 0.5)]))
        .flat_map(|y| {
            let time = &time;
            (0..nt - 1).map(move |i| {
                let xi = 0.5 * (time.support(y, t_list[i]) + time.support(y, t_list[i + 1]));
                [y[0], y[1], xi]
            })
        })
        .collect();
    let k_samples: Vec<KSample> = lattice.par_iter().filter_map(|&p| time.sample(p)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (t_lo, t_hi) = (t_list[0], t_list[nt - 1]);
    let mut random_point = || {
        let y = [r * (rng.random::<f64>() - 0.5), r * (rng.random::<f64>() - 0.5)];
        let s = 0.02 + 0.96 * rng.random::<f64>();
        let (top, bottom) = (time.support(y, t_lo), time.support(y, t_hi));
        [y[0], y[1], bottom + s * (top - bottom)]
    };
    let segments: Vec<([f64; 3], [f64; 3])> = (0..opts.segments).map(|_| (random_point(), random_point())).collect();
    let defects: Vec<Option<f64>> = segments
        .par_iter()
        .map(|(a, b)| {
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])];
            let (ka, kb, km) = (time.time(*a)?, time.time(*b)?, time.time(m)?);
            Some(km - 0.5 * (ka + kb))
        })
        .collect();
    let k_tol = 1e-8 * (t_hi - t_lo).abs().max(1.0);
    let mut violations = 0;
    let mut max_k_defect = f64::NEG_INFINITY;
    for d in &defects {
        match d {
            Some(d) => {
                max_k_defect = max_k_defect.max(*d);
                if *d > k_tol {
                    violations += 1;
                }
            }
            None => violations += 1,
        }
    }

    let diagnostics = FoliationDiagnostics {
        monotone,
        strictly_monotone: strictly,
        concave,
        max_concavity_defect: max_defect,
        min_leaf_gap: min_gap,
        leaves_disjoint: min_gap > 0.0,
        k_segments: segments.len(),
        k_convexity_violations: violations,
        max_k_convexity_defect: max_k_defect,
    };
    Ok(FoliationResult { t_values: t_list.to_vec(), solutions, u_t, dual, u_star, k_samples, time, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma_solver::PlanarDomain;

    fn disk_zero() -> BoundaryFunction {
        BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 256, |_| Some(0.0)).unwrap()
    }

    #[test]
    fn disk_family_is_monotone_concave_and_k_convex() {
        let opts = FoliationOptions { segments: 60, dual_n: 33, ..Default::default() };
        let r = foliation(&disk_zero(), &[-1.0, 0.0, 1.0], 1.0 / 16.0, &opts).unwrap();
        let d = &r.diagnostics;
        assert!(d.monotone.iter().all(|&m| m) && d.strictly_monotone.iter().all(|&m| m));
        assert!(d.concave.iter().all(|&c| c), "{}", d.max_concavity_defect);
        assert!(d.leaves_disjoint, "{}", d.min_leaf_gap);
        assert_eq!(d.k_convexity_violations, 0, "{}", d.max_k_convexity_defect);
        let k0 = r.u_t[0].grid().node_at([0.0, 0.0], 1e-9).unwrap();
        for (u, t) in r.u_t.iter().zip(&r.t_values) {
            let w0 = r.solutions[0].w_omega.get(k0).unwrap();
            assert!((u.get(k0).unwrap() - (-t / 2.0).exp() * w0).abs() < 1e-8);
        }
    }

    #[test]
    fn time_function_inverts_a_single_leaf() {
        let opts = FoliationOptions { segments: 0, dual_n: 17, ..Default::default() };
        let r = foliation(&disk_zero(), &[-0.5, 0.0, 0.5], 1.0 / 16.0, &opts).unwrap();
        for (i, &t) in r.t_values.iter().enumerate() {
            let y = [0.3, -0.2];
            let xi = r.time.support(y, t);
            assert!((r.time.time([y[0], y[1], xi]).unwrap() - t).abs() < 1e-9);
            // H(., t_i) is the discrete conjugate of u_{t_i}
            let direct = crate::convex_core::conjugate_at(&r.u_t[i], y).unwrap();
            assert!((xi - direct).abs() < 1e-12);
        }
        let s = r.time.sample([0.0, 0.0, 1.0]).unwrap();
        assert!((s.log_k - 1.5 * s.t).abs() < 1e-15);
    }

    #[test]
    fn t_values_must_increase() {
        let e = foliation(&disk_zero(), &[0.0, 0.0, 1.0], 0.25, &Default::default());
        assert!(matches!(e, Err(Error::InvalidInput(_))));
    }
}
