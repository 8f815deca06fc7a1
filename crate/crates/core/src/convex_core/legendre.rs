//! Discrete Legendre–Fenchel transform.

use rayon::prelude::*;

use crate::convex_core::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;

/// One-dimensional conjugate `g(y) = max_i (x_i y - v_i)` of samples sorted by
/// `x`, evaluated at increasing `ys`.
pub fn conjugate_1d(xs: &[f64], vs: &[f64], ys: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), vs.len());
    if xs.is_empty() {
        return vec![f64::NEG_INFINITY; ys.len()];
    }
    let hull = lower_hull(xs, vs);
    let m = hull.len();
    let mut out = Vec::with_capacity(ys.len());
    let mut k = 0;
    let f = |i: usize, y: f64| xs[i] * y - vs[i];
    for &y in ys {
        while k + 1 < m && f(hull[k + 1], y) >= f(hull[k], y) {
            k += 1;
        }
        while k > 0 && f(hull[k - 1], y) > f(hull[k], y) {
            k -= 1;
        }
        // neighbouring hull vertices guard against rounding in the walk
        let mut best = f(hull[k], y);
        if k + 1 < m {
            best = best.max(f(hull[k + 1], y));
        }
        if k > 0 {
            best = best.max(f(hull[k - 1], y));
        }
        out.push(best);
    }
    out
}

fn lower_hull(xs: &[f64], vs: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        if let Some(&last) = hull.last() {
            if xs[last] == xs[i] {
                if vs[i] < vs[last] {
                    hull.pop();
                } else {
                    continue;
                }
            }
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (vs[i] - vs[a]) - (xs[i] - xs[a]) * (vs[b] - vs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `u*(y) = max_x (x·y - u(x))` over the finite nodes of `u`, sampled on `dual`.
pub fn legendre_transform(u: &GridFunction, dual: &Grid) -> Result<GridFunction> {
    if u.count_finite() == 0 {
        return Err(Error::AllInfinite);
    }
    let g = *u.grid();
    let y1: Vec<f64> = (0..dual.nx).map(|i| dual.point(i, 0)[0]).collect();
    let y2: Vec<f64> = (0..dual.ny).map(|j| dual.point(0, j)[1]).collect();
    // row pass: for every primal row j, conjugate in x1 at every dual y1
    let rows: Vec<Option<(f64, Vec<f64>)>> = (0..g.ny)
        .into_par_iter()
        .map(|j| {
            let mut xs = Vec::new();
            let mut vs = Vec::new();
            for i in 0..g.nx {
                if let Some(v) = u.get_ij(i, j) {
                    xs.push(g.point(i, j)[0]);
                    vs.push(v);
                }
            }
            if xs.is_empty() {
                None
            } else {
                Some((g.point(0, j)[1], conjugate_1d(&xs, &vs, &y1)))
            }
        })
        .collect();
    let rows: Vec<(f64, Vec<f64>)> = rows.into_iter().flatten().collect();
    let x2: Vec<f64> = rows.iter().map(|r| r.0).collect();
    // column pass: max_j (x2_j y2 + g_j(y1)) = conjugate of (x2_j, -g_j(y1))
    let cols: Vec<Vec<f64>> = (0..dual.nx)
        .into_par_iter()
        .map(|i| {
            let vs: Vec<f64> = rows.iter().map(|r| -r.1[i]).collect();
            conjugate_1d(&x2, &vs, &y2)
        })
        .collect();
    let mut values = vec![None; dual.len()];
    for (i, col) in cols.iter().enumerate() {
        for (j, &v) in col.iter().enumerate() {
            values[dual.index(i, j)] = Some(v);
        }
    }
    GridFunction::from_options(*dual, values)
}

/// Conjugate of finitely many point samples at a single dual point.
pub fn point_conjugate(points: &[Point], values: &[f64], y: Point) -> Option<f64> {
    points
        .iter()
        .zip(values)
        .map(|(p, v)| p[0] * y[0] + p[1] * y[1] - v)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
}

/// Conjugate of a grid function at a single dual point by direct maximisation.
pub fn conjugate_at(u: &GridFunction, y: Point) -> Option<f64> {
    let g = u.grid();
    u.finite_nodes()
        .map(|(k, v)| {
            let x = g.point_of(k);
            x[0] * y[0] + x[1] * y[1] - v
        })
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
}
