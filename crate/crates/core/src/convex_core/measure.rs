//! Monge-Ampere measure of grid functions.

use rayon::prelude::*;

use crate::convex_core::GridFunction;
use crate::error::{Error, Result};
use crate::geom::{self, Point};

const WINDOW: i64 = 2;

/// Subgradient cell of node `k` from all finite nodes in the surrounding
/// 5x5 window. `None` unless the eight nearest neighbours are finite.
pub fn subgradient_cell(u: &GridFunction, k: usize) -> Option<Vec<Point>> {
    let g = u.grid();
    let u0 = u.get(k)?;
    for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)] {
        u.get(g.offset(k, di, dj)?)?;
    }
    let mut planes = Vec::with_capacity(24);
    let mut scale = 1.0f64;
    for dj in -WINDOW..=WINDOW {
        for di in -WINDOW..=WINDOW {
            if di == 0 && dj == 0 {
                continue;
            }
            let Some(n) = g.offset(k, di, dj) else {
                continue;
            };
            let Some(v) = u.get(n) else { continue };
            let d = [di as f64 * g.h, dj as f64 * g.h];
            scale = scale.max(((v - u0) / (g.h * (di.abs() + dj.abs()) as f64)).abs());
            planes.push((d, v - u0));
        }
    }
    let b = 4.0 * scale;
    Some(geom::halfplane_intersection(&planes, [-b, -b], [b, b]))
}

/// Total area of the subgradient cells of the nodes in `region`.
///
/// Cells are disjoint for discretely convex data up to window truncation, so
/// the sum approximates the area of the union.
pub fn ma_measure(u: &GridFunction, region: &[usize]) -> Result<f64> {
    let areas: Result<Vec<f64>> = region
        .par_iter()
        .map(|&k| {
            let cell = subgradient_cell(u, k).ok_or(Error::RegionOutsideDomain { node: k })?;
            Ok(if cell.len() < 3 { 0.0 } else { geom::polygon_area(&cell) })
        })
        .collect();
    Ok(areas?.iter().sum())
}

/// Nodes whose eight neighbours are all finite.
pub fn interior_nodes(u: &GridFunction) -> Vec<usize> {
    let g = u.grid();
    (0..g.len())
        .filter(|&k| {
            u.is_finite_at(k)
                && [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)]
                    .iter()
                    .all(|&(di, dj)| g.offset(k, di, dj).is_some_and(|n| u.is_finite_at(n)))
        })
        .collect()
}
