use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

/// Uniform Cartesian lattice `origin + (i h, j h)`, `0 <= i < nx`, `0 <= j < ny`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::NonPositive { name: "grid spacing", value: h });
        }
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidInput("grid must have at least one node per axis".into()));
        }
        if !origin[0].is_finite() || !origin[1].is_finite() {
            return Err(Error::InvalidInput("grid origin must be finite".into()));
        }
        Ok(Self { origin, h, nx, ny })
    }

    /// Grid with nodes on the lattice `h Z^2` covering the box `[lo, hi]`
    /// plus `pad` extra layers. Refinements by powers of two share nodes.
    pub fn covering(lo: Point, hi: Point, h: f64, pad: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::NonPositive { name: "grid spacing", value: h });
        }
        let i0 = (lo[0] / h).floor() as i64 - pad as i64;
        let j0 = (lo[1] / h).floor() as i64 - pad as i64;
        let i1 = (hi[0] / h).ceil() as i64 + pad as i64;
        let j1 = (hi[1] / h).ceil() as i64 + pad as i64;
        Self::new([i0 as f64 * h, j0 as f64 * h], h, (i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn point(&self, i: usize, j: usize) -> Point {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    #[inline]
    pub fn point_of(&self, k: usize) -> Point {
        let (i, j) = self.ij(k);
        self.point(i, j)
    }

    /// Node index reached from `k` by the integer offset `(di, dj)`.
    #[inline]
    pub fn offset(&self, k: usize, di: i64, dj: i64) -> Option<usize> {
        let (i, j) = self.ij(k);
        let ii = i as i64 + di;
        let jj = j as i64 + dj;
        if ii < 0 || jj < 0 || ii >= self.nx as i64 || jj >= self.ny as i64 {
            None
        } else {
            Some(self.index(ii as usize, jj as usize))
        }
    }

    /// Nearest node, if `p` lies within half a cell of the lattice box.
    pub fn nearest(&self, p: Point) -> Option<usize> {
        let fi = ((p[0] - self.origin[0]) / self.h).round();
        let fj = ((p[1] - self.origin[1]) / self.h).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some(self.index(fi as usize, fj as usize))
    }

    /// Node index when `p` coincides with a node up to `tol * h`.
    pub fn node_at(&self, p: Point, tol: f64) -> Option<usize> {
        let k = self.nearest(p)?;
        let q = self.point_of(k);
        ((q[0] - p[0]).abs() <= tol * self.h && (q[1] - p[1]).abs() <= tol * self.h).then_some(k)
    }

    pub fn upper(&self) -> Point {
        self.point(self.nx - 1, self.ny - 1)
    }
}

/// Stored at nodes outside the effective domain. Kernels branch on the mask
/// and never read it.
pub const INFINITY_SENTINEL: f64 = f64::INFINITY;

/// Extended-real function sampled on a [`Grid`]; `None` stands for `+inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GridFunction {
    pub fn infinite(grid: Grid) -> Self {
        Self { values: vec![INFINITY_SENTINEL; grid.len()], mask: vec![false; grid.len()], grid }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(Point) -> Option<f64>) -> Self {
        let mut g = Self::infinite(grid);
        for k in 0..grid.len() {
            g.set(k, f(grid.point_of(k)));
        }
        g
    }

    pub fn from_options(grid: Grid, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        let mut g = Self::infinite(grid);
        for (k, v) in values.into_iter().enumerate() {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::InvalidInput(format!("non-finite value at node {k}")));
                }
            }
            g.set(k, v);
        }
        Ok(g)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, k: usize) -> Option<f64> {
        self.mask[k].then(|| self.values[k])
    }

    #[inline]
    pub fn get_ij(&self, i: usize, j: usize) -> Option<f64> {
        self.get(self.grid.index(i, j))
    }

    #[inline]
    pub fn is_finite_at(&self, k: usize) -> bool {
        self.mask[k]
    }

    /// # Panics
    /// If `Some(v)` carries a non-finite float.
    #[inline]
    pub fn set(&mut self, k: usize, v: Option<f64>) {
        match v {
            Some(x) => {
                assert!(x.is_finite(), "finite value expected at node {k}, got {x}");
                self.values[k] = x;
                self.mask[k] = true;
            }
            None => {
                self.values[k] = INFINITY_SENTINEL;
                self.mask[k] = false;
            }
        }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Raw storage; entries where the mask is false hold the sentinel.
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub fn finite_nodes(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.values.len()).filter(|&k| self.mask[k]).map(|k| (k, self.values[k]))
    }

    pub fn count_finite(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Maximum absolute finite value, at least 1.
    pub fn scale(&self) -> f64 {
        self.finite_nodes().fold(1.0f64, |m, (_, v)| m.max(v.abs()))
    }

    pub fn min_finite(&self) -> Option<(usize, f64)> {
        self.finite_nodes().fold(None, |best: Option<(usize, f64)>, (k, v)| match best {
            Some((_, b)) if b <= v => best,
            _ => Some((k, v)),
        })
    }

    pub fn map_finite(&self, f: impl Fn(Point, f64) -> Option<f64>) -> Self {
        let mut out = Self::infinite(self.grid);
        for (k, v) in self.finite_nodes() {
            out.set(k, f(self.grid.point_of(k), v));
        }
        out
    }

    /// Largest midpoint-convexity defect `u(m) - (u(a) + u(b)) / 2` over
    /// axis-aligned and diagonal node triples with all three values finite.
    pub fn convexity_defect(&self) -> f64 {
        const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
        let mut worst = f64::NEG_INFINITY;
        for (k, v) in self.finite_nodes() {
            for &(di, dj) in &DIRS {
                let (Some(a), Some(b)) = (self.grid.offset(k, di, dj), self.grid.offset(k, -di, -dj)) else {
                    continue;
                };
                if let (Some(ua), Some(ub)) = (self.get(a), self.get(b)) {
                    worst = worst.max(v - 0.5 * (ua + ub));
                }
            }
        }
        worst
    }

    /// Midpoint convexity at relative tolerance `rtol` of the value scale.
    pub fn is_convex(&self, rtol: f64) -> bool {
        self.convexity_defect() <= rtol * self.scale()
    }

    /// Piecewise-linear interpolation on the cell containing `p`.
    ///
    /// Uses bilinear weights when all four corners are finite and falls back
    /// to either triangle of the cell. `None` when no finite triangle covers
    /// `p`.
    pub fn interpolate(&self, p: Point) -> Option<f64> {
        let g = &self.grid;
        let fx = (p[0] - g.origin[0]) / g.h;
        let fy = (p[1] - g.origin[1]) / g.h;
        let eps = 1e-9;
        if fx < -eps || fy < -eps || fx > (g.nx - 1) as f64 + eps || fy > (g.ny - 1) as f64 + eps {
            return None;
        }
        let i = (fx.floor().max(0.0) as usize).min(g.nx.saturating_sub(2));
        let j = (fy.floor().max(0.0) as usize).min(g.ny.saturating_sub(2));
        if g.nx < 2 || g.ny < 2 {
            return g.node_at(p, 1e-9).and_then(|k| self.get(k));
        }
        let s = (fx - i as f64).clamp(0.0, 1.0);
        let t = (fy - j as f64).clamp(0.0, 1.0);
        let c00 = self.get_ij(i, j);
        let c10 = self.get_ij(i + 1, j);
        let c01 = self.get_ij(i, j + 1);
        let c11 = self.get_ij(i + 1, j + 1);
        if let (Some(a), Some(b), Some(c), Some(d)) = (c00, c10, c01, c11) {
            return Some(a * (1.0 - s) * (1.0 - t) + b * s * (1.0 - t) + c * (1.0 - s) * t + d * s * t);
        }
        // the four triangles cut by the two diagonals
        let tris: [([Option<f64>; 3], [f64; 3]); 4] = [
            ([c00, c10, c01], [1.0 - s - t, s, t]),
            ([c11, c01, c10], [s + t - 1.0, 1.0 - s, 1.0 - t]),
            ([c00, c10, c11], [1.0 - s, s - t, t]),
            ([c00, c11, c01], [1.0 - t, s, t - s]),
        ];
        for (vals, w) in tris {
            if w.iter().all(|&x| x >= -eps) {
                if let [Some(a), Some(b), Some(c)] = vals {
                    return Some(a * w[0] + b * w[1] + c * w[2]);
                }
            }
        }
        if s.min(1.0 - s).min(t).min(1.0 - t) <= eps {
            return g.node_at(p, 1e-6).and_then(|k| self.get(k));
        }
        None
    }

    pub fn to_file(&self) -> GridFunctionFile {
        GridFunctionFile {
            origin: self.grid.origin,
            h: self.grid.h,
            nx: self.grid.nx,
            ny: self.grid.ny,
            values: (0..self.grid.len()).map(|k| self.get(k)).collect(),
            mask: self.mask.clone(),
        }
    }

    pub fn from_file(file: GridFunctionFile) -> Result<Self> {
        let grid = Grid::new(file.origin, file.h, file.nx, file.ny)?;
        if file.mask.len() != grid.len() {
            return Err(Error::InvalidInput("mask length does not match grid".into()));
        }
        for (k, (v, m)) in file.values.iter().zip(&file.mask).enumerate() {
            if v.is_some() != *m {
                return Err(Error::InvalidInput(format!("mask disagrees with value at node {k}")));
            }
        }
        Self::from_options(grid, file.values)
    }
}

/// On-disk JSON layout; `+inf` is written as `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionFile {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<Option<f64>>,
    pub mask: Vec<bool>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_grid(n: usize) -> Grid {
        Grid::covering([-1.0, -1.0], [1.0, 1.0], 2.0 / n as f64, 0).unwrap()
    }

    #[test]
    fn covering_grids_share_nodes_under_refinement() {
        let a = Grid::covering([-0.3, 0.1], [0.7, 0.9], 0.125, 1).unwrap();
        let b = Grid::covering([-0.3, 0.1], [0.7, 0.9], 0.0625, 1).unwrap();
        for k in 0..a.len() {
            let p = a.point_of(k);
            if p[0] >= b.origin[0] && p[1] >= b.origin[1] && p[0] <= b.upper()[0] && p[1] <= b.upper()[1] {
                assert!(b.node_at(p, 1e-12).is_some());
            }
        }
    }

    #[test]
    fn mask_tracks_finiteness() {
        let g = unit_grid(8);
        let f = GridFunction::from_fn(g, |p| (p[0] >= 0.0).then(|| p[0] * p[0]));
        for k in 0..g.len() {
            assert_eq!(f.mask()[k], f.get(k).is_some());
            if !f.mask()[k] {
                assert_eq!(f.raw_values()[k], INFINITY_SENTINEL);
            }
        }
    }

    #[test]
    fn convexity_check_detects_concave_bump() {
        let g = unit_grid(16);
        let convex = GridFunction::from_fn(g, |p| Some(p[0] * p[0] + 0.5 * p[1] * p[1]));
        assert!(convex.is_convex(1e-9));
        let concave = GridFunction::from_fn(g, |p| Some(-(p[0] * p[0])));
        assert!(!concave.is_convex(1e-9));
    }

    #[test]
    fn interpolation_reproduces_affine_functions() {
        let g = unit_grid(8);
        let f = GridFunction::from_fn(g, |p| Some(2.0 * p[0] - p[1] + 0.25));
        for &p in &[[0.1, 0.33], [-0.9, 0.91], [0.0, 0.0]] {
            let v = f.interpolate(p).unwrap();
            assert!((v - (2.0 * p[0] - p[1] + 0.25)).abs() < 1e-13);
        }
        assert!(f.interpolate([3.0, 0.0]).is_none());
    }

    #[test]
    fn json_file_uses_null_for_infinity() {
        let g = Grid::new([0.0, 0.0], 0.5, 2, 1).unwrap();
        let f = GridFunction::from_options(g, vec![Some(1.5), None]).unwrap();
        let s = serde_json::to_string(&f.to_file()).unwrap();
        assert!(s.contains("null"));
        let back: GridFunctionFile = serde_json::from_str(&s).unwrap();
        assert_eq!(GridFunction::from_file(back).unwrap(), f);
    }

    #[test]
    fn inconsistent_file_is_rejected() {
        let file = GridFunctionFile {
            origin: [0.0, 0.0],
            h: 1.0,
            nx: 2,
            ny: 1,
            values: vec![Some(1.0), None],
            mask: vec![true, true],
        };
        assert!(GridFunction::from_file(file).is_err());
    }
}
