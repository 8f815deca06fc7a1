//! Wide-stencil monotone discretization of `det D^2 u` on a convex domain.
//!
//! Each unknown node sees a fixed family of orthogonal lattice direction
//! pairs. Along every direction the second difference uses the neighbouring
//! nodes when they lie inside the domain and the exact boundary crossing
//! otherwise, so arms may be shorter than the lattice vector.

use rayon::prelude::*;

use crate::convex_core::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::{add, scale, Point};
use crate::ma_solver::PlanarDomain;

/// Orthogonal lattice direction pairs of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilSet {
    pairs: Vec<([i64; 2], [i64; 2])>,
}

impl StencilSet {
    /// Eight pairs reaching three lattice steps: axes, diagonals, and the
    /// (2,1), (3,1), (3,2) families in both orientations.
    pub fn standard() -> Self {
        Self {
            pairs: vec![
                ([1, 0], [0, 1]),
                ([1, 1], [-1, 1]),
                ([2, 1], [-1, 2]),
                ([1, 2], [-2, 1]),
                ([3, 1], [-1, 3]),
                ([1, 3], [-3, 1]),
                ([3, 2], [-2, 3]),
                ([2, 3], [-3, 2]),
            ],
        }
    }

    /// The standard pairs plus the (4,1) and (4,3) families, reaching four steps.
    pub fn extended() -> Self {
        let mut s = Self::standard();
        s.pairs.extend([([4, 1], [-1, 4]), ([1, 4], [-4, 1]), ([4, 3], [-3, 4]), ([3, 4], [-4, 3])]);
        s
    }

    /// Axis and diagonal pairs only.
    pub fn compact() -> Self {
        Self { pairs: vec![([1, 0], [0, 1]), ([1, 1], [-1, 1])] }
    }

    pub fn new(pairs: Vec<([i64; 2], [i64; 2])>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("stencil needs at least one direction pair".into()));
        }
        for (a, b) in &pairs {
            let dot = a[0] * b[0] + a[1] * b[1];
            let la = a[0] * a[0] + a[1] * a[1];
            let lb = b[0] * b[0] + b[1] * b[1];
            if dot != 0 || la != lb || la == 0 {
                return Err(Error::InvalidInput(format!("pair {a:?}, {b:?} is not orthogonal of equal length")));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[([i64; 2], [i64; 2])] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Largest coordinate offset used.
    pub fn width(&self) -> i64 {
        self.pairs.iter().flat_map(|(a, b)| [a[0].abs(), a[1].abs(), b[0].abs(), b[1].abs()]).max().unwrap_or(0)
    }

    /// Directions in the order `pair 0 first, pair 0 second, pair 1 first, ...`.
    pub fn directions(&self) -> impl Iterator<Item = [i64; 2]> + '_ {
        self.pairs.iter().flat_map(|(a, b)| [*a, *b])
    }
}

impl Default for StencilSet {
    fn default() -> Self {
        Self::standard()
    }
}

/// Centered second difference of `u` along the lattice vector `d` at node
/// `k`, normalized to a unit direction. `None` when an endpoint is `+inf`
/// or off the grid.
pub fn centered_second_difference(u: &GridFunction, k: usize, d: [i64; 2]) -> Option<f64> {
    let g = u.grid();
    let f = u.get(g.offset(k, d[0], d[1])?)?;
    let b = u.get(g.offset(k, -d[0], -d[1])?)?;
    let c = u.get(k)?;
    let l2 = (d[0] * d[0] + d[1] * d[1]) as f64 * g.h * g.h;
    Some((f + b - 2.0 * c) / l2)
}

/// Wide-stencil Monge-Ampere value at an interior node of a grid function:
/// the minimum over direction pairs of the product of the positive parts of
/// the two centered second differences.
pub fn ma_operator_with(u: &GridFunction, k: usize, stencil: &StencilSet) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (a, b) in stencil.pairs() {
        let da = centered_second_difference(u, k, *a).ok_or(Error::StencilOutOfDomain { node: k })?;
        let db = centered_second_difference(u, k, *b).ok_or(Error::StencilOutOfDomain { node: k })?;
        best = best.min(da.max(0.0) * db.max(0.0));
    }
    Ok(best)
}

/// [`ma_operator_with`] using the standard eight-pair stencil.
pub fn ma_operator(u: &GridFunction, k: usize) -> Result<f64> {
    ma_operator_with(u, k, &StencilSet::standard())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Target {
    Unknown(u32),
    Known(u32),
}

/// One side of a second difference: where it ends and how long it is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arm {
    pub target: Target,
    pub len: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeRole {
    Outside,
    /// Closed-domain node with prescribed value (on or within `eps h` of the boundary).
    Known(u32),
    Unknown(u32),
}

/// Unknowns, known boundary points and stencil arms of a grid over a domain.
#[derive(Clone, Debug)]
pub struct Discretization {
    grid: Grid,
    stencil: StencilSet,
    roles: Vec<NodeRole>,
    unknown_nodes: Vec<usize>,
    known_points: Vec<Point>,
    arms: Vec<Arm>,
}

/// Second difference along one direction: value and the coefficients on
/// the center, forward and backward values.
#[derive(Clone, Copy, Debug)]
pub struct SecondDifference {
    pub value: f64,
    pub c_center: f64,
    pub c_fwd: f64,
    pub c_bwd: f64,
}

impl Discretization {
    /// Nodes closer than `boundary_eps * h` to the boundary are treated as
    /// known boundary nodes.
    pub fn new(domain: &PlanarDomain, grid: Grid, stencil: StencilSet, boundary_eps: f64) -> Self {
        let h = grid.h;
        let closed_tol = 1e-12 * domain.diameter().max(1.0);
        let mut roles = vec![NodeRole::Outside; grid.len()];
        let mut unknown_nodes = Vec::new();
        let mut known_points = Vec::new();
        for (k, role) in roles.iter_mut().enumerate() {
            let p = grid.point_of(k);
            let s = domain.sdf(p);
            if s < -boundary_eps * h {
                *role = NodeRole::Unknown(unknown_nodes.len() as u32);
                unknown_nodes.push(k);
            } else if s <= closed_tol {
                *role = NodeRole::Known(known_points.len() as u32);
                known_points.push(p);
            }
        }
        let dirs: Vec<[i64; 2]> = stencil.directions().collect();
        let per_node: Vec<Vec<(Arm, Option<Point>)>> = unknown_nodes
            .par_iter()
            .map(|&k| {
                let x = grid.point_of(k);
                let mut out = Vec::with_capacity(2 * dirs.len());
                for d in &dirs {
                    for sgn in [1i64, -1] {
                        let v = [(sgn * d[0]) as f64 * h, (sgn * d[1]) as f64 * h];
                        let full = (v[0] * v[0] + v[1] * v[1]).sqrt();
                        let nb = grid.offset(k, sgn * d[0], sgn * d[1]);
                        let arm = match nb.map(|n| roles[n]) {
                            Some(NodeRole::Unknown(id)) => (Arm { target: Target::Unknown(id), len: full }, None),
                            other => match domain.ray_exit(x, v, 1.0) {
                                Some(t) => (
                                    Arm { target: Target::Known(u32::MAX), len: (t * full).max(1e-300) },
                                    Some(add(x, scale(v, t))),
                                ),
                                None => match other {
                                    Some(NodeRole::Known(id)) => (Arm { target: Target::Known(id), len: full }, None),
                                    // the lattice neighbour is inside but the grid ends first
                                    _ => (Arm { target: Target::Known(u32::MAX), len: full }, Some(add(x, v))),
                                },
                            },
                        };
                        out.push(arm);
                    }
                }
                out
            })
            .collect();
        let mut arms = Vec::with_capacity(unknown_nodes.len() * 2 * dirs.len());
        for node_arms in per_node {
            for (mut arm, point) in node_arms {
                if let Some(p) = point {
                    arm.target = Target::Known(known_points.len() as u32);
                    known_points.push(p);
                }
                arms.push(arm);
            }
        }
        Self { grid, stencil, roles, unknown_nodes, known_points, arms }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn stencil(&self) -> &StencilSet {
        &self.stencil
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn unknown_count(&self) -> usize {
        self.unknown_nodes.len()
    }

    pub fn unknown_nodes(&self) -> &[usize] {
        &self.unknown_nodes
    }

    pub fn known_points(&self) -> &[Point] {
        &self.known_points
    }

    /// Arms of unknown `i`: for direction `d` (in [`StencilSet::directions`]
    /// order), forward then backward.
    #[inline]
    pub fn arms(&self, i: usize) -> &[Arm] {
        let m = 4 * self.stencil.len();
        &self.arms[i * m..(i + 1) * m]
    }

    #[inline]
    fn value(target: Target, u: &[f64], known: &[f64]) -> f64 {
        match target {
            Target::Unknown(j) => u[j as usize],
            Target::Known(j) => known[j as usize],
        }
    }

    /// Second difference at unknown `i` along direction `d` with the center
    /// value `center`.
    #[inline]
    pub fn second_difference(&self, i: usize, d: usize, center: f64, u: &[f64], known: &[f64]) -> SecondDifference {
        let arms = self.arms(i);
        let f = arms[2 * d];
        let b = arms[2 * d + 1];
        let uf = Self::value(f.target, u, known);
        let ub = Self::value(b.target, u, known);
        let s = 2.0 / (f.len + b.len);
        let c_fwd = s / f.len;
        let c_bwd = s / b.len;
        SecondDifference {
            value: c_fwd * (uf - center) + c_bwd * (ub - center),
            c_center: -(c_fwd + c_bwd),
            c_fwd,
            c_bwd,
        }
    }

    /// Monge-Ampere value `min over pairs of D_a^+ D_b^+` at unknown `i`.
    pub fn ma_value(&self, i: usize, u: &[f64], known: &[f64]) -> f64 {
        let c = u[i];
        (0..self.stencil.len())
            .map(|p| {
                let a = self.second_difference(i, 2 * p, c, u, known).value;
                let b = self.second_difference(i, 2 * p + 1, c, u, known).value;
                a.max(0.0) * b.max(0.0)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest second difference over all directions at unknown `i`.
    pub fn min_second_difference(&self, i: usize, u: &[f64], known: &[f64]) -> f64 {
        let c = u[i];
        (0..2 * self.stencil.len())
            .map(|d| self.second_difference(i, d, c, u, known).value)
            .fold(f64::INFINITY, f64::min)
    }

    /// Values at the known points from boundary data.
    pub fn known_values(&self, boundary: &(dyn Fn(Point) -> f64 + Sync)) -> Vec<f64> {
        self.known_points.par_iter().map(|&p| boundary(p)).collect()
    }

    /// Assembles a grid function: solved values at unknowns, boundary data at
    /// known nodes, `+inf` outside the closed domain.
    pub fn to_grid_function(&self, u: &[f64], known: &[f64]) -> GridFunction {
        let mut g = GridFunction::infinite(self.grid);
        for (k, role) in self.roles.iter().enumerate() {
            match *role {
                NodeRole::Unknown(i) => g.set(k, Some(u[i as usize])),
                NodeRole::Known(j) => g.set(k, Some(known[j as usize])),
                NodeRole::Outside => {}
            }
        }
        g
    }

    /// Unknown values read back from a grid function; unknowns missing
    /// there fall back to `fallback`.
    pub fn unknowns_from(&self, g: &GridFunction, fallback: impl Fn(Point) -> f64) -> Vec<f64> {
        self.unknown_nodes
            .iter()
            .map(|&k| {
                let p = self.grid.point_of(k);
                if g.grid() == &self.grid {
                    g.get(k).unwrap_or_else(|| fallback(p))
                } else {
                    g.interpolate(p).unwrap_or_else(|| fallback(p))
                }
            })
            .collect()
    }
}
