//! Named boundary data used by the tests, the benches and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex_core::{BoundaryFunction, BoundarySample, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ma_solver::{cheng_yau, solver_grid, PlanarDomain};

/// Vertices of a triangle inscribed in the unit circle whose vertices are
/// nodes and whose sides follow lattice directions of every dyadic grid.
pub fn inscribed_triangle_vertices() -> [Point; 3] {
    [[0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]]
}

/// `0` at the vertices of the inscribed triangle, `+inf` elsewhere on the unit circle.
pub fn inscribed_triangle(n_background: usize) -> Result<BoundaryFunction> {
    BoundaryFunction::indicator(PlanarDomain::unit_disk(), &inscribed_triangle_vertices(), n_background)
}

/// Stadium `{dist(x, [(-1/2, 0), (1/2, 0)]) < 1/2}` with a triangle of
/// zeros: one vertex in the middle of the lower flat side, two on the caps.
/// Returns the data and the flat-side vertex.
pub fn stadium_counterexample(n_background: usize) -> Result<(BoundaryFunction, Point)> {
    let d = PlanarDomain::stadium([-0.5, 0.0], [0.5, 0.0], 0.5)?;
    let r = 0.5 / 2f64.sqrt();
    let flat = [0.0, -0.5];
    let pts = [flat, [0.5 + r, r], [-0.5 - r, r]];
    Ok((BoundaryFunction::indicator(d, &pts, n_background)?, flat))
}

/// `n_finite` values in `[-1/2, 1/2]` at random points of the unit circle
/// whose angular gaps stay below `pi`, `+inf` elsewhere.
pub fn random_phi(seed: u64, n_finite: usize, n_background: usize) -> Result<BoundaryFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let angles = loop {
        let mut a: Vec<f64> = (0..n_finite).map(|_| rng.random::<f64>() * tau).collect();
        a.sort_by(f64::total_cmp);
        let mut gaps: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.push(a[0] + tau - a[n_finite - 1]);
        if gaps.iter().all(|&g| g < 0.8 * std::f64::consts::PI && g > 0.3) {
            break a;
        }
    };
    let d = PlanarDomain::unit_disk();
    let finite: Vec<Point> = angles.iter().map(|t| [t.cos(), t.sin()]).collect();
    let mut samples: Vec<BoundarySample> = d
        .sample_boundary(n_background)
        .into_iter()
        .filter(|p| finite.iter().all(|q| crate::geom::dist(*p, *q) > 1e-9))
        .map(|p| BoundarySample { point: p, value: None })
        .collect();
    for p in finite {
        samples.push(BoundarySample { point: p, value: Some(rng.random::<f64>() - 0.5) });
    }
    BoundaryFunction::new(d, samples)
}

/// `w_Omega` of the unit disk restricted to the closed inscribed triangle,
/// paired with the data that vanishes at its vertices. The pair solves the
/// equation inside the triangle but misses the boundary behaviour.
pub fn remark_conditions(h: f64) -> Result<(GridFunction, BoundaryFunction)> {
    let d = PlanarDomain::unit_disk();
    let grid = solver_grid(&d, h)?;
    let (w, _) = cheng_yau(&d, &grid, &Default::default())?;
    let tri = PlanarDomain::polygon(inscribed_triangle_vertices().to_vec())?;
    let tol = 1e-12 * tri.diameter();
    let u = w.map_finite(|p, v| (tri.sdf(p) <= tol).then_some(v));
    Ok((u, inscribed_triangle(256)?))
}

/// `phi = 0` at `(+-1, 0)` on the unit circle and `+inf` elsewhere, with
/// `u(x) = -sqrt(1 - x1^2 - (dilation x2)^2)` on the ellipse touching the
/// circle at those two points. The graph of `u*` is the hyperboloid
/// stretched by `dilation` along the second axis.
pub fn trough(dilation: f64, h: f64) -> Result<(GridFunction, BoundaryFunction)> {
    if !(dilation >= 1.0) {
        return Err(Error::InvalidInput(format!("trough dilation must be at least 1, got {dilation}")));
    }
    let d = PlanarDomain::unit_disk();
    let grid = solver_grid(&d, h)?;
    let u = GridFunction::from_fn(grid, |p| {
        let s = 1.0 - p[0] * p[0] - (dilation * p[1]).powi(2);
        (s >= 0.0).then(|| -s.sqrt())
    });
    Ok((u, BoundaryFunction::indicator(d, &[[1.0, 0.0], [-1.0, 0.0]], 256)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_three_or_more_finite_samples() {
        assert_eq!(inscribed_triangle(64).unwrap().finite_count(), 3);
        let (s, flat) = stadium_counterexample(64).unwrap();
        assert_eq!(s.finite_count(), 3);
        assert!(s.domain().on_flat_part(flat));
        for seed in 0..5 {
            let phi = random_phi(seed, 5, 128).unwrap();
            assert_eq!(phi.finite_count(), 5);
            assert!(phi.hull_domain().is_ok());
            phi.validate().unwrap();
        }
    }

    #[test]
    fn random_data_is_reproducible() {
        assert_eq!(random_phi(7, 5, 64).unwrap(), random_phi(7, 5, 64).unwrap());
    }
}
