use crate::convex_core::{convex_envelope, legendre_transform, point_conjugate, BoundaryFunction, Grid, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;

/// Strict epigraph `D = {(y, eta) | eta > env phi*(y)}`, the intersection of
/// the open half-spaces `eta > x . y - xi` over finite samples `(x, xi)`.
#[derive(Clone, Debug)]
pub struct RegularDomainModel {
    /// `env phi*` on the dual grid, conjugated from the gridded envelope.
    pub boundary: GridFunction,
    /// `(x, xi)` with `phi(x) = xi` finite.
    pub generators: Vec<(Point, f64)>,
    /// Whether the hull of `dom phi` has interior.
    pub proper: bool,
}

impl RegularDomainModel {
    /// `env phi*(y)`, exact from the generators.
    pub fn height(&self, y: Point) -> f64 {
        let (pts, vals): (Vec<Point>, Vec<f64>) = self.generators.iter().copied().unzip();
        point_conjugate(&pts, &vals, y).expect("at least one generator")
    }

    pub fn contains(&self, p: [f64; 3]) -> bool {
        p[2] > self.height([p[0], p[1]])
    }
}

/// Builds the domain generated by `phi`. The envelope is sampled on `primal`
/// and conjugated onto `dual`.
pub fn regular_domain(phi: &BoundaryFunction, primal: &Grid, dual: &Grid) -> Result<RegularDomainModel> {
    let generators: Vec<(Point, f64)> = phi.finite_samples().collect();
    if generators.is_empty() {
        return Err(Error::AllInfinite);
    }
    let proper = phi.hull_domain().is_ok();
    let boundary = if proper {
        legendre_transform(&convex_envelope(phi, primal)?, dual)?
    } else {
        let (pts, vals): (Vec<Point>, Vec<f64>) = generators.iter().copied().unzip();
        GridFunction::from_fn(*dual, |y| point_conjugate(&pts, &vals, y))
    };
    Ok(RegularDomainModel { boundary, generators, proper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_core::BoundarySample;
    use crate::ma_solver::PlanarDomain;

    fn grids() -> (Grid, Grid) {
        (
            Grid::covering([-1.0, -1.0], [1.0, 1.0], 1.0 / 32.0, 1).unwrap(),
            Grid::new([-3.0, -3.0], 0.25, 25, 25).unwrap(),
        )
    }

    #[test]
    fn zero_data_gives_the_cone() {
        let (p, d) = grids();
        let phi = BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 256, |_| Some(0.0)).unwrap();
        let m = regular_domain(&phi, &p, &d).unwrap();
        assert!(m.proper);
        let sag = 1.0 - (std::f64::consts::PI / 256.0).cos();
        for (k, v) in m.boundary.finite_nodes() {
            let y = d.point_of(k);
            let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
            // envelope nodes reach within a grid diagonal of the boundary
            assert!(v <= r + 1e-12 && v >= r * (1.0 - 2.0 * sag - 2.0 * p.h) - 1e-12, "{y:?} {v} {r}");
            assert!((m.height(y) - r).abs() <= r * sag + 1e-12);
        }
        assert!(m.contains([0.0, 0.0, 1e-3]));
        assert!(m.contains([0.6, 0.8, 1.01]));
        assert!(!m.contains([0.6, 0.8, 0.99]));
    }

    #[test]
    fn trough_data_is_improper() {
        let (p, d) = grids();
        let phi = BoundaryFunction::indicator(PlanarDomain::unit_disk(), &[[1.0, 0.0], [-1.0, 0.0]], 128).unwrap();
        let m = regular_domain(&phi, &p, &d).unwrap();
        assert!(!m.proper);
        for (k, v) in m.boundary.finite_nodes() {
            let y = d.point_of(k);
            assert!((v - y[0].abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn one_finite_sample_is_a_half_space() {
        let (p, d) = grids();
        let disk = PlanarDomain::unit_disk();
        let x0 = [0.6, 0.8];
        let samples = disk
            .sample_boundary(64)
            .into_iter()
            .map(|q| BoundarySample { point: q, value: None })
            .chain(std::iter::once(BoundarySample { point: x0, value: Some(0.25) }))
            .collect();
        let phi = BoundaryFunction::new(disk, samples).unwrap();
        let m = regular_domain(&phi, &p, &d).unwrap();
        assert!(!m.proper);
        for (k, v) in m.boundary.finite_nodes() {
            let y = d.point_of(k);
            assert!((v - (x0[0] * y[0] + x0[1] * y[1] - 0.25)).abs() < 1e-14);
        }
        let none = BoundaryFunction::indicator(PlanarDomain::unit_disk(), &[], 32).unwrap();
        assert!(matches!(regular_domain(&none, &p, &d), Err(Error::AllInfinite)));
    }
}
