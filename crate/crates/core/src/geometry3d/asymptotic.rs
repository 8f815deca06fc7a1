use std::f64::consts::TAU;

use serde::Serialize;

use crate::cagc::{asymptotic_check, AsymptoticReport};
use crate::convex_core::{conjugate_at, point_conjugate, BoundaryFunction, GridFunction};
use crate::error::{Error, Result};
use crate::geom::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct DualGapOptions {
    /// Increasing radii of the dual circles.
    pub radii: Vec<f64>,
    pub directions: usize,
    /// Largest gap at the outermost radius still counted as asymptotic.
    pub eps_dual: f64,
}

impl Default for DualGapOptions {
    fn default() -> Self {
        Self { radii: vec![2.0, 4.0, 8.0, 16.0], directions: 64, eps_dual: 0.05 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticVerdict {
    pub asymptotic: bool,
    pub radii: Vec<f64>,
    /// `max (u* - env phi*)` over the circle of each radius.
    pub dual_gaps: Vec<f64>,
    /// Primal collar gap, when the hull of `dom phi` has interior.
    pub primal: Option<AsymptoticReport>,
}

/// Whether the surface `graph u*` is asymptotic to the boundary of the
/// domain generated by `phi`: the dual gap must decrease along the radii and
/// end below `eps_dual`.
pub fn asymptotic_surface_domain(
    u: &GridFunction,
    phi: &BoundaryFunction,
    opts: &DualGapOptions,
) -> Result<AsymptoticVerdict> {
    let (pts, vals): (Vec<Point>, Vec<f64>) = phi.finite_samples().unzip();
    if pts.is_empty() || u.count_finite() == 0 {
        return Err(Error::AllInfinite);
    }
    if opts.radii.is_empty() || opts.directions == 0 {
        return Err(Error::InvalidInput("dual gap needs radii and directions".into()));
    }
    let dual_gaps: Vec<f64> = opts
        .radii
        .iter()
        .map(|&r| {
            (0..opts.directions)
                .map(|i| {
                    let a = TAU * i as f64 / opts.directions as f64;
                    let y = [r * a.cos(), r * a.sin()];
                    conjugate_at(u, y).unwrap() - point_conjugate(&pts, &vals, y).unwrap()
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let decreasing = dual_gaps.windows(2).all(|w| w[1] < w[0]);
    let last = *dual_gaps.last().unwrap();
    let primal = asymptotic_check(u, phi).ok();
    Ok(AsymptoticVerdict {
        asymptotic: decreasing && last < opts.eps_dual,
        radii: opts.radii.clone(),
        dual_gaps,
        primal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cagc::fixtures;
    use crate::ma_solver::{cheng_yau, solver_grid, PlanarDomain};

    #[test]
    fn disk_support_function_is_asymptotic() {
        let d = PlanarDomain::unit_disk();
        let grid = solver_grid(&d, 1.0 / 64.0).unwrap();
        let (w, _) = cheng_yau(&d, &grid, &Default::default()).unwrap();
        let phi = BoundaryFunction::from_fn(d, 256, |_| Some(0.0)).unwrap();
        let v = asymptotic_surface_domain(&w, &phi, &Default::default()).unwrap();
        assert!(v.asymptotic, "{v:?}");
        assert!(v.primal.is_some());
    }

    #[test]
    fn trough_surface_is_not_asymptotic() {
        let (u, phi) = fixtures::trough(2.0, 1.0 / 32.0).unwrap();
        let v = asymptotic_surface_domain(&u, &phi, &Default::default()).unwrap();
        assert!(!v.asymptotic);
        // the gap grows like R / dilation along the second axis
        let last = *v.dual_gaps.last().unwrap();
        assert!(last > 0.4 * 16.0 && last < 0.5 * 16.0 + 1e-9, "{v:?}");
    }

    #[test]
    fn restricted_support_function_is_not_asymptotic() {
        let (u, phi) = fixtures::remark_conditions(1.0 / 32.0).unwrap();
        let v = asymptotic_surface_domain(&u, &phi, &Default::default()).unwrap();
        assert!(!v.asymptotic);
        assert!(v.dual_gaps.iter().all(|g| *g > 0.5), "{v:?}");
    }
}
