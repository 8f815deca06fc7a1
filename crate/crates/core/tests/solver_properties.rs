use cagc_core::ma_solver::{solve_dirichlet, solver_grid, PlanarDomain};
use cagc_core::Point;
use proptest::prelude::*;

fn square() -> PlanarDomain {
    PlanarDomain::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, failure_persistence: None, ..ProptestConfig::default() })]

    /// More mass and lower boundary values push the solution down.
    #[test]
    fn comparison_principle(
        disk in any::<bool>(),
        r0 in 0.2f64..2.0,
        r1 in -1.0f64..1.0,
        extra in 0.0f64..1.5,
        b in prop::array::uniform4(-1.0f64..1.0),
        drop in 0.0f64..0.5,
    ) {
        let domain = if disk { PlanarDomain::unit_disk() } else { square() };
        let grid = solver_grid(&domain, 1.0 / 16.0).unwrap();
        let small = move |p: Point| r0 + 0.5 * r1.abs() * (1.0 + r1.signum() * p[0]);
        let big = move |p: Point| small(p) + extra * (1.0 + p[1] * p[1]);
        let upper = move |p: Point| b[0] * p[0] + b[1] * p[1] + b[2] * p[0] * p[1] + b[3];
        let lower = move |p: Point| upper(p) - drop * (2.0 - p[0] * p[0]);
        let (u1, r1s) = solve_dirichlet(&domain, &grid, &big, &lower, &Default::default()).unwrap();
        let (u2, r2s) = solve_dirichlet(&domain, &grid, &small, &upper, &Default::default()).unwrap();
        prop_assert!(r1s.converged && r2s.converged);
        for (k, v) in u1.finite_nodes() {
            let w = u2.get(k).unwrap();
            prop_assert!(v <= w + 1e-9, "node {}: {} > {}", k, v, w);
        }
    }
}
