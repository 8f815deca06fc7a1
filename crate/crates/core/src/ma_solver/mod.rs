//! Dirichlet Monge-Ampere and Cheng-Yau solvers on convex planar domains.

mod checks;
mod cheng_yau;
mod dirichlet;
mod domain;
mod newton;
mod stencil;
mod support;

pub use checks::{
    boundary_growth_check, compare_support_functions, domain_monotonicity_check, fit_slope, GrowthReport,
    MonotonicityReport,
};
pub use cheng_yau::{cheng_yau, ChengYauMethod, ChengYauOptions, MIN_INTERIOR_NODES};
pub use dirichlet::{boundary_envelope, solve_dirichlet, solver_grid, DirichletOptions, PointFn};
pub use domain::{BoundaryPiece, DomainSpec, ExteriorCircle, PlanarDomain};
pub use newton::{SolveReport, SolverOptions, Source};
pub use stencil::{
    centered_second_difference, ma_operator, ma_operator_with, Arm, Discretization, NodeRole, SecondDifference,
    StencilSet, Target,
};
pub use support::{support_ball, support_simplex, BallSupport, SimplexSupport, LAMBDA_2};

pub(crate) use dirichlet::{envelope_at, solve_on};
