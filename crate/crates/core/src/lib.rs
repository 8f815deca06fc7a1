//! Numerical toolkit for the two-step Monge-Ampere equation
//! `det D^2 u = c w^{-4}` and constant affine Gaussian curvature surfaces.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cagc;
pub mod convex_core;
pub mod error;
pub mod geom;
pub mod geometry3d;
pub mod io;
pub mod ma_solver;

pub use convex_core::{BoundaryFunction, Grid, GridFunction};
pub use error::{Error, Result};
pub use geom::Point;
pub use ma_solver::{PlanarDomain, SolveReport};
