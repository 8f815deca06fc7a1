//! Extended-real convex functions on grids.

mod boundary;
mod envelope;
mod grid;
mod inner;
mod legendre;
mod measure;
mod subgradient;

pub use boundary::{BoundaryFunction, BoundarySample};
pub use envelope::{convex_envelope, Envelope};
pub use grid::{Grid, GridFunction, GridFunctionFile, INFINITY_SENTINEL};
pub use inner::{inner_derivative_slope, Classification, InnerDerivativeOptions, InnerDerivativeReport, LevelSlopes};
pub use legendre::{conjugate_1d, conjugate_at, legendre_transform, point_conjugate};
pub use measure::{interior_nodes, ma_measure, subgradient_cell};
pub use subgradient::{subgradients, subgradients_with, SubgradientSet};
