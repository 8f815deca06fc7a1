//! Cones, regular domains and constant affine curvature surfaces in `R^3`.

mod asymptotic;
mod cone;
mod export;
mod regular;
mod scaling;
mod surface;

pub use asymptotic::{asymptotic_surface_domain, AsymptoticVerdict, DualGapOptions};
pub use cone::{omega_from_cone, ProperCone, POLAR_DIRECTIONS};
pub use export::{write_obj, write_vertex_scalars};
pub use regular::{regular_domain, RegularDomainModel};
pub use scaling::{minkowski_curvature_relation, scaling_shape_operator};
pub use surface::{
    affine_invariants, affine_invariants_on, affine_invariants_with, affine_sphere_fit, cagc_check, conormal_check,
    legendre_map_surface, minkowski_curvature, solution_invariants, AffineData, AffineSphereFit, AffineSurface,
    CagcReport, ConormalReport, Determinant, Mat2, SurfaceSample, Vec3,
};
