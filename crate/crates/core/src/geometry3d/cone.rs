use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geom::{self, Point};
use crate::ma_solver::{DomainSpec, PlanarDomain};

/// Number of support directions used for sections without an exact polar.
pub const POLAR_DIRECTIONS: usize = 720;

/// Proper convex cone `{(t x, t) | x in C0, t > 0}` in `R^3`, stored by its
/// section `C0` at height one.
#[derive(Clone, Debug, PartialEq)]
pub struct ProperCone {
    section: PlanarDomain,
}

impl ProperCone {
    /// The section must be a bounded convex domain with the origin inside.
    pub fn new(section: PlanarDomain) -> Result<Self> {
        if !section.contains([0.0, 0.0]) {
            return Err(Error::DegenerateCone);
        }
        Ok(Self { section })
    }

    /// Future light cone `z > sqrt(x^2 + y^2)`.
    pub fn light_cone() -> Self {
        Self { section: PlanarDomain::unit_disk() }
    }

    pub fn section(&self) -> &PlanarDomain {
        &self.section
    }

    /// Whether `p` lies in the open cone.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        p[2] > 0.0 && self.section.contains([p[0] / p[2], p[1] / p[2]])
    }

    /// `-C0` as a cone section.
    pub fn reflected(&self) -> Result<Self> {
        let spec = match self.section.spec() {
            DomainSpec::Disk { center, radius } => DomainSpec::Disk { center: neg(*center), radius: *radius },
            DomainSpec::Polygon { vertices } => {
                DomainSpec::Polygon { vertices: vertices.iter().map(|&v| neg(v)).collect() }
            }
            DomainSpec::Stadium { a, b, radius } => DomainSpec::Stadium { a: neg(*a), b: neg(*b), radius: *radius },
            DomainSpec::Rounded { vertices, radius } => {
                DomainSpec::Rounded { vertices: vertices.iter().map(|&v| neg(v)).collect(), radius: *radius }
            }
            DomainSpec::Smooth { angles, support } => DomainSpec::Smooth {
                angles: angles.iter().map(|a| a + std::f64::consts::PI).collect(),
                support: support.clone(),
            },
        };
        Self::new(PlanarDomain::new(spec)?)
    }
}

fn neg(p: Point) -> Point {
    [-p[0], -p[1]]
}

/// `Omega = {x | x . y < 1 for all y in C0}`, the negated dual section.
///
/// Polygons and disks centred at the origin map to exact polygons and disks.
/// Other sections go through the support function `1 / rho_C0` sampled on
/// [`POLAR_DIRECTIONS`] directions.
pub fn omega_from_cone(cone: &ProperCone) -> Result<PlanarDomain> {
    let c0 = cone.section();
    let degenerate = |_| Error::DegenerateCone;
    match c0.spec() {
        DomainSpec::Disk { center, radius } if geom::norm(*center) == 0.0 => {
            PlanarDomain::disk([0.0, 0.0], 1.0 / radius).map_err(degenerate)
        }
        _ if c0.is_polygon() => {
            let planes: Vec<(Point, f64)> = c0
                .core()
                .iter()
                .map(|&v| {
                    let r = geom::norm(v);
                    (geom::scale(v, 1.0 / r), 1.0 / r)
                })
                .collect();
            let big = 4.0 / inradius_about_origin(c0);
            let poly = geom::halfplane_intersection(&planes, [-big, -big], [big, big]);
            PlanarDomain::polygon(geom::convex_hull(&poly)).map_err(degenerate)
        }
        _ => {
            let reach = 2.0 * c0.diameter();
            let mut angles = Vec::with_capacity(POLAR_DIRECTIONS);
            let mut support = Vec::with_capacity(POLAR_DIRECTIONS);
            for k in 0..POLAR_DIRECTIONS {
                let a = TAU * k as f64 / POLAR_DIRECTIONS as f64;
                let rho = c0.ray_exit([0.0, 0.0], [a.cos(), a.sin()], reach).ok_or(Error::DegenerateCone)?;
                if !(rho > 0.0) {
                    return Err(Error::DegenerateCone);
                }
                angles.push(a);
                support.push(1.0 / rho);
            }
            PlanarDomain::new(DomainSpec::Smooth { angles, support }).map_err(degenerate)
        }
    }
}

fn inradius_about_origin(d: &PlanarDomain) -> f64 {
    -d.sdf([0.0, 0.0])
}
