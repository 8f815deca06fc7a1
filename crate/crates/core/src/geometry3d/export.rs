use std::io::{self, Write};

use super::surface::AffineSurface;
use crate::io::fmt_f64;

/// ASCII Wavefront OBJ of the surface mesh. Vertices follow sample order.
pub fn write_obj<W: Write>(surface: &AffineSurface, out: &mut W) -> io::Result<()> {
    for s in &surface.samples {
        let p = s.position;
        writeln!(out, "v {} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]))?;
    }
    for f in &surface.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

/// Per-vertex `det S` and curvature keyed by the one-based OBJ vertex index.
pub fn write_vertex_scalars<W: Write>(
    surface: &AffineSurface,
    curvature: &[Option<f64>],
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "vertex,det_s,curvature")?;
    for (i, s) in surface.samples.iter().enumerate() {
        let det_s = s.affine.as_ref().map_or(f64::NAN, |a| a.det_s);
        let k = curvature.get(i).copied().flatten().unwrap_or(f64::NAN);
        writeln!(out, "{},{},{}", i + 1, fmt_f64(det_s), fmt_f64(k))?;
    }
    Ok(())
}
