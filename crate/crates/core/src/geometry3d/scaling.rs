use crate::error::{Error, Result};

fn check(name: &'static str, v: f64, n: usize) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::NonPositive { name, value: v });
    }
    if n == 0 {
        return Err(Error::NonPositive { name: "dimension", value: 0.0 });
    }
    Ok(())
}

/// Shape operator factor `lambda^{-2(n+1)/(n+2)}` of the `lambda`-scaled
/// unit-shape affine sphere in `R^{n+1}`.
pub fn scaling_shape_operator(lambda: f64, n: usize) -> Result<f64> {
    check("lambda", lambda, n)?;
    let n = n as f64;
    Ok(lambda.powf(-2.0 * (n + 1.0) / (n + 2.0)))
}

/// Classical Gaussian curvature `k^{(n+2)/(2n+2)}` in Minkowski space of a
/// surface with constant affine Gaussian curvature `k`.
pub fn minkowski_curvature_relation(k: f64, n: usize) -> Result<f64> {
    check("k", k, n)?;
    let n = n as f64;
    Ok(k.powf((n + 2.0) / (2.0 * n + 2.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_values() {
        assert_eq!(scaling_shape_operator(1.0, 2).unwrap(), 1.0);
        assert!((scaling_shape_operator(4.0, 2).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(minkowski_curvature_relation(1.0, 2).unwrap(), 1.0);
        assert!((minkowski_curvature_relation(8.0, 2).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn scaled_sphere_consistency() {
        // the sphere scaled by k^{1/(2(n+1))} has shape factor k^{-1/(n+2)}
        let k: f64 = 64.0;
        let lambda = k.powf(1.0 / 6.0);
        assert!((lambda - 2.0).abs() < 1e-14);
        let s = scaling_shape_operator(lambda, 2).unwrap();
        assert!((s - 2f64.powf(-1.5)).abs() < 1e-15);
        assert!((s - k.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_arguments() {
        assert!(matches!(scaling_shape_operator(0.0, 2), Err(Error::NonPositive { .. })));
        assert!(matches!(minkowski_curvature_relation(-1.0, 2), Err(Error::NonPositive { .. })));
        assert!(minkowski_curvature_relation(1.0, 0).is_err());
    }
}
