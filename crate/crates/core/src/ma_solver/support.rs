//! Closed-form Cheng-Yau support functions of balls and simplices.

use faer::linalg::solvers::Solve;
use faer::{Col, Mat};

use crate::error::{Error, Result};

/// Normalising constant of the simplex support function in dimension two.
pub const LAMBDA_2: f64 = 0.09622504486493763;

fn outside(x: &[f64]) -> Error {
    Error::PointOutsideDomain(x.first().copied().unwrap_or(f64::NAN), x.get(1).copied().unwrap_or(0.0))
}

/// `w(x) = -R^{-1/(n+1)} sqrt(R^2 - |x - x1|^2)` on the closed ball `B(x1, R)`.
#[derive(Clone, Debug)]
pub struct BallSupport {
    radius: f64,
    center: Vec<f64>,
    factor: f64,
}

impl BallSupport {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.center.len() {
            return Err(Error::InvalidInput(format!("expected a point in R^{}", self.center.len())));
        }
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum();
        let gap = self.radius * self.radius - r2;
        let tol = 1e-12 * self.radius * self.radius;
        if gap < -tol {
            return Err(outside(x));
        }
        if gap <= tol {
            return Ok(0.0);
        }
        Ok(-self.factor * gap.sqrt())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

pub fn support_ball(radius: f64, center: &[f64], n: usize) -> Result<BallSupport> {
    if !(radius > 0.0) {
        return Err(Error::NonPositive { name: "radius", value: radius });
    }
    if center.len() != n || n == 0 {
        return Err(Error::InvalidInput(format!("center must lie in R^{n}")));
    }
    Ok(BallSupport { radius, center: center.to_vec(), factor: radius.powf(-1.0 / (n as f64 + 1.0)) })
}

/// `w(x) = -(vol / Lambda * t_0 ... t_n)^{1/(n+1)}` with barycentric `t_i`.
#[derive(Clone, Debug)]
pub struct SimplexSupport {
    n: usize,
    volume: f64,
    lambda: f64,
    lu: faer::linalg::solvers::PartialPivLu<f64>,
}

impl SimplexSupport {
    /// Barycentric coordinates `t_i(x) = dist(x, P_i) / dist(x_i, P_i)`, signed.
    pub fn barycentric(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if x.len() != n {
            return Err(Error::InvalidInput(format!("expected a point in R^{n}")));
        }
        let rhs = Col::<f64>::from_fn(n + 1, |i| if i < n { x[i] } else { 1.0 });
        let t = self.lu.solve(&rhs);
        Ok((0..=n).map(|i| t[i]).collect())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let t = self.barycentric(x)?;
        let tol = 1e-12;
        if t.iter().any(|&v| v < -tol) {
            return Err(outside(x));
        }
        if t.iter().any(|&v| v <= tol) {
            return Ok(0.0);
        }
        let prod: f64 = t.iter().product();
        Ok(-(self.volume / self.lambda * prod).powf(1.0 / (self.n as f64 + 1.0)))
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }
}

pub fn support_simplex(vertices: &[Vec<f64>], n: usize, lambda: f64) -> Result<SimplexSupport> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositive { name: "lambda", value: lambda });
    }
    if n == 0 || vertices.len() != n + 1 || vertices.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidInput(format!("a simplex in R^{n} needs {} vertices", n + 1)));
    }
    let m = Mat::<f64>::from_fn(n + 1, n + 1, |i, j| if i < n { vertices[j][i] } else { 1.0 });
    let det = m.as_ref().determinant();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let volume = det.abs() / fact;
    let scale = vertices.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
    if volume <= 1e-14 * scale.powi(n as i32) {
        return Err(Error::InvalidDomain("degenerate simplex".into()));
    }
    Ok(SimplexSupport { n, volume, lambda, lu: m.partial_piv_lu() })
}
