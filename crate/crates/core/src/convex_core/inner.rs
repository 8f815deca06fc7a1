//! Inner-derivative diagnostics at boundary points of the effective domain.

use serde::Serialize;

use crate::convex_core::GridFunction;
use crate::error::{Error, Result};
use crate::geom::{self, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Finite,
    Infinite,
    Undetermined,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Finite => "finite",
            Self::Infinite => "infinite",
            Self::Undetermined => "undetermined",
        })
    }
}

/// Difference quotients along one refinement level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSlopes {
    pub h: f64,
    /// Parameters `t` of the geometric sequence, decreasing.
    pub t: Vec<f64>,
    pub slopes: Vec<f64>,
    /// Quotient at the resolution-coupled parameter `t_star ~ 4h / |x1 - x0|`.
    pub slope: f64,
    pub t_star: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InnerDerivativeReport {
    pub levels: Vec<LevelSlopes>,
    /// `slope_{l+1} / slope_l` for successive levels.
    pub ratios: Vec<f64>,
    /// Decay of the slope increments `d_{l+1} / d_l`.
    pub increment_ratios: Vec<f64>,
    /// Decay of the increments along the resolved parameters of the finest level.
    pub profile_decay: Option<f64>,
    pub classification: Classification,
}

#[derive(Clone, Copy, Debug)]
pub struct InnerDerivativeOptions {
    /// Relative variation below which slopes count as stabilised.
    pub stable_rtol: f64,
    /// Increment decay at or below which the sequence converges.
    pub finite_decay: f64,
    /// Increment decay at or above which the sequence diverges.
    pub infinite_decay: f64,
    /// Multiple of `h` for the resolution-coupled step.
    pub step_cells: f64,
}

impl Default for InnerDerivativeOptions {
    fn default() -> Self {
        Self { stable_rtol: 0.05, finite_decay: 0.85, infinite_decay: 0.9, step_cells: 4.0 }
    }
}

/// Difference quotients `(u(x0 + t(x1 - x0)) - u(x0)) / t` on each grid level.
///
/// `u0` is the value at `x0`; when `None` it is read from the finest level.
pub fn inner_derivative_slope(
    levels: &[GridFunction],
    x0: Point,
    x1: Point,
    u0: Option<f64>,
    opts: &InnerDerivativeOptions,
) -> Result<InnerDerivativeReport> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no refinement levels".into()));
    }
    let len = geom::dist(x0, x1);
    if len == 0.0 {
        return Err(Error::InvalidInput("x0 and x1 coincide".into()));
    }
    let mut out = Vec::with_capacity(levels.len());
    for u in levels {
        let h = u.grid().h;
        let base = match u0 {
            Some(v) => v,
            None => u.interpolate(x0).ok_or(Error::SegmentLeavesDomain)?,
        };
        u.interpolate(x1).ok_or(Error::SegmentLeavesDomain)?;
        let mut ts = Vec::new();
        let mut slopes = Vec::new();
        let mut slope = None;
        let k_star = ((len / (opts.step_cells * h)).log2().floor() as i32).max(0);
        for k in 0..=k_star + 2 {
            let t = 0.5f64.powi(k);
            let p = geom::lerp(x0, x1, t);
            let v = match u.interpolate(p) {
                Some(v) => v,
                None if k > k_star => break,
                None => return Err(Error::SegmentLeavesDomain),
            };
            let s = (v - base) / t;
            ts.push(t);
            slopes.push(s);
            if k == k_star {
                slope = Some(s);
            }
        }
        let t_star = 0.5f64.powi(k_star);
        out.push(LevelSlopes { h, t: ts, slopes, slope: slope.ok_or(Error::SegmentLeavesDomain)?, t_star });
    }
    Ok(classify(out, opts))
}

fn classify(levels: Vec<LevelSlopes>, opts: &InnerDerivativeOptions) -> InnerDerivativeReport {
    let s: Vec<f64> = levels.iter().map(|l| l.slope).collect();
    let ratios: Vec<f64> = s.windows(2).map(|w| w[1] / w[0]).collect();
    let d: Vec<f64> = s.windows(2).map(|w| w[0] - w[1]).collect();
    let increment_ratios: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
    let profile_decay = levels.iter().min_by(|a, b| a.h.total_cmp(&b.h)).and_then(profile_decay);
    let n = s.len();
    let scale = s.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let stable = n >= 3
        && (0..n - 1).skip(n - 3).all(|i| (s[i + 1] - s[i]).abs() <= opts.stable_rtol * s[i].abs().max(1e-3 * scale));
    let decreasing = d.iter().all(|&x| x > 0.0);
    let classification = if n < 3 {
        Classification::Undetermined
    } else if stable || profile_decay == Some(0.0) {
        Classification::Finite
    } else if profile_decay.is_some_and(|q| q >= opts.infinite_decay)
        || (decreasing && increment_ratios.iter().all(|&q| q >= opts.infinite_decay))
    {
        Classification::Infinite
    } else if profile_decay.is_some_and(|q| q <= opts.finite_decay) {
        Classification::Finite
    } else {
        Classification::Undetermined
    };
    InnerDerivativeReport { levels, ratios, increment_ratios, profile_decay, classification }
}

/// Geometric mean of the last two decay ratios of the slope increments over
/// the resolved parameters of one level; `0` when the slopes are constant.
fn profile_decay(level: &LevelSlopes) -> Option<f64> {
    let resolved: Vec<f64> =
        level.t.iter().zip(&level.slopes).filter(|(&t, _)| t >= level.t_star).map(|(_, &s)| s).collect();
    if resolved.len() < 4 {
        return None;
    }
    let scale = resolved.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let e: Vec<f64> = resolved.windows(2).map(|w| w[0] - w[1]).collect();
    if e.iter().all(|x| x.abs() <= 1e-12 * scale) {
        return Some(0.0);
    }
    let m = e.len();
    let (q1, q2) = (e[m - 2] / e[m - 3], e[m - 1] / e[m - 2]);
    if !(q1 > 0.0 && q2 > 0.0) {
        return None;
    }
    Some((q1 * q2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_core::Grid;

    fn disk_levels(f: impl Fn(Point) -> f64 + Copy) -> Vec<GridFunction> {
        [16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&n| {
                let g = Grid::covering([-1.0, -1.0], [1.0, 1.0], 1.0 / n, 1).unwrap();
                GridFunction::from_fn(g, |p| (p[0] * p[0] + p[1] * p[1] <= 1.0).then(|| f(p)))
            })
            .collect()
    }

    #[test]
    fn hemisphere_diverges() {
        let levels = disk_levels(|p| -(1.0 - p[0] * p[0] - p[1] * p[1]).max(0.0).sqrt());
        let r = inner_derivative_slope(&levels, [1.0, 0.0], [0.0, 0.0], Some(0.0), &Default::default()).unwrap();
        assert_eq!(r.classification, Classification::Infinite);
        // slopes scale like t^{-1/2}: halving t multiplies the slope by about sqrt 2
        for q in &r.ratios {
            assert!((q - 2f64.sqrt()).abs() < 0.05, "{q}");
        }
        assert!(r.levels.windows(2).all(|w| w[1].slope < w[0].slope));
    }

    #[test]
    fn affine_is_finite() {
        let levels = disk_levels(|p| 2.0 * p[0] - p[1] + 0.5);
        let r = inner_derivative_slope(&levels, [0.0, -1.0], [0.3, 0.2], None, &Default::default()).unwrap();
        assert_eq!(r.classification, Classification::Finite);
        for l in &r.levels {
            for s in &l.slopes {
                assert!((s - (2.0 * 0.3 - 1.2)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn power_profile_with_convergent_slopes_is_finite() {
        // u = -x1 + x1^{4/3} near x0 = 0 along x1: slopes converge like t^{1/3}
        let levels = disk_levels(|p| {
            let s = p[0] + 1.0;
            -s + s.powf(4.0 / 3.0)
        });
        let r = inner_derivative_slope(&levels, [-1.0, 0.0], [0.0, 0.0], Some(0.0), &Default::default()).unwrap();
        assert_eq!(r.classification, Classification::Finite);
    }

    #[test]
    fn leaving_the_domain_is_an_error() {
        let levels = disk_levels(|_| 0.0);
        let r = inner_derivative_slope(&levels, [1.0, 0.0], [2.0, 0.0], Some(0.0), &Default::default());
        assert!(matches!(r, Err(Error::SegmentLeavesDomain)));
    }
}
