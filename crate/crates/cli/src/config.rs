//! Scenario configuration files.

use std::path::Path;

use anyhow::{bail, Context};
use cagc_core::cagc::{c_from_k, fixtures, k_from_c};
use cagc_core::convex_core::{BoundaryFunction, BoundarySample};
use cagc_core::ma_solver::{DomainSpec, PlanarDomain};
use cagc_core::Point;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: Option<DomainSpec>,
    pub phi: Option<PhiSpec>,
    pub c: Option<f64>,
    pub k: Option<f64>,
    pub t: Option<Vec<f64>>,
    /// Base resolution `1 / h`.
    #[serde(default = "default_grid")]
    pub grid: u32,
    /// Number of resolutions, doubling from `grid`.
    #[serde(default = "default_levels")]
    pub levels: u32,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Boundary samples for data given as a rule.
    #[serde(default = "default_background")]
    pub background: usize,
    #[serde(default)]
    pub mesh: bool,
    /// Boundary points where the growth exponent of `-w` is fitted.
    #[serde(default)]
    pub growth_points: Vec<Point>,
    pub blowup: Option<BlowupSpec>,
    #[serde(default)]
    pub foliation: FoliationSpec,
    /// Named check set for `verify`.
    pub fixture: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// `0` everywhere on the boundary.
    Zero,
    /// `a . x + b` on the boundary.
    Affine {
        a: Point,
        b: f64,
    },
    /// `0` at the points, `+inf` elsewhere.
    Indicator {
        points: Vec<Point>,
    },
    /// Explicit samples; `null` values are `+inf`.
    Samples {
        samples: Vec<SampleSpec>,
    },
    InscribedTriangle,
    StadiumCounterexample,
    Random {
        seed: u64,
        finite: usize,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub point: Point,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSpec {
    /// Boundary points of the hull; the vertices of the hull when absent.
    pub points: Option<Vec<Point>>,
    /// Marks the scenario as a counterexample: a finite classification exits with code 3.
    #[serde(default)]
    pub counterexample: bool,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoliationSpec {
    pub segments: Option<usize>,
    pub seed: Option<u64>,
    pub dual_radius: Option<f64>,
    pub dual_n: Option<usize>,
}

fn default_grid() -> u32 {
    32
}

fn default_levels() -> u32 {
    1
}

fn default_tol() -> f64 {
    1e-6
}

fn default_background() -> usize {
    256
}

/// Resolved boundary data.
pub struct Data {
    pub phi: BoundaryFunction,
    /// Flat-side vertex of the stadium counterexample.
    pub marked: Option<Point>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.grid < 8 || self.grid % 8 != 0 || !(self.grid / 8).is_power_of_two() {
            bail!("grid must be 8 times a power of two, got {}", self.grid);
        }
        if self.levels == 0 || self.levels > 6 {
            bail!("levels must be between 1 and 6, got {}", self.levels);
        }
        if !(self.tol > 0.0) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if self.c.is_some() && self.k.is_some() {
            bail!("give either c or k, not both");
        }
        for (name, v) in [("c", self.c), ("k", self.k)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    bail!("{name} must be positive, got {v}");
                }
            }
        }
        Ok(())
    }

    pub fn with_levels(mut self, levels: Option<u32>) -> anyhow::Result<Self> {
        if let Some(n) = levels {
            self.levels = n;
            self.validate()?;
        }
        Ok(self)
    }

    /// Spacings from coarsest to finest.
    pub fn spacings(&self) -> Vec<f64> {
        (0..self.levels).map(|i| 1.0 / (self.grid as f64 * 2f64.powi(i as i32))).collect()
    }

    pub fn c(&self) -> anyhow::Result<f64> {
        match (self.c, self.k) {
            (Some(c), _) => Ok(c),
            (None, Some(k)) => Ok(c_from_k(k)?),
            (None, None) => Ok(1.0),
        }
    }

    pub fn k(&self) -> anyhow::Result<f64> {
        Ok(k_from_c(self.c()?)?)
    }

    pub fn domain(&self) -> anyhow::Result<PlanarDomain> {
        let spec = self.domain.clone().context("config needs a domain")?;
        Ok(PlanarDomain::new(spec)?)
    }

    pub fn data(&self) -> anyhow::Result<Data> {
        let spec = self.phi.clone().unwrap_or(PhiSpec::Zero);
        let n = self.background;
        let plain = |phi| Ok(Data { phi, marked: None });
        match spec {
            PhiSpec::Zero => plain(BoundaryFunction::from_fn(self.domain()?, n, |_| Some(0.0))?),
            PhiSpec::Affine { a, b } => {
                plain(BoundaryFunction::from_fn(self.domain()?, n, |p| Some(a[0] * p[0] + a[1] * p[1] + b))?)
            }
            PhiSpec::Indicator { points } => plain(BoundaryFunction::indicator(self.domain()?, &points, n)?),
            PhiSpec::Samples { samples } => {
                let samples = samples.into_iter().map(|s| BoundarySample { point: s.point, value: s.value }).collect();
                plain(BoundaryFunction::new(self.domain()?, samples)?)
            }
            PhiSpec::InscribedTriangle => plain(fixtures::inscribed_triangle(n)?),
            PhiSpec::StadiumCounterexample => {
                let (phi, flat) = fixtures::stadium_counterexample(n)?;
                Ok(Data { phi, marked: Some(flat) })
            }
            PhiSpec::Random { seed, finite } => {
                if finite < 3 {
                    bail!("random data needs at least three finite samples");
                }
                plain(fixtures::random_phi(seed, finite, n)?)
            }
        }
    }
}
