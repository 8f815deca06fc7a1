//! Named regression fixtures with pass/fail summaries.

use anyhow::anyhow;
use cagc_core::cagc::{blowup_diagnostic, fixtures, two_step_solve, TwoStepProblem};
use cagc_core::convex_core::{BoundaryFunction, Classification};
use cagc_core::geometry3d::{
    asymptotic_surface_domain, cagc_check, conormal_check, minkowski_curvature, solution_invariants, AsymptoticVerdict,
};
use cagc_core::io::fmt_f64;
use cagc_core::ma_solver::PlanarDomain;
use serde::Serialize;

use crate::commands::{CAGC_RTOL, CONORMAL_TOL};
use crate::config::ScenarioConfig;
use crate::output::Output;
use crate::status::{Classify, Failure, Outcome};

pub const FIXTURES: [&str; 4] = ["hyperboloid", "trough", "remark", "stadium"];

/// Largest `|K - 1|` of the Minkowski curvature accepted on the inner half of
/// the hyperboloid.
const MINKOWSKI_TOL: f64 = 0.05;
/// Stretch of the trough fixture.
const TROUGH_DILATION: f64 = 2.0;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }
}

#[derive(Debug, Serialize)]
struct Summary {
    fixture: String,
    h: Vec<f64>,
    checks: Vec<Check>,
    /// Classification at the flat-side vertex of the stadium.
    classification: Option<Classification>,
}

fn verdict_detail(v: &AsymptoticVerdict) -> String {
    let gaps: Vec<String> = v.dual_gaps.iter().map(|g| format!("{g:.4}")).collect();
    format!("dual gaps [{}]", gaps.join(", "))
}

fn hyperboloid(h: f64) -> Result<Vec<Check>, Failure> {
    let phi = BoundaryFunction::from_fn(PlanarDomain::unit_disk(), 256, |_| Some(0.0)).usage()?;
    let sol = two_step_solve(&TwoStepProblem::new(phi.clone(), 1.0, h).usage()?, &Default::default()).solver()?;
    let surface = solution_invariants(&sol).solver()?;
    let cagc = cagc_check(&surface, 1.0, CAGC_RTOL);
    let conormal = conormal_check(&surface, CONORMAL_TOL);
    let verdict = asymptotic_surface_domain(&sol.u, &phi, &Default::default()).solver()?;
    let curvature = minkowski_curvature(&surface);
    let (_, inradius) = sol.hull.inscribed_disk();
    let mut worst = 0.0f64;
    let mut counted = 0;
    for (s, k) in surface.samples.iter().zip(&curvature) {
        if let (true, Some(k)) = (sol.hull.sdf(s.x) < -0.5 * inradius, k) {
            worst = worst.max((k - 1.0).abs());
            counted += 1;
        }
    }
    Ok(vec![
        Check::new(
            "cagc",
            cagc.pass,
            format!("max |det S - 1| = {} over {} samples", fmt_f64(cagc.max_deviation), cagc.checked),
        ),
        Check::new(
            "conormal",
            conormal.checked > 0 && conormal.fraction >= 0.99,
            format!("{} of {} samples", conormal.satisfied, conormal.checked),
        ),
        Check::new("asymptotic", verdict.asymptotic, verdict_detail(&verdict)),
        Check::new(
            "minkowski_curvature",
            counted > 0 && worst <= MINKOWSKI_TOL,
            format!("max |K - 1| = {} over {counted} samples", fmt_f64(worst)),
        ),
    ])
}

fn not_asymptotic(name: &str, u: &cagc_core::GridFunction, phi: &BoundaryFunction) -> Result<Vec<Check>, Failure> {
    let v = asymptotic_surface_domain(u, phi, &Default::default()).solver()?;
    let label = if v.asymptotic { "asymptotic" } else { "not asymptotic" };
    Ok(vec![Check::new(name, !v.asymptotic, format!("{label}: {}", verdict_detail(&v)))])
}

pub fn cmd_verify(fixture: &str, cfg: &ScenarioConfig, out: &Output) -> Result<Outcome, Failure> {
    let spacings = cfg.spacings();
    let h = *spacings.last().expect("at least one level");
    let mut classification = None;
    let (checks, h_list) = match fixture {
        "hyperboloid" => (hyperboloid(h)?, vec![h]),
        "trough" => {
            let (u, phi) = fixtures::trough(TROUGH_DILATION, h).usage()?;
            (not_asymptotic("trough", &u, &phi)?, vec![h])
        }
        "remark" => {
            let (u, phi) = fixtures::remark_conditions(h).solver()?;
            (not_asymptotic("remark", &u, &phi)?, vec![h])
        }
        "stadium" => {
            let base = cfg.grid as f64;
            let hs: Vec<f64> = (0..3).map(|i| 1.0 / (base * 2f64.powi(i))).collect();
            let (phi, flat) = fixtures::stadium_counterexample(cfg.background).usage()?;
            let mut sols = Vec::new();
            for &h in &hs {
                sols.push(
                    two_step_solve(&TwoStepProblem::new(phi.clone(), 1.0, h).usage()?, &Default::default()).solver()?,
                );
            }
            let r = blowup_diagnostic(&sols, flat, &Default::default()).solver()?;
            classification = Some(r.classification);
            let slopes: Vec<String> = r.inner.levels.iter().map(|l| format!("{:.4}", l.slope)).collect();
            let detail = format!("{} at the flat-side vertex, slopes [{}]", r.classification, slopes.join(", "));
            (vec![Check::new("stadium_finite", r.classification == Classification::Finite, detail)], hs)
        }
        other => {
            return Err(Failure::Usage(anyhow!("unknown fixture {other:?}; known: {}", FIXTURES.join(", "))));
        }
    };
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let all = checks.iter().all(|c| c.pass);
    let summary = Summary { fixture: fixture.into(), h: h_list, checks, classification };
    out.json("verify.json", &summary).usage()?;
    Ok(match (fixture, all) {
        ("stadium", true) => Outcome::Counterexample("finite inner derivative at the flat-side vertex".into()),
        (_, true) => Outcome::Pass,
        (_, false) => Outcome::Fail(format!("fixture {fixture} failed")),
    })
}
