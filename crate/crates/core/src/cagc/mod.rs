//! The two-step Monge-Ampere problem `det D^2 u = c w_Omega^{-4}`, `u = phi`
//! on the boundary, and the foliation by its solutions.

mod diagnostics;
pub mod fixtures;
mod foliation;
mod two_step;

pub use diagnostics::{
    asymptotic_check, blowup_diagnostic, hull_support, sandwich_check, AsymptoticReport, BlowupReport, SandwichReport,
};
pub use foliation::{foliation, FoliationDiagnostics, FoliationOptions, FoliationResult, KSample, TimeFunction};
pub use two_step::{
    c_from_k, k_from_c, two_step_solve, two_step_solve_with, ExhaustionLevel, TwoStepOptions, TwoStepProblem,
    TwoStepSolution,
};
