//! Solvers for the weighted Hermite–Einstein equation on the model:
//! closed-form and elliptic solves for line bundles, the perturbed
//! continuity method for higher rank with its monitors and
//! destabilizer extraction, the weighted Donaldson functional, and the
//! inequality/identity reports.

mod continuity;
mod donaldson;
mod laplace;
mod line;
pub(crate) mod newton;
mod reports;

pub use continuity::{
    continuity_run, perturbed_operator, weight_deformation_run, ContinuityEngine,
    ContinuityState, DeformationStep, InitialMetric, SolveOutcome, SolveStatus,
};
pub use donaldson::{
    donaldson_derivative, donaldson_functional, geodesic, geodesic_log, DonaldsonEvaluation,
};
pub use laplace::weighted_laplace_solve;
pub use line::line_bundle_whe;
pub use reports::{
    extension_soliton_check, lubke_report, vortex_residual, yang_mills_report,
    ExtensionSolitonReport, LubkeReport, VortexInput, VortexReport, YangMillsReport,
};

use serde::{Deserialize, Serialize};

/// Configuration of the continuity method.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Grid size for the solver run.
    pub grid: usize,
    /// Newton residual tolerance per epsilon step (sup Frobenius of `L_ε`).
    pub newton_tol: f64,
    /// Convergence tolerance on the unperturbed residual `L_0`.
    pub converge_tol: f64,
    /// Geometric ratio of the epsilon schedule.
    pub eps_ratio: f64,
    /// Floor of the epsilon schedule.
    pub eps_floor: f64,
    /// Blow-up threshold on `m_ε = max |log f|`.
    pub blowup_m_max: f64,
    /// Max Newton iterations per epsilon step.
    pub max_newton_iters: usize,
    /// Max accepted epsilon steps.
    pub max_steps: usize,
    /// Slope slack when validating an extracted destabilizer.
    pub tau_slope: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: 48,
            newton_tol: 1e-11,
            converge_tol: 1e-9,
            eps_ratio: 0.7,
            eps_floor: 1e-6,
            blowup_m_max: 25.0,
            max_newton_iters: 40,
            max_steps: 250,
            tau_slope: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        let ok = self.grid >= 8
            && self.newton_tol > 0.0
            && self.converge_tol > 0.0
            && self.eps_ratio > 0.0
            && self.eps_ratio < 1.0
            && self.eps_floor > 0.0
            && self.eps_floor <= 1.0
            && self.blowup_m_max > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::error::CoreError::InvalidBundle(
                "solver config: epsilon schedule must decrease in (0,1] and tolerances must be positive".into(),
            ))
        }
    }
}
