//! Analytic summary of a game at a given effort profile.

use alloc::vec::Vec;

use crate::equilibrium::{solve_equilibrium, EquilibriumDiagnostics};
use crate::error::Result;
use crate::game::{EffortProfile, GameSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub efforts: EffortProfile,
    pub diagnostics: Vec<EquilibriumDiagnostics>,
    /// `(1/n²) Σ ηᵢ(aᵢ)`
    pub estimator_mse: f64,
    /// `(1/n) Σ ηᵢ(aᵢ)`
    pub mean_variance: f64,
    pub expected_payments: Vec<f64>,
    pub expected_utilities: Vec<f64>,
    /// `Σ E{pᵢ}`
    pub total_budget: f64,
}

impl EquilibriumReport {
    pub fn at(
        spec: &GameSpec,
        efforts: EffortProfile,
        diagnostics: Vec<EquilibriumDiagnostics>,
    ) -> Result<Self> {
        let expected_payments = (0..spec.n())
            .map(|i| spec.expected_payment(&efforts, i))
            .collect::<Result<Vec<_>>>()?;
        let expected_utilities = (0..spec.n())
            .map(|i| spec.expected_utility(&efforts, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(EquilibriumReport {
            estimator_mse: spec.estimator_mse(&efforts)?,
            mean_variance: spec.mean_variance(&efforts)?,
            total_budget: expected_payments.iter().sum(),
            expected_payments,
            expected_utilities,
            efforts,
            diagnostics,
        })
    }

    /// Solves the equilibrium of `spec` and reports on it.
    pub fn solve(spec: &GameSpec, tol: f64) -> Result<Self> {
        let eq = solve_equilibrium(spec, tol)?;
        EquilibriumReport::at(spec, eq.efforts, eq.diagnostics)
    }
}
