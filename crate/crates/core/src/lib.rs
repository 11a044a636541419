//! Contract equilibria for effort-averse sensors.
//!
//! A central planner averages the reports of `n` sensors, `x̂ = (1/n) Σ yᵢ`,
//! and pays each sensor with a quadratic-deviation contract
//! `pᵢ = δᵢ − γᵢ (x̂ − yᵢ)²`. Sensor `i` picks an effort `aᵢ ≥ 0` that costs
//! `fᵢ(aᵢ)` and yields a measurement with noise variance `ηᵢ(aᵢ)`.
//!
//! The crate computes the resulting equilibrium efforts, calibrates
//! individually rational payments, evaluates budgets and the fundamental
//! budget/performance limits of symmetric games, designs the budget-optimal
//! contract for a target quality, and checks all of it against a seeded
//! Monte-Carlo simulation of the sensing round.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod design;
pub mod equilibrium;
mod error;
pub mod family;
pub mod game;
mod math;
pub mod report;
pub mod simulation;

pub use design::{
    design_optimal_contract, fundamental_budget, fundamental_performance, ir_delta_floor,
    total_budget, with_ir_floor, BudgetReport, DesignTarget, OptimalContract,
};
pub use equilibrium::{
    check_conditions, equilibrium_sensitivity, grid_oracle, solve_best_response, solve_equilibrium,
    BestResponse, BestResponseObjective, Equilibrium, EquilibriumDiagnostics, DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use family::{FamilyRole, FunctionFamily};
pub use game::{ContractParams, EffortProfile, GameSpec, SensorProfile};
pub use report::EquilibriumReport;
pub use simulation::{
    deviation_scan, scan_argmax, simulate, Estimate, NoiseShape, ScanPoint, SimConfig, SimResult,
};
