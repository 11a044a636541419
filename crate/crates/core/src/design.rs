//! Individual rationality, budgets, fundamental limits and the
//! budget-optimal contract.
//!
//! The limits here are stated for symmetric games in terms of the mean
//! per-sensor variance `η(a*)` (see [`GameSpec::mean_variance`]). The
//! averaging estimator's own MSE is that value divided by `n`.

use alloc::vec::Vec;

use crate::equilibrium::{
    check_conditions, BestResponseObjective, CONVEXITY_GRID_HI, CONVEXITY_GRID_LO,
    CONVEXITY_GRID_POINTS,
};
use crate::error::{Error, Result};
use crate::game::{ContractParams, EffortProfile, GameSpec, SensorProfile};
use crate::math::{geometric_grid, positive_sum};
use crate::report::EquilibriumReport;

/// Smallest `δᵢ` that makes sensor `i`'s expected utility nonnegative at
/// `efforts`: `γᵢ E{(x̂ − yᵢ)²} + fᵢ(aᵢ)/αᵢ`.
///
/// The cross term uses `ηⱼ(aⱼ)` for the other sensors, matching the
/// expected-payment derivation.
pub fn ir_delta_floor(spec: &GameSpec, efforts: &EffortProfile, i: usize) -> Result<f64> {
    let dev = spec.expected_squared_deviation(efforts, i)?;
    let s = spec.sensor(i)?;
    let gamma = spec.contract(i)?.gamma;
    Ok((gamma * dev + s.cost.value(efforts.as_slice()[i]) / s.alpha).max(0.0))
}

/// `spec` with every `δᵢ` set to its IR floor at `efforts`.
pub fn with_ir_floor(spec: &GameSpec, efforts: &EffortProfile) -> Result<GameSpec> {
    let contracts = (0..spec.n())
        .map(|i| {
            Ok(ContractParams {
                gamma: spec.contracts()[i].gamma,
                delta: ir_delta_floor(spec, efforts, i)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    spec.with_contracts(contracts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetReport {
    /// `B = Σ E{pᵢ}`
    pub total_budget: f64,
    pub per_sensor_payment: Vec<f64>,
    /// `Σ fᵢ(aᵢ)/αᵢ`; any IR contract has `B` at least this.
    pub ir_floor: f64,
    /// `n f(η⁻¹(ε))/α`, only for symmetric games with a quality target.
    pub fundamental_floor: Option<f64>,
}

pub fn total_budget(
    spec: &GameSpec,
    efforts: &EffortProfile,
    epsilon: Option<f64>,
) -> Result<BudgetReport> {
    let per_sensor_payment = (0..spec.n())
        .map(|i| spec.expected_payment(efforts, i))
        .collect::<Result<Vec<_>>>()?;
    let ir_floor = spec
        .sensors()
        .iter()
        .zip(efforts.as_slice())
        .map(|(s, &a)| s.cost.value(a) / s.alpha)
        .sum();
    let fundamental_floor = match epsilon {
        Some(eps) if spec.is_symmetric() => {
            Some(fundamental_budget(&spec.sensors()[0], spec.n(), eps)?)
        }
        _ => None,
    };
    Ok(BudgetReport {
        total_budget: per_sensor_payment.iter().sum(),
        per_sensor_payment,
        ir_floor,
        fundamental_floor,
    })
}

fn check_symmetric_inputs(profile: &SensorProfile, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewSensors(n));
    }
    profile.validate()
}

/// Least budget of any IR contract reaching quality `η(a*) ≤ ε` in a
/// symmetric game: `n f(η⁻¹(ε))/α`.
pub fn fundamental_budget(profile: &SensorProfile, n: usize, epsilon: f64) -> Result<f64> {
    check_symmetric_inputs(profile, n)?;
    let a = profile.noise.inverse(epsilon)?;
    Ok(n as f64 * profile.cost.value(a) / profile.alpha)
}

/// Best quality reachable with budget `β` in a symmetric game:
/// `η(f⁻¹(βα/n))`.
pub fn fundamental_performance(profile: &SensorProfile, n: usize, beta: f64) -> Result<f64> {
    check_symmetric_inputs(profile, n)?;
    let scale = n as f64 / profile.alpha;
    let per_sensor = beta / scale;
    let a = profile
        .cost
        .inverse(per_sensor)
        .map_err(|_| Error::range(beta, scale * profile.cost.value(0.0), f64::INFINITY, false))?;
    Ok(profile.noise.value(a))
}

/// What the planner asks of the design: a quality bound or a budget cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesignTarget {
    Quality(f64),
    Budget(f64),
}

impl DesignTarget {
    /// The quality bound `ε` to design for. A budget cap resolves to the
    /// best quality it can buy.
    pub fn epsilon(&self, profile: &SensorProfile, n: usize) -> Result<f64> {
        match *self {
            DesignTarget::Quality(eps) => {
                if eps.is_finite() && eps > 0.0 {
                    Ok(eps)
                } else {
                    let (lo, hi, open) = profile.noise.range();
                    Err(Error::range(eps, lo, hi, open))
                }
            }
            DesignTarget::Budget(beta) => {
                if !(beta.is_finite() && beta > 0.0) {
                    return Err(Error::InvalidParameter("budget must be positive"));
                }
                fundamental_performance(profile, n, beta)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalContract {
    pub contract: ContractParams,
    /// `η⁻¹(ε)`, the effort the contract induces.
    pub effort: f64,
    /// `n f(η⁻¹(ε))/α`
    pub fundamental_floor: f64,
    /// Analytic report of the designed game at `effort`.
    pub predicted: EquilibriumReport,
}

/// Budget-optimal quadratic-deviation contract reaching quality `ε`:
///
/// ```text
/// γ = −(n/(n−1))² f′(η⁻¹(ε)) / (α η′(η⁻¹(ε)))
/// δ = γ (n−1) ε / n + f(η⁻¹(ε)) / α
/// ```
///
/// Requires `η″(a) f′(η⁻¹(ε)) − f″(a) η′(η⁻¹(ε)) > 0` on the sampled grid.
pub fn design_optimal_contract(
    profile: &SensorProfile,
    n: usize,
    epsilon: f64,
) -> Result<OptimalContract> {
    check_symmetric_inputs(profile, n)?;
    let target = profile.noise.inverse(epsilon)?;
    let (f, eta) = (&profile.cost, &profile.noise);
    let f1 = f.d1(target);
    let eta1 = eta.d1(target);
    if let Some(a) = core::iter::once(0.0)
        .chain(geometric_grid(
            CONVEXITY_GRID_LO,
            CONVEXITY_GRID_HI,
            CONVEXITY_GRID_POINTS,
        ))
        .find(|&a| {
            !positive_sum(&[
                (eta.d2_sign(a) * f.d1_sign(target), eta.d2(a) * f1),
                (-f.d2_sign(a) * eta.d1_sign(target), -f.d2(a) * eta1),
            ])
        })
    {
        return Err(Error::ConvexityViolation(a));
    }
    let nf = n as f64;
    let ratio = nf / (nf - 1.0);
    let gamma = -ratio * ratio * f1 / (profile.alpha * eta1);
    let delta = gamma * (nf - 1.0) * epsilon / nf + f.value(target) / profile.alpha;
    let contract = ContractParams::new(gamma, delta)?;

    let spec = GameSpec::symmetric(n, *profile, contract)?;
    let mut diag = check_conditions(&BestResponseObjective::for_sensor(&spec, 0)?);
    if target == 0.0 {
        // ξ′(0) = 0 exactly here; the sampled sign is rounding noise
        diag.interior_ok = false;
        diag.boundary_solution = true;
    }
    let predicted = EquilibriumReport::at(
        &spec,
        EffortProfile::uniform(n, target)?,
        alloc::vec![diag; n],
    )?;
    Ok(OptimalContract {
        contract,
        effort: target,
        fundamental_floor: nf * f.value(target) / profile.alpha,
        predicted,
    })
}
