//! The four subcommands. Each builds its tables in memory; nothing is
//! written unless the whole command succeeds.

use std::path::{Path, PathBuf};

use effort_contracts::design::with_ir_floor;
use effort_contracts::{
    design_optimal_contract, deviation_scan, fundamental_budget, scan_argmax, simulate,
    solve_equilibrium, BestResponseObjective, ContractParams, DesignTarget, EquilibriumReport,
    GameSpec, SensorProfile, DEFAULT_TOL,
};

use crate::config::{self, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::table::{Cell, Output, Table};

/// Number of standard errors allowed between analytic and empirical values.
pub const PASS_BAND_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Equilibrium,
    Sweep,
    Design,
    Simulate,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn run(command: Command, cfg: &ExperimentConfig, overrides: &Overrides) -> Result<Vec<Output>> {
    let path = overrides.output.clone().or_else(|| cfg.output.clone());
    match command {
        Command::Equilibrium => Ok(vec![Output {
            path,
            table: cmd_equilibrium(cfg)?,
        }]),
        Command::Sweep => Ok(vec![Output {
            path,
            table: cmd_sweep(cfg)?,
        }]),
        Command::Design => Ok(vec![Output {
            path,
            table: cmd_design(cfg)?,
        }]),
        Command::Simulate => cmd_simulate(cfg, path, overrides.seed),
    }
}

/// The configured contract game with every `"ir_floor"` delta resolved at
/// the equilibrium, together with that equilibrium.
fn calibrated_game(
    sensors: Vec<SensorProfile>,
    terms: &[(f64, Option<f64>)],
) -> Result<(GameSpec, EquilibriumReport)> {
    let provisional = terms
        .iter()
        .map(|&(gamma, delta)| ContractParams::new(gamma, delta.unwrap_or(0.0)))
        .collect::<effort_contracts::Result<Vec<_>>>()?;
    let spec = GameSpec::new(sensors, provisional)?;
    let eq = solve_equilibrium(&spec, DEFAULT_TOL)?;
    let floors = with_ir_floor(&spec, &eq.efforts)?;
    let contracts = terms
        .iter()
        .zip(floors.contracts())
        .map(|(&(gamma, delta), floor)| ContractParams {
            gamma,
            delta: delta.unwrap_or(floor.delta),
        })
        .collect();
    let spec = spec.with_contracts(contracts)?;
    let report = EquilibriumReport::at(&spec, eq.efforts, eq.diagnostics)?;
    Ok((spec, report))
}

fn configured_game(cfg: &ExperimentConfig) -> Result<(GameSpec, EquilibriumReport)> {
    let sensors = config::sensors(&cfg.game)?;
    let contract = cfg
        .contract
        .as_ref()
        .ok_or_else(|| CliError::config("missing \"contract\" block"))?;
    let terms = config::contract_terms(contract, sensors.len())?;
    calibrated_game(sensors, &terms)
}

pub fn cmd_equilibrium(cfg: &ExperimentConfig) -> Result<Table> {
    let (spec, report) = configured_game(cfg)?;
    let n = spec.n() as f64;
    let mut table = Table::new(vec![
        "index",
        "gamma",
        "delta",
        "a_star",
        "boundary",
        "xi_residual",
        "mse_contribution",
    ]);
    for i in 0..spec.n() {
        let a = report.efforts.as_slice()[i];
        let obj = BestResponseObjective::for_sensor(&spec, i)?;
        let c = spec.contracts()[i];
        table.push(vec![
            i.into(),
            c.gamma.into(),
            c.delta.into(),
            a.into(),
            report.diagnostics[i].boundary_solution.into(),
            obj.xi_deriv1(a)?.into(),
            (spec.sensors()[i].noise.eval(a)? / (n * n)).into(),
        ]);
    }
    Ok(table)
}

/// One row per `(n, γ)` with `δ` at the IR floor.
///
/// Plotting `a_star`, `mse` and `budget` against `gamma` per `n` gives the
/// effort/performance/budget-versus-reward curves; `mse` against `budget`
/// gives the performance-budget trade-off.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("missing \"sweep\" block"))?;
    let (profile, default_n) = config::symmetric_profile(&cfg.game)?;
    let gammas = sweep.gammas()?;
    let ns = sweep.n_values(default_n)?;
    let mut table = Table::new(vec![
        "n",
        "gamma",
        "delta",
        "a_star",
        "boundary",
        "mse",
        "budget",
        "expected_payment",
        "expected_utility",
    ]);
    for &n in &ns {
        for &gamma in &gammas {
            let (spec, report) = calibrated_game(vec![profile; n], &vec![(gamma, None); n])?;
            let delta = spec.contracts()[0].delta;
            table.push(vec![
                n.into(),
                gamma.into(),
                delta.into(),
                report.efforts.as_slice()[0].into(),
                report.diagnostics[0].boundary_solution.into(),
                report.estimator_mse.into(),
                report.total_budget.into(),
                report.expected_payments[0].into(),
                report.expected_utilities[0].into(),
            ]);
        }
    }
    Ok(table)
}

/// Budget-optimal contract for a quality bound `epsilon` or a budget `beta`.
///
/// `mse` is the quality the design targets, the mean per-sensor variance
/// `η(a*)`; `estimator_mse` is the averaging estimator's error `η(a*)/n`.
pub fn cmd_design(cfg: &ExperimentConfig) -> Result<Table> {
    let design = cfg
        .design
        .as_ref()
        .ok_or_else(|| CliError::config("missing \"design\" block"))?;
    let target = design.target()?;
    let (profile, n) = config::symmetric_profile(&cfg.game)?;
    let epsilon = target.epsilon(&profile, n)?;
    let (spec, report, fundamental_floor) = designed_game(&profile, n, epsilon)?;
    let beta = match target {
        DesignTarget::Budget(b) => Some(b),
        DesignTarget::Quality(_) => None,
    };
    let mut table = Table::new(vec![
        "n",
        "alpha",
        "epsilon",
        "gamma",
        "delta",
        "a_star",
        "mse",
        "estimator_mse",
        "budget",
        "fundamental_floor",
        "beta",
        "performance_limit",
    ]);
    let c = spec.contracts()[0];
    table.push(vec![
        n.into(),
        profile.alpha.into(),
        epsilon.into(),
        c.gamma.into(),
        c.delta.into(),
        report.efforts.as_slice()[0].into(),
        report.mean_variance.into(),
        report.estimator_mse.into(),
        report.total_budget.into(),
        fundamental_floor.into(),
        beta.into(),
        beta.map(|_| epsilon).into(),
    ]);
    Ok(table)
}

/// Designs the contract, then re-solves the designed game from scratch.
fn designed_game(
    profile: &SensorProfile,
    n: usize,
    epsilon: f64,
) -> Result<(GameSpec, EquilibriumReport, f64)> {
    let oc = design_optimal_contract(profile, n, epsilon)?;
    let spec = GameSpec::symmetric(n, *profile, oc.contract)?;
    let report = EquilibriumReport::solve(&spec, DEFAULT_TOL)?;
    debug_assert_eq!(
        oc.fundamental_floor,
        fundamental_budget(profile, n, epsilon)?
    );
    Ok((spec, report, oc.fundamental_floor))
}

/// Analytic versus simulated MSE, payments and utilities at the equilibrium
/// of the configured (or designed) contract, plus an optional deviation scan.
pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    path: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<Vec<Output>> {
    let sim = cfg
        .simulate
        .as_ref()
        .ok_or_else(|| CliError::config("missing \"simulate\" block"))?;
    let sim_cfg = sim.sim_config(seed)?;
    let scan_grid = sim.deviation_scan.as_ref().map(|s| s.grid()).transpose()?;
    let (spec, report) = match (&cfg.design, &cfg.contract) {
        (Some(design), _) => {
            let (profile, n) = config::symmetric_profile(&cfg.game)?;
            let epsilon = design.target()?.epsilon(&profile, n)?;
            let (spec, report, _) = designed_game(&profile, n, epsilon)?;
            (spec, report)
        }
        (None, Some(_)) => configured_game(cfg)?,
        (None, None) => {
            return Err(CliError::config(
                "simulate needs a \"contract\" or a \"design\" block",
            ))
        }
    };
    let result = simulate(&spec, &report.efforts, &sim_cfg)?;

    let mut table = Table::new(vec![
        "quantity",
        "sensor",
        "analytic",
        "empirical",
        "std_err",
        "z_score",
        "pass",
    ]);
    let mut push =
        |quantity: &str, sensor: Cell, analytic: f64, est: effort_contracts::Estimate| {
            table.push(vec![
                quantity.into(),
                sensor,
                analytic.into(),
                est.mean.into(),
                est.std_err.into(),
                est.z_score(analytic).into(),
                est.within(analytic, PASS_BAND_SE).into(),
            ]);
        };
    push(
        "mse",
        Cell::Empty,
        report.estimator_mse,
        result.empirical_mse,
    );
    for i in 0..spec.n() {
        push(
            "payment",
            i.into(),
            report.expected_payments[i],
            result.empirical_payment[i],
        );
    }
    for i in 0..spec.n() {
        push(
            "utility",
            i.into(),
            report.expected_utilities[i],
            result.empirical_utility[i],
        );
    }
    let mut outputs = vec![Output {
        path: path.clone(),
        table,
    }];

    if let (Some(scan_cfg), Some(grid)) = (&sim.deviation_scan, scan_grid) {
        let i = scan_cfg.sensor;
        let points = deviation_scan(&spec, &report.efforts, i, &grid, &sim_cfg)?;
        let best = scan_argmax(&points);
        let mut scan = Table::new(vec![
            "effort",
            "empirical_utility",
            "std_err",
            "analytic_utility",
            "argmax",
        ]);
        for p in &points {
            let moved = report.efforts.with_effort(i, p.effort)?;
            scan.push(vec![
                p.effort.into(),
                p.utility.mean.into(),
                p.utility.std_err.into(),
                spec.expected_utility(&moved, i)?.into(),
                (Some(p.effort) == best).into(),
            ]);
        }
        let scan_path = scan_cfg
            .output
            .clone()
            .or_else(|| path.as_deref().map(scan_path_for));
        outputs.push(Output {
            path: scan_path,
            table: scan,
        });
    }
    Ok(outputs)
}

/// `out.csv` → `out_scan.csv`.
fn scan_path_for(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_scan.{}", ext.to_string_lossy()),
        None => format!("{stem}_scan"),
    };
    path.with_file_name(name)
}
