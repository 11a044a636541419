//! JSON experiment configuration.
//!
//! ```json
//! {
//!   "game": { "n": 10, "alpha": 1.0,
//!             "cost":  { "kind": "exp_cost", "scale": 1.0, "rate": 1.0 },
//!             "noise": { "kind": "hyperbolic_noise", "rho": 1.0 } },
//!   "contract": { "gamma": 5.0, "delta": "ir_floor" },
//!   "sweep":    { "gamma_min": 0.1, "gamma_max": 100.0, "gamma_steps": 50, "n_list": [2, 5, 10, 50] },
//!   "design":   { "epsilon": 0.5 },
//!   "simulate": { "replications": 100000, "seed": 7 },
//!   "output": "out.csv"
//! }
//! ```
//!
//! Asymmetric games list sensors instead: `"game": {"sensors": [{"alpha",
//! "cost", "noise"}, ...]}`, with `gamma`/`delta` given per sensor as arrays.
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use effort_contracts::{
    ContractParams, DesignTarget, FunctionFamily, NoiseShape, SensorProfile, SimConfig,
};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    #[serde(default)]
    pub contract: Option<ContractConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub design: Option<DesignConfig>,
    #[serde(default)]
    pub simulate: Option<SimulateConfig>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub cost: Option<FamilyConfig>,
    pub noise: Option<FamilyConfig>,
    pub sensors: Option<Vec<SensorConfig>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorConfig {
    pub alpha: f64,
    pub cost: FamilyConfig,
    pub noise: FamilyConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    ExpCost {
        #[serde(default = "one")]
        scale: f64,
        rate: f64,
    },
    PowerCost {
        #[serde(default = "one")]
        scale: f64,
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
    HyperbolicNoise {
        rho: f64,
    },
    ExpNoise {
        variance0: f64,
        rate: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl FamilyConfig {
    pub fn build(&self) -> Result<FunctionFamily> {
        let fam = match *self {
            FamilyConfig::ExpCost { scale, rate } => FunctionFamily::exp_cost(scale, rate),
            FamilyConfig::PowerCost {
                scale,
                exponent,
                offset,
            } => FunctionFamily::power_cost(scale, exponent, offset),
            FamilyConfig::HyperbolicNoise { rho } => FunctionFamily::hyperbolic_noise(rho),
            FamilyConfig::ExpNoise { variance0, rate } => {
                FunctionFamily::exp_noise(variance0, rate)
            }
        };
        fam.map_err(|e| CliError::config(e.to_string()))
    }
}

/// A number or a per-sensor array of numbers.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerSensor<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> PerSensor<T> {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<T>> {
        match self {
            PerSensor::One(v) => Ok(vec![v.clone(); n]),
            PerSensor::Many(vs) if vs.len() == n => Ok(vs.clone()),
            PerSensor::Many(vs) => Err(CliError::config(format!(
                "{what} has {} entries for {n} sensors",
                vs.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum IrFloor {
    #[serde(rename = "ir_floor")]
    IrFloor,
}

/// `delta` as a number, or `"ir_floor"` to calibrate it to the
/// individual-rationality floor at the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DeltaConfig {
    Value(f64),
    Floor(IrFloor),
}

fn ir_floor_default() -> PerSensor<DeltaConfig> {
    PerSensor::One(DeltaConfig::Floor(IrFloor::IrFloor))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractConfig {
    pub gamma: PerSensor<f64>,
    #[serde(default = "ir_floor_default")]
    pub delta: PerSensor<DeltaConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub gamma_steps: usize,
    #[serde(default)]
    pub n_list: Option<Vec<usize>>,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseShapeConfig {
    #[default]
    Gaussian,
    UniformSymmetric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub replications: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub true_value: f64,
    #[serde(default)]
    pub noise_shape: NoiseShapeConfig,
    #[serde(default)]
    pub deviation_scan: Option<ScanConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub sensor: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_step: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// The sensors of the game, validated.
pub fn sensors(game: &GameConfig) -> Result<Vec<SensorProfile>> {
    let symmetric_keys = [
        game.n.is_some(),
        game.alpha.is_some(),
        game.cost.is_some(),
        game.noise.is_some(),
    ];
    let profiles = match (&game.sensors, symmetric_keys) {
        (None, [true, true, true, true]) => {
            let n = game.n.unwrap_or_default();
            let profile = sensor_profile(
                game.alpha.unwrap_or_default(),
                game.cost.as_ref().expect("checked"),
                game.noise.as_ref().expect("checked"),
            )?;
            vec![profile; n]
        }
        (Some(list), [false, false, false, false]) => list
            .iter()
            .map(|s| sensor_profile(s.alpha, &s.cost, &s.noise))
            .collect::<Result<Vec<_>>>()?,
        (Some(_), _) => {
            return Err(CliError::config(
                "game: give either \"sensors\" or \"n\"/\"alpha\"/\"cost\"/\"noise\", not both",
            ))
        }
        (None, _) => {
            return Err(CliError::config(
                "game: a symmetric game needs \"n\", \"alpha\", \"cost\" and \"noise\"",
            ))
        }
    };
    if profiles.len() < 2 {
        return Err(CliError::config(format!(
            "game: at least two sensors are required, got {}",
            profiles.len()
        )));
    }
    Ok(profiles)
}

/// The shared profile of a symmetric game description.
pub fn symmetric_profile(game: &GameConfig) -> Result<(SensorProfile, usize)> {
    if game.sensors.is_some() {
        return Err(CliError::config(
            "this command needs a symmetric game (\"n\", \"alpha\", \"cost\", \"noise\")",
        ));
    }
    let profiles = sensors(game)?;
    Ok((profiles[0], profiles.len()))
}

fn sensor_profile(alpha: f64, cost: &FamilyConfig, noise: &FamilyConfig) -> Result<SensorProfile> {
    SensorProfile::new(alpha, cost.build()?, noise.build()?)
        .map_err(|e| CliError::config(e.to_string()))
}

/// Per-sensor `gamma` and `delta` (`None` where `"ir_floor"` was requested).
pub fn contract_terms(contract: &ContractConfig, n: usize) -> Result<Vec<(f64, Option<f64>)>> {
    let gammas = contract.gamma.expand(n, "contract.gamma")?;
    let deltas = contract.delta.expand(n, "contract.delta")?;
    gammas
        .into_iter()
        .zip(deltas)
        .map(|(gamma, delta)| {
            let delta = match delta {
                DeltaConfig::Value(d) => Some(d),
                DeltaConfig::Floor(_) => None,
            };
            ContractParams::new(gamma, delta.unwrap_or(0.0))
                .map_err(|e| CliError::config(format!("contract: {e}")))?;
            Ok((gamma, delta))
        })
        .collect()
}

impl SweepConfig {
    pub fn gammas(&self) -> Result<Vec<f64>> {
        let (lo, hi, steps) = (self.gamma_min, self.gamma_max, self.gamma_steps);
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(CliError::config(
                "sweep: need 0 <= gamma_min < gamma_max, both finite",
            ));
        }
        if steps < 2 {
            return Err(CliError::config("sweep: gamma_steps must be at least 2"));
        }
        let last = (steps - 1) as f64;
        Ok(match self.spacing {
            Spacing::Log => {
                if lo <= 0.0 {
                    return Err(CliError::config("sweep: log spacing needs gamma_min > 0"));
                }
                let (l0, l1) = (lo.ln(), hi.ln());
                (0..steps)
                    .map(|k| match k {
                        0 => lo,
                        k if k + 1 == steps => hi,
                        k => (l0 + (l1 - l0) * k as f64 / last).exp(),
                    })
                    .collect()
            }
            Spacing::Linear => (0..steps)
                .map(|k| lo + (hi - lo) * k as f64 / last)
                .collect(),
        })
    }

    pub fn n_values(&self, default_n: usize) -> Result<Vec<usize>> {
        let list = self.n_list.clone().unwrap_or_else(|| vec![default_n]);
        if list.is_empty() || list.iter().any(|&n| n < 2) {
            return Err(CliError::config("sweep: every n must be at least 2"));
        }
        Ok(list)
    }
}

impl DesignConfig {
    pub fn target(&self) -> Result<DesignTarget> {
        match (self.epsilon, self.beta) {
            (Some(eps), None) => Ok(DesignTarget::Quality(eps)),
            (None, Some(beta)) => Ok(DesignTarget::Budget(beta)),
            _ => Err(CliError::config(
                "design: give exactly one of \"epsilon\" and \"beta\"",
            )),
        }
    }
}

impl SimulateConfig {
    pub fn sim_config(&self, seed_override: Option<u64>) -> Result<SimConfig> {
        let seed = seed_override
            .or(self.seed)
            .ok_or_else(|| CliError::config("simulate: a seed is required (config or --seed)"))?;
        let cfg = SimConfig {
            true_value: self.true_value,
            replications: self.replications,
            seed,
            noise_shape: match self.noise_shape {
                NoiseShapeConfig::Gaussian => NoiseShape::Gaussian,
                NoiseShapeConfig::UniformSymmetric => NoiseShape::UniformSymmetric,
            },
        };
        cfg.validate()
            .map_err(|e| CliError::config(format!("simulate: {e}")))?;
        Ok(cfg)
    }
}

impl ScanConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (lo, hi, step) = (self.grid_min, self.grid_max, self.grid_step);
        if !(lo.is_finite()
            && hi.is_finite()
            && step.is_finite()
            && lo >= 0.0
            && hi >= lo
            && step > 0.0)
        {
            return Err(CliError::config(
                "deviation_scan: need 0 <= grid_min <= grid_max and grid_step > 0",
            ));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(CliError::config("deviation_scan: grid has too many points"));
        }
        Ok((0..count).map(|k| lo + step * k as f64).collect())
    }
}
