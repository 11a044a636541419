//! Monte-Carlo simulation of the sensing round.
//!
//! Each replication draws `yᵢ = x + wᵢ` with independent zero-mean noise of
//! variance `ηᵢ(aᵢ)`, forms the average `x̂`, and pays
//! `pᵢ = δᵢ − γᵢ (x̂ − yᵢ)²`. Means and standard errors are accumulated in
//! replication order, so a fixed seed and replication count give
//! bit-identical results.
//!
//! Replication `r` draws from its own ChaCha8 stream (`set_stream(r)`) under
//! the key derived from the seed; within a replication sensors draw in index
//! order. Draws are unit-variance and scaled by `sqrt(ηᵢ(aᵢ))`, so the same
//! underlying numbers serve every effort level (common random numbers).

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::game::{EffortProfile, GameSpec};
use crate::math::{abs, sqrt};

/// Zero-mean, unit-variance shape of the measurement noise before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseShape {
    #[default]
    Gaussian,
    /// Uniform on `[−√3, √3)`.
    UniformSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub true_value: f64,
    pub replications: usize,
    pub seed: u64,
    pub noise_shape: NoiseShape,
}

impl SimConfig {
    /// Gaussian noise around `x = 0`.
    pub fn new(replications: usize, seed: u64) -> Self {
        SimConfig {
            true_value: 0.0,
            replications,
            seed,
            noise_shape: NoiseShape::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1"));
        }
        if !self.true_value.is_finite() {
            return Err(Error::InvalidParameter("true value must be finite"));
        }
        Ok(())
    }

    fn key(&self) -> [u8; 32] {
        ChaCha8Rng::seed_from_u64(self.seed).get_seed()
    }

    /// Unit-variance draws of replication `rep`, one per entry of `out`.
    pub fn standard_draws(&self, rep: u64, out: &mut [f64]) {
        fill_draws(&self.key(), self.noise_shape, rep, out);
    }
}

fn fill_draws(key: &[u8; 32], shape: NoiseShape, rep: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_stream(rep);
    const SQRT_3: f64 = 1.732_050_807_568_877_2;
    for z in out.iter_mut() {
        *z = match shape {
            NoiseShape::Gaussian => StandardNormal.sample(&mut rng),
            NoiseShape::UniformSymmetric => (2.0 * rng.random::<f64>() - 1.0) * SQRT_3,
        };
    }
}

/// Sample mean with its standard error `s/√R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    /// Distance from `expected` in standard errors. Infinite when the
    /// estimate is exact (`std_err = 0`) but differs.
    pub fn z_score(&self, expected: f64) -> f64 {
        let diff = abs(self.mean - expected);
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }

    pub fn within(&self, expected: f64, num_se: f64) -> bool {
        self.z_score(expected) <= num_se
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn estimate(&self) -> Estimate {
        let std_err = if self.count < 2 {
            0.0
        } else {
            let var = (self.m2 / (self.count - 1) as f64).max(0.0);
            sqrt(var / self.count as f64)
        };
        Estimate {
            mean: self.mean,
            std_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// `(x̂ − x)²`
    pub empirical_mse: Estimate,
    pub empirical_payment: Vec<Estimate>,
    pub empirical_utility: Vec<Estimate>,
    pub replications_used: usize,
}

fn noise_scales(spec: &GameSpec, efforts: &EffortProfile) -> Result<Vec<f64>> {
    let scales: Vec<f64> = spec.variances(efforts)?.into_iter().map(sqrt).collect();
    if scales.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("noise variance must be finite"));
    }
    Ok(scales)
}

pub fn simulate(spec: &GameSpec, efforts: &EffortProfile, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let n = spec.n();
    let scales = noise_scales(spec, efforts)?;
    let costs: Vec<f64> = spec
        .sensors()
        .iter()
        .zip(efforts.as_slice())
        .map(|(s, &a)| s.cost.value(a))
        .collect();
    let key = cfg.key();
    let x = cfg.true_value;

    let mut z = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut mse = Moments::default();
    let mut pay = vec![Moments::default(); n];
    let mut util = vec![Moments::default(); n];
    for rep in 0..cfg.replications {
        fill_draws(&key, cfg.noise_shape, rep as u64, &mut z);
        for j in 0..n {
            y[j] = x + scales[j] * z[j];
        }
        let x_hat = y.iter().sum::<f64>() / n as f64;
        let err = x_hat - x;
        mse.push(err * err);
        for (i, (s, c)) in spec.sensors().iter().zip(spec.contracts()).enumerate() {
            let d = x_hat - y[i];
            let p = c.delta - c.gamma * d * d;
            pay[i].push(p);
            util[i].push(s.alpha * p - costs[i]);
        }
    }
    Ok(SimResult {
        empirical_mse: mse.estimate(),
        empirical_payment: pay.iter().map(Moments::estimate).collect(),
        empirical_utility: util.iter().map(Moments::estimate).collect(),
        replications_used: cfg.replications,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub effort: f64,
    pub utility: Estimate,
}

/// Empirical utility of sensor `i` at each effort in `grid`, everyone else
/// held at `efforts`. All grid points share the same draws.
pub fn deviation_scan(
    spec: &GameSpec,
    efforts: &EffortProfile,
    i: usize,
    grid: &[f64],
    cfg: &SimConfig,
) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    let sensor = *spec.sensor(i)?;
    let contract = *spec.contract(i)?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("deviation grid is empty"));
    }
    if let Some(&bad) = grid.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(Error::Domain(bad));
    }
    let n = spec.n();
    let scales = noise_scales(spec, efforts)?;
    let own_scales: Vec<f64> = grid.iter().map(|&a| sqrt(sensor.noise.value(a))).collect();
    let own_costs: Vec<f64> = grid.iter().map(|&a| sensor.cost.value(a)).collect();
    let key = cfg.key();
    let x = cfg.true_value;

    let mut z = vec![0.0; n];
    let mut util = vec![Moments::default(); grid.len()];
    for rep in 0..cfg.replications {
        fill_draws(&key, cfg.noise_shape, rep as u64, &mut z);
        let others: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| x + scales[j] * z[j])
            .sum();
        for (k, acc) in util.iter_mut().enumerate() {
            let y_i = x + own_scales[k] * z[i];
            let d = (others + y_i) / n as f64 - y_i;
            let p = contract.delta - contract.gamma * d * d;
            acc.push(sensor.alpha * p - own_costs[k]);
        }
    }
    Ok(grid
        .iter()
        .zip(&util)
        .map(|(&effort, m)| ScanPoint {
            effort,
            utility: m.estimate(),
        })
        .collect())
}

/// Effort with the highest mean utility; the first one wins ties.
pub fn scan_argmax(points: &[ScanPoint]) -> Option<f64> {
    points
        .iter()
        .fold(None, |best: Option<&ScanPoint>, p| match best {
            Some(b) if b.utility.mean >= p.utility.mean => Some(b),
            _ => Some(p),
        })
        .map(|p| p.effort)
}
