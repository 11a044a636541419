//! The contract game: sensors, contracts and the averaging estimator.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::{FamilyRole, FunctionFamily};

/// One sensor: value-of-compensation `alpha`, effort cost `f` and
/// measurement noise variance `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorProfile {
    pub alpha: f64,
    pub cost: FunctionFamily,
    pub noise: FunctionFamily,
}

impl SensorProfile {
    pub fn new(alpha: f64, cost: FunctionFamily, noise: FunctionFamily) -> Result<Self> {
        let profile = SensorProfile { alpha, cost, noise };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter("alpha must be positive"));
        }
        if self.cost.role() != FamilyRole::Cost {
            return Err(Error::InvalidParameter("cost must be a cost family"));
        }
        if self.noise.role() != FamilyRole::Noise {
            return Err(Error::InvalidParameter("noise must be a noise family"));
        }
        self.cost.validate()?;
        self.noise.validate()
    }
}

/// Quadratic-deviation contract `p = delta − gamma · (x̂ − y)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractParams {
    pub gamma: f64,
    pub delta: f64,
}

impl ContractParams {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        let c = ContractParams { gamma, delta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParameter("gamma must be nonnegative"));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParameter("delta must be nonnegative"));
        }
        Ok(())
    }
}

/// A contract game with `n ≥ 2` sensors.
///
/// `symmetric` is derived from the contents: it is set exactly when every
/// sensor profile and every contract coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    sensors: Vec<SensorProfile>,
    contracts: Vec<ContractParams>,
    symmetric: bool,
}

impl GameSpec {
    pub fn new(sensors: Vec<SensorProfile>, contracts: Vec<ContractParams>) -> Result<Self> {
        if sensors.len() < 2 {
            return Err(Error::TooFewSensors(sensors.len()));
        }
        if contracts.len() != sensors.len() {
            return Err(Error::LengthMismatch {
                expected: sensors.len(),
                got: contracts.len(),
            });
        }
        for s in &sensors {
            s.validate()?;
        }
        for c in &contracts {
            c.validate()?;
        }
        let symmetric = sensors.iter().all(|s| *s == sensors[0])
            && contracts.iter().all(|c| *c == contracts[0]);
        Ok(GameSpec {
            sensors,
            contracts,
            symmetric,
        })
    }

    pub fn symmetric(n: usize, sensor: SensorProfile, contract: ContractParams) -> Result<Self> {
        GameSpec::new(alloc::vec![sensor; n], alloc::vec![contract; n])
    }

    /// Same sensors under a different set of contracts.
    pub fn with_contracts(&self, contracts: Vec<ContractParams>) -> Result<Self> {
        GameSpec::new(self.sensors.clone(), contracts)
    }

    pub fn n(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn sensors(&self) -> &[SensorProfile] {
        &self.sensors
    }

    pub fn contracts(&self) -> &[ContractParams] {
        &self.contracts
    }

    pub fn sensor(&self, i: usize) -> Result<&SensorProfile> {
        self.sensors.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            n: self.n(),
        })
    }

    pub fn contract(&self, i: usize) -> Result<&ContractParams> {
        self.contracts.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            n: self.n(),
        })
    }

    /// `((n−1)/n)²`, the weight of a sensor's own variance in its expected
    /// squared deviation from the average.
    pub fn own_weight(&self) -> f64 {
        own_weight(self.n())
    }

    fn check_len(&self, efforts: &EffortProfile) -> Result<()> {
        if efforts.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: efforts.len(),
            });
        }
        Ok(())
    }

    /// Noise variances `ηⱼ(aⱼ)` at the given efforts.
    pub fn variances(&self, efforts: &EffortProfile) -> Result<Vec<f64>> {
        self.check_len(efforts)?;
        Ok(self
            .sensors
            .iter()
            .zip(efforts.as_slice())
            .map(|(s, &a)| s.noise.value(a))
            .collect())
    }

    /// `E{(x − x̂)²} = (1/n²) Σ ηᵢ(aᵢ)` for the averaging estimator.
    pub fn estimator_mse(&self, efforts: &EffortProfile) -> Result<f64> {
        let n = self.n() as f64;
        Ok(self.variances(efforts)?.iter().sum::<f64>() / (n * n))
    }

    /// Mean per-sensor variance `(1/n) Σ ηᵢ(aᵢ)`; equals `η(a)` when all
    /// sensors share `η` and effort `a`. This is the quality measure that the
    /// fundamental limits and the optimal design target.
    pub fn mean_variance(&self, efforts: &EffortProfile) -> Result<f64> {
        Ok(self.variances(efforts)?.iter().sum::<f64>() / self.n() as f64)
    }

    /// `E{(x̂ − yᵢ)²} = ((n−1)/n)² ηᵢ(aᵢ) + (1/n²) Σ_{j≠i} ηⱼ(aⱼ)`.
    pub fn expected_squared_deviation(&self, efforts: &EffortProfile, i: usize) -> Result<f64> {
        self.sensor(i)?;
        let vars = self.variances(efforts)?;
        let n = self.n() as f64;
        let others: f64 = vars
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v)
            .sum();
        Ok(self.own_weight() * vars[i] + others / (n * n))
    }

    /// `E{pᵢ} = δᵢ − γᵢ · E{(x̂ − yᵢ)²}`.
    pub fn expected_payment(&self, efforts: &EffortProfile, i: usize) -> Result<f64> {
        let dev = self.expected_squared_deviation(efforts, i)?;
        let c = &self.contracts[i];
        Ok(c.delta - c.gamma * dev)
    }

    /// `C̄ᵢ = αᵢ δᵢ − [αᵢ γᵢ E{(x̂ − yᵢ)²} + fᵢ(aᵢ)]`.
    pub fn expected_utility(&self, efforts: &EffortProfile, i: usize) -> Result<f64> {
        let dev = self.expected_squared_deviation(efforts, i)?;
        let s = &self.sensors[i];
        let c = &self.contracts[i];
        let a = efforts.as_slice()[i];
        Ok(s.alpha * c.delta - (s.alpha * c.gamma * dev + s.cost.value(a)))
    }
}

pub(crate) fn own_weight(n: usize) -> f64 {
    let n = n as f64;
    let r = (n - 1.0) / n;
    r * r
}

/// Efforts `(a₁, …, aₙ)`, all nonnegative and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EffortProfile(Vec<f64>);

impl EffortProfile {
    pub fn new(efforts: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = efforts.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::Domain(bad));
        }
        Ok(EffortProfile(efforts))
    }

    pub fn uniform(n: usize, a: f64) -> Result<Self> {
        EffortProfile::new(alloc::vec![a; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Copy with sensor `i` moved to effort `a`.
    pub fn with_effort(&self, i: usize, a: f64) -> Result<Self> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                n: self.len(),
            });
        }
        let mut v = self.0.clone();
        v[i] = a;
        EffortProfile::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn baseline_sensor() -> SensorProfile {
        SensorProfile::new(
            1.0,
            FunctionFamily::exp_cost(1.0, 1.0).unwrap(),
            FunctionFamily::hyperbolic_noise(1.0).unwrap(),
        )
        .unwrap()
    }

    fn baseline(n: usize, gamma: f64, delta: f64) -> GameSpec {
        GameSpec::symmetric(
            n,
            baseline_sensor(),
            ContractParams::new(gamma, delta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_single_sensor_and_mismatch() {
        let s = baseline_sensor();
        let c = ContractParams::new(1.0, 1.0).unwrap();
        assert_eq!(
            GameSpec::new(vec![s], vec![c]),
            Err(Error::TooFewSensors(1))
        );
        assert_eq!(
            GameSpec::new(vec![s, s], vec![c]),
            Err(Error::LengthMismatch {
                expected: 2,
                got: 1
            })
        );
        assert!(ContractParams::new(-1.0, 0.0).is_err());
        assert!(ContractParams::new(0.0, -1.0).is_err());
        assert!(SensorProfile::new(0.0, s.cost, s.noise).is_err());
        assert!(SensorProfile::new(1.0, s.noise, s.cost).is_err());
        assert!(EffortProfile::new(vec![0.0, -1.0]).is_err());
    }

    #[test]
    fn symmetric_flag_follows_contents() {
        let g = baseline(3, 1.0, 1.0);
        assert!(g.is_symmetric());
        let g2 = g
            .with_contracts(vec![
                ContractParams::new(1.0, 1.0).unwrap(),
                ContractParams::new(2.0, 1.0).unwrap(),
                ContractParams::new(1.0, 1.0).unwrap(),
            ])
            .unwrap();
        assert!(!g2.is_symmetric());
    }

    #[test]
    fn mse_spot_values() {
        let g = baseline(10, 0.0, 0.0);
        let e = EffortProfile::uniform(10, 0.0).unwrap();
        assert!((g.estimator_mse(&e).unwrap() - 0.1).abs() < 1e-15);

        let g = baseline(2, 0.0, 0.0);
        let e = EffortProfile::new(vec![1.0, 3.0]).unwrap();
        assert!((g.estimator_mse(&e).unwrap() - 0.1875).abs() < 1e-15);
        assert!(g
            .estimator_mse(&EffortProfile::uniform(3, 0.0).unwrap())
            .is_err());
    }

    #[test]
    fn utility_and_payment_spot_values() {
        let g = baseline(10, 0.0, 0.0);
        let e = EffortProfile::uniform(10, 0.0).unwrap();
        assert_eq!(g.expected_utility(&e, 0).unwrap(), -1.0);

        let g = baseline(10, 5.0, 0.0);
        assert!((g.expected_utility(&e, 3).unwrap() + 5.5).abs() < 1e-12);

        let g = baseline(10, 0.0, 2.5);
        assert_eq!(g.expected_payment(&e, 1).unwrap(), 2.5);

        let g = baseline(10, 5.0, 3.0);
        assert!((g.expected_payment(&e, 0).unwrap() + 1.5).abs() < 1e-12);

        assert_eq!(
            g.expected_payment(&e, 10),
            Err(Error::IndexOutOfRange { index: 10, n: 10 })
        );
    }

    proptest! {
        #[test]
        fn utility_is_alpha_payment_minus_cost(
            alpha in 0.1f64..5.0,
            gamma in 0.0f64..50.0,
            delta in 0.0f64..50.0,
            efforts in proptest::collection::vec(0.0f64..5.0, 2..12),
        ) {
            let n = efforts.len();
            let s = SensorProfile { alpha, ..baseline_sensor() };
            let g = GameSpec::symmetric(n, s, ContractParams::new(gamma, delta).unwrap()).unwrap();
            let e = EffortProfile::new(efforts.clone()).unwrap();
            for (i, &a) in efforts.iter().enumerate() {
                let u = g.expected_utility(&e, i).unwrap();
                let via = alpha * g.expected_payment(&e, i).unwrap() - s.cost.value(a);
                prop_assert!((u - via).abs() <= 1e-12 * u.abs().max(1.0));
            }
        }

        #[test]
        fn mse_permutation_invariant(
            efforts in proptest::collection::vec(0.0f64..5.0, 2..12),
            rot in 0usize..12,
        ) {
            let n = efforts.len();
            let g = baseline(n, 1.0, 1.0);
            let mut permuted = efforts.clone();
            permuted.rotate_left(rot % n);
            permuted.reverse();
            let a = g.estimator_mse(&EffortProfile::new(efforts).unwrap()).unwrap();
            let b = g.estimator_mse(&EffortProfile::new(permuted).unwrap()).unwrap();
            prop_assert!((a - b).abs() <= 1e-15 * a.max(1.0));
        }

        #[test]
        fn symmetric_payment_collapses(
            n in 2usize..60,
            a in 0.0f64..10.0,
            gamma in 0.0f64..100.0,
            delta in 0.0f64..100.0,
        ) {
            let g = baseline(n, gamma, delta);
            let e = EffortProfile::uniform(n, a).unwrap();
            let eta = 1.0 / (1.0 + a);
            let closed = delta - gamma * (n as f64 - 1.0) * eta / n as f64;
            let p = g.expected_payment(&e, 0).unwrap();
            prop_assert!((p - closed).abs() <= 1e-12 * p.abs().max(closed.abs()).max(1.0));
        }
    }
}
