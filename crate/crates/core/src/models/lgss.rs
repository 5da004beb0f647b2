use rand::Rng;
use rand_distr::StandardNormal;

use super::{normal_log_pdf, StateSpaceModel, TimeSeries};
use crate::error::{Error, Result};

/// Parameters `{phi, sigma_v, sigma_e}` of
/// `x_t = phi x_{t-1} + sigma_v v_t`, `y_t = x_t + sigma_e e_t`.
///
/// Out-of-domain values are representable; the sampler has to be able to
/// hold (and reject) them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssParameters {
    pub phi: f64,
    pub sigma_v: f64,
    pub sigma_e: f64,
}

impl LgssParameters {
    pub fn new(phi: f64, sigma_v: f64, sigma_e: f64) -> Self {
        Self {
            phi,
            sigma_v,
            sigma_e,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.phi.abs() < 1.0 && self.sigma_v > 0.0 && self.sigma_e > 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!(
                "LGSS requires |phi| < 1, sigma_v > 0, sigma_e > 0; got {self:?}"
            )))
        }
    }
}

impl Default for LgssParameters {
    fn default() -> Self {
        Self::new(0.75, 1.0, 0.1)
    }
}

/// Draws `x_{0:T}` and `y_{1:T}` with `x_0 = x0`.
pub fn simulate_lgss<R: Rng + ?Sized>(
    params: &LgssParameters,
    len: usize,
    x0: f64,
    rng: &mut R,
) -> Result<TimeSeries> {
    params.validate()?;
    if len == 0 {
        return Err(Error::Config("series length must be at least 1".into()));
    }
    let mut states = Vec::with_capacity(len + 1);
    let mut observations = Vec::with_capacity(len);
    states.push(x0);
    let mut x = x0;
    for _ in 0..len {
        let v: f64 = rng.sample(StandardNormal);
        let e: f64 = rng.sample(StandardNormal);
        x = params.phi * x + params.sigma_v * v;
        states.push(x);
        observations.push(x + params.sigma_e * e);
    }
    Ok(TimeSeries {
        observations,
        states: Some(states),
        initial_state: x0,
    })
}

/// Gaussian prior on `phi` truncated to `(-1, 1)`.
///
/// The truncation constant is omitted; it cancels in acceptance ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssPrior {
    pub mean: f64,
    pub variance: f64,
}

impl Default for LgssPrior {
    fn default() -> Self {
        Self {
            mean: 0.0,
            variance: 0.5,
        }
    }
}

impl LgssPrior {
    pub fn log_density(&self, phi: f64) -> f64 {
        if phi.abs() < 1.0 {
            normal_log_pdf(phi, self.mean, self.variance)
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// Log prior of `phi` under the default `TN_(-1,1)(0, 0.5)`.
pub fn log_prior_lgss(phi: f64) -> f64 {
    LgssPrior::default().log_density(phi)
}

/// LGSS model with a point-mass initial state, used by the bootstrap filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgssModel {
    pub params: LgssParameters,
    pub x0: f64,
}

impl StateSpaceModel for LgssModel {
    fn sample_initial<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.x0
    }

    fn sample_transition<R: Rng + ?Sized>(&self, previous: f64, rng: &mut R) -> f64 {
        let v: f64 = rng.sample(StandardNormal);
        self.params.phi * previous + self.params.sigma_v * v
    }

    fn log_observation_density(&self, observation: f64, state: f64) -> f64 {
        normal_log_pdf(observation, state, self.params.sigma_e * self.params.sigma_e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simulation_is_deterministic_per_seed() {
        let p = LgssParameters::default();
        let a = simulate_lgss(&p, 50, 0.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = simulate_lgss(&p, 50, 0.0, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let c = simulate_lgss(&p, 50, 0.0, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.observations, c.observations);
        assert_eq!(a.states.as_ref().unwrap().len(), 51);
        assert_eq!(a.states.unwrap()[0], 0.0);
    }

    #[test]
    fn degenerate_state_noise() {
        let p = LgssParameters::new(0.0, 1e-12, 0.1);
        let ts = simulate_lgss(&p, 2000, 0.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(ts.states.unwrap().iter().all(|x| x.abs() < 1e-10));
        let n = ts.observations.len() as f64;
        let var = ts.observations.iter().map(|y| y * y).sum::<f64>() / n;
        assert!((var - 0.01).abs() < 0.002, "{var}");
    }

    #[test]
    fn stationary_variance() {
        // sigma_v^2 / (1 - phi^2) = 1 / 0.4375
        let expected = 1.0 / (1.0 - 0.75f64 * 0.75);
        assert!((expected - 2.2857).abs() < 1e-4);
        let p = LgssParameters::default();
        let ts = simulate_lgss(&p, 100_000, 0.0, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let x = ts.states.unwrap();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var - expected).abs() < 0.1, "{var}");
    }

    #[test]
    fn rejects_invalid_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for p in [
            LgssParameters::new(1.0, 1.0, 0.1),
            LgssParameters::new(0.5, 0.0, 0.1),
            LgssParameters::new(0.5, 1.0, -0.1),
        ] {
            assert!(matches!(
                simulate_lgss(&p, 10, 0.0, &mut rng),
                Err(Error::ParameterDomain(_))
            ));
        }
    }

    #[test]
    fn prior_support_and_symmetry() {
        assert_eq!(log_prior_lgss(1.5), f64::NEG_INFINITY);
        assert_eq!(log_prior_lgss(1.0), f64::NEG_INFINITY);
        assert_eq!(log_prior_lgss(-1.0), f64::NEG_INFINITY);
        for a in [0.0, 0.1, 0.37, 0.9, 0.999] {
            assert_eq!(log_prior_lgss(a), log_prior_lgss(-a));
            assert!(log_prior_lgss(a).is_finite());
        }
    }

    #[test]
    fn prior_difference_with_variance_half() {
        // -(0^2 - 0.5^2) / (2 * 0.5)
        let d = log_prior_lgss(0.0) - log_prior_lgss(0.5);
        assert!((d - 0.25).abs() < 1e-14, "{d}");
        // standard-normal reading is one field away
        let std_normal = LgssPrior {
            mean: 0.0,
            variance: 1.0,
        };
        let d = std_normal.log_density(0.0) - std_normal.log_density(0.5);
        assert!((d - 0.125).abs() < 1e-14);
    }
}
