//! Model definitions: the linear Gaussian state-space (LGSS) model and the
//! stochastic volatility (SV) model, their priors, simulators and the
//! unconstrained reparametrisation of the SV parameters.

mod lgss;
mod sv;

pub use lgss::{log_prior_lgss, simulate_lgss, LgssModel, LgssParameters, LgssPrior};
pub use sv::{
    log_jacobian_correction, log_prior_sv, simulate_sv, SvParameters, UnconstrainedSvParameters,
};
pub(crate) use sv::sv_log_jacobian;

use rand::Rng;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Log density of `N(x; mean, variance)`.
#[inline]
pub fn normal_log_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + variance.ln() + d * d / variance)
}

/// Observations `y_{1:T}` and, for simulated data, the latent path `x_{0:T}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub observations: Vec<f64>,
    pub states: Option<Vec<f64>>,
    pub initial_state: f64,
}

impl TimeSeries {
    /// A series of observations with no known latent path.
    pub fn from_observations(observations: Vec<f64>) -> Self {
        Self {
            observations,
            states: None,
            initial_state: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// The first `len` observations (and states `x_{0:len}` when present).
    pub fn prefix(&self, len: usize) -> TimeSeries {
        let len = len.min(self.len());
        TimeSeries {
            observations: self.observations[..len].to_vec(),
            states: self.states.as_ref().map(|x| x[..=len].to_vec()),
            initial_state: self.initial_state,
        }
    }
}

/// A scalar state-space model in the form needed by the bootstrap particle
/// filter: an initial law, a transition kernel to sample from and an
/// observation density to weight with.
pub trait StateSpaceModel {
    fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    fn sample_transition<R: Rng + ?Sized>(&self, previous: f64, rng: &mut R) -> f64;

    fn log_observation_density(&self, observation: f64, state: f64) -> f64;
}
