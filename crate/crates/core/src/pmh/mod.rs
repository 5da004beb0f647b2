//! Particle Metropolis-Hastings.
//!
//! The sampler is written once against [`PosteriorTarget`], which bundles a
//! prior, a validity predicate, an optional reparametrisation and a
//! likelihood estimator. Each candidate is evaluated with its own freshly
//! seeded [`Stream`](crate::Stream) and the estimate of an accepted candidate
//! is stored and reused, never recomputed.

mod preconditioner;
mod proposal;
mod sampler;
mod targets;

pub use preconditioner::{estimate_preconditioner, estimate_preconditioner_unconstrained, sample_covariance};
pub use proposal::{Proposal, ProposalConfig, ProposalKind, OPTIMAL_SCALE};
pub use sampler::{acceptance_probability, log_acceptance_ratio, run_chain};
pub use targets::{run_pmh_lgss, run_pmh_sv, KalmanLgssTarget, LgssTarget, SvTarget};

use crate::error::{Error, Result};
use crate::Stream;

/// A likelihood estimate for one parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodEstimate {
    pub log_likelihood: f64,
    pub trajectory: Option<Vec<f64>>,
}

/// The posterior the chain targets.
///
/// "Natural" parameters are the model parameters; "chain" coordinates are
/// the space the random walk moves in. They coincide unless the target is
/// reparametrised.
pub trait PosteriorTarget {
    fn parameter_names(&self) -> Vec<String>;

    fn dim(&self) -> usize;

    fn point_to_natural(&self, point: &[f64]) -> Vec<f64> {
        point.to_vec()
    }

    fn natural_to_point(&self, natural: &[f64]) -> Result<Vec<f64>> {
        Ok(natural.to_vec())
    }

    fn is_valid(&self, natural: &[f64]) -> bool;

    /// Log prior density, `-inf` outside the support.
    fn log_prior(&self, natural: &[f64]) -> f64;

    /// `log |d natural / d chain|`; zero when no reparametrisation is used.
    fn log_jacobian(&self, _natural: &[f64]) -> f64 {
        0.0
    }

    fn estimate(&self, natural: &[f64], stream: &mut Stream) -> Result<LikelihoodEstimate>;
}

/// Length, burn-in, particle count, starting point and seed of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    /// `K`, the number of rows in the trace including the initial point.
    pub iterations: usize,
    pub burn_in: usize,
    pub particles: usize,
    /// `theta^(0)` in natural parameters.
    pub initial_parameters: Vec<f64>,
    pub seed: u64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.particles == 0 {
            return Err(Error::Config("particles must be positive".into()));
        }
        Ok(())
    }
}

/// The output of a chain: one row per iteration.
///
/// Row 0 is the initial point and counts as accepted. A rejected row is an
/// exact copy of the row before it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub parameter_names: Vec<String>,
    pub parameters: Vec<Vec<f64>>,
    pub log_likelihoods: Vec<f64>,
    pub accepted: Vec<bool>,
    pub state_trajectories: Option<Vec<Vec<f64>>>,
}

impl ChainTrace {
    pub fn len(&self) -> usize {
        self.parameters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parameters.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.parameter_names.len()
    }

    /// Samples of parameter `j` from row `from` onwards.
    pub fn column(&self, j: usize, from: usize) -> Vec<f64> {
        self.parameters.iter().skip(from).map(|row| row[j]).collect()
    }

    /// Fraction of accepted proposals among rows `max(from, 1)..`.
    pub fn acceptance_rate(&self, from: usize) -> f64 {
        let start = from.max(1);
        if start >= self.len() {
            return 0.0;
        }
        let n = self.len() - start;
        self.accepted[start..].iter().filter(|&&a| a).count() as f64 / n as f64
    }
}
