use super::{run_chain, ChainConfig, ChainTrace, LikelihoodEstimate, PosteriorTarget, ProposalConfig};
use crate::error::{Error, Result};
use crate::kalman::kalman_filter;
use crate::models::{log_prior_sv, LgssParameters, LgssPrior, SvParameters, TimeSeries, UnconstrainedSvParameters};
use crate::particle_filter::{bootstrap_sv, fully_adapted_lgss};
use crate::Stream;

/// Posterior of `phi` in the LGSS model with `sigma_v`, `sigma_e` held fixed,
/// with the likelihood estimated by the fully adapted particle filter.
#[derive(Debug, Clone)]
pub struct LgssTarget<'a> {
    pub observations: &'a [f64],
    pub sigma_v: f64,
    pub sigma_e: f64,
    pub x0: f64,
    pub particles: usize,
    pub prior: LgssPrior,
}

impl LgssTarget<'_> {
    fn params(&self, natural: &[f64]) -> LgssParameters {
        LgssParameters::new(natural[0], self.sigma_v, self.sigma_e)
    }
}

impl PosteriorTarget for LgssTarget<'_> {
    fn parameter_names(&self) -> Vec<String> {
        vec!["phi".into()]
    }

    fn dim(&self) -> usize {
        1
    }

    fn is_valid(&self, natural: &[f64]) -> bool {
        self.params(natural).is_valid()
    }

    fn log_prior(&self, natural: &[f64]) -> f64 {
        self.prior.log_density(natural[0])
    }

    fn estimate(&self, natural: &[f64], stream: &mut Stream) -> Result<LikelihoodEstimate> {
        let out = fully_adapted_lgss(self.observations, &self.params(natural), self.particles, self.x0, stream)?;
        Ok(LikelihoodEstimate {
            log_likelihood: out.log_likelihood,
            trajectory: None,
        })
    }
}

/// Same posterior as [`LgssTarget`] but with the exact Kalman likelihood,
/// which turns the sampler into plain Metropolis-Hastings.
#[derive(Debug, Clone)]
pub struct KalmanLgssTarget<'a> {
    pub observations: &'a [f64],
    pub sigma_v: f64,
    pub sigma_e: f64,
    pub x0: f64,
    pub prior: LgssPrior,
}

impl PosteriorTarget for KalmanLgssTarget<'_> {
    fn parameter_names(&self) -> Vec<String> {
        vec!["phi".into()]
    }

    fn dim(&self) -> usize {
        1
    }

    fn is_valid(&self, natural: &[f64]) -> bool {
        LgssParameters::new(natural[0], self.sigma_v, self.sigma_e).is_valid()
    }

    fn log_prior(&self, natural: &[f64]) -> f64 {
        self.prior.log_density(natural[0])
    }

    fn estimate(&self, natural: &[f64], _stream: &mut Stream) -> Result<LikelihoodEstimate> {
        let params = LgssParameters::new(natural[0], self.sigma_v, self.sigma_e);
        let kf = kalman_filter(self.observations, &params, self.x0)?;
        Ok(LikelihoodEstimate {
            log_likelihood: kf.log_likelihood,
            trajectory: None,
        })
    }
}

/// Posterior of `{mu, phi, sigma_v}` in the SV model, likelihood from the
/// bootstrap filter. Each evaluation also returns a sampled log-volatility
/// trajectory.
///
/// With `reparametrized` set the chain moves in `{mu, artanh(phi), ln(sigma_v)}`
/// and the acceptance ratio carries the Jacobian correction; priors and
/// likelihoods are still evaluated at the natural parameters.
#[derive(Debug, Clone)]
pub struct SvTarget<'a> {
    pub observations: &'a [f64],
    pub particles: usize,
    pub reparametrized: bool,
}

impl PosteriorTarget for SvTarget<'_> {
    fn parameter_names(&self) -> Vec<String> {
        vec!["mu".into(), "phi".into(), "sigma_v".into()]
    }

    fn dim(&self) -> usize {
        3
    }

    fn point_to_natural(&self, point: &[f64]) -> Vec<f64> {
        if self.reparametrized {
            UnconstrainedSvParameters::from_slice(point).from_constrained().to_array().to_vec()
        } else {
            point.to_vec()
        }
    }

    fn natural_to_point(&self, natural: &[f64]) -> Result<Vec<f64>> {
        if self.reparametrized {
            Ok(SvParameters::from_slice(natural).to_unconstrained()?.to_array().to_vec())
        } else {
            Ok(natural.to_vec())
        }
    }

    fn is_valid(&self, natural: &[f64]) -> bool {
        SvParameters::from_slice(natural).is_valid()
    }

    fn log_prior(&self, natural: &[f64]) -> f64 {
        log_prior_sv(&SvParameters::from_slice(natural))
    }

    fn log_jacobian(&self, natural: &[f64]) -> f64 {
        if self.reparametrized {
            crate::models::sv_log_jacobian(&SvParameters::from_slice(natural))
        } else {
            0.0
        }
    }

    fn estimate(&self, natural: &[f64], stream: &mut Stream) -> Result<LikelihoodEstimate> {
        let out = bootstrap_sv(self.observations, &SvParameters::from_slice(natural), self.particles, stream)?;
        Ok(LikelihoodEstimate {
            log_likelihood: out.log_likelihood,
            trajectory: out.sampled_trajectory,
        })
    }
}

fn require_data(y: &TimeSeries) -> Result<()> {
    if y.is_empty() {
        Err(Error::Config("no observations".into()))
    } else {
        Ok(())
    }
}

/// PMH for `phi` in the LGSS model with `sigma_v`, `sigma_e` fixed, using the
/// default `TN_(-1,1)(0, 0.5)` prior.
pub fn run_pmh_lgss(
    y: &TimeSeries,
    config: &ChainConfig,
    proposal: &ProposalConfig,
    sigma_v: f64,
    sigma_e: f64,
    x0: f64,
) -> Result<ChainTrace> {
    require_data(y)?;
    if proposal.reparametrized {
        return Err(Error::Config("the LGSS sampler has no reparametrisation".into()));
    }
    let target = LgssTarget {
        observations: &y.observations,
        sigma_v,
        sigma_e,
        x0,
        particles: config.particles,
        prior: LgssPrior::default(),
    };
    run_chain(&target, config, &proposal.build()?)
}

/// PMH for `{mu, phi, sigma_v}` in the SV model. The proposal's
/// `reparametrized` flag selects the unconstrained random walk; the
/// covariance is then interpreted in unconstrained coordinates.
pub fn run_pmh_sv(y: &TimeSeries, config: &ChainConfig, proposal: &ProposalConfig) -> Result<ChainTrace> {
    require_data(y)?;
    let target = SvTarget {
        observations: &y.observations,
        particles: config.particles,
        reparametrized: proposal.reparametrized,
    };
    run_chain(&target, config, &proposal.build()?)
}
