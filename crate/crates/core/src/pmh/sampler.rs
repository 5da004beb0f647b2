use rand::Rng;

use super::{ChainConfig, ChainTrace, PosteriorTarget, Proposal};
use crate::error::{Error, Result};
use crate::stream;

/// `log p(theta') - log p(theta) + l' - l + log-Jacobian correction`.
///
/// A candidate outside the prior support gives `-inf` whatever the
/// likelihood values are.
pub fn log_acceptance_ratio(
    log_prior_candidate: f64,
    log_prior_current: f64,
    log_likelihood_candidate: f64,
    log_likelihood_current: f64,
    log_jacobian_correction: f64,
) -> f64 {
    if log_prior_candidate == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let r = log_prior_candidate - log_prior_current + log_likelihood_candidate - log_likelihood_current
        + log_jacobian_correction;
    if r.is_nan() {
        f64::NEG_INFINITY
    } else {
        r
    }
}

/// `min{1, exp(log_ratio)}`, with NaN mapped to zero.
pub fn acceptance_probability(log_ratio: f64) -> f64 {
    if log_ratio >= 0.0 {
        1.0
    } else if log_ratio.is_nan() {
        0.0
    } else {
        log_ratio.exp()
    }
}

struct ChainState {
    point: Vec<f64>,
    natural: Vec<f64>,
    log_prior: f64,
    log_jacobian: f64,
    log_likelihood: f64,
    trajectory: Option<Vec<f64>>,
}

/// Runs a random-walk Metropolis-Hastings chain against `target`.
///
/// The master stream seeded from `config.seed` drives the proposals, the
/// accept/reject uniforms and the seeds of the per-candidate filter streams,
/// so a trace is a deterministic function of its inputs. Invalid candidates
/// are rejected without running the filter; a candidate whose filter
/// degenerates is rejected as well.
pub fn run_chain<T: PosteriorTarget + ?Sized>(
    target: &T,
    config: &ChainConfig,
    proposal: &Proposal,
) -> Result<ChainTrace> {
    config.validate()?;
    let dim = target.dim();
    if config.initial_parameters.len() != dim {
        return Err(Error::Config(format!(
            "initial point has {} coordinates, target has {dim}",
            config.initial_parameters.len()
        )));
    }
    if proposal.dim() != dim {
        return Err(Error::Config(format!(
            "proposal dimension {} does not match target dimension {dim}",
            proposal.dim()
        )));
    }
    if !target.is_valid(&config.initial_parameters) {
        return Err(Error::Initialization(format!(
            "initial parameters {:?} are outside the parameter domain",
            config.initial_parameters
        )));
    }

    let mut master = stream(config.seed);
    let point = target
        .natural_to_point(&config.initial_parameters)
        .map_err(|e| Error::Initialization(e.to_string()))?;
    let natural = target.point_to_natural(&point);
    let initial = target
        .estimate(&natural, &mut stream(master.random()))
        .map_err(|e| Error::Initialization(e.to_string()))?;
    if !initial.log_likelihood.is_finite() {
        return Err(Error::Initialization("log-likelihood at the initial point is not finite".into()));
    }

    let mut state = ChainState {
        log_prior: target.log_prior(&natural),
        log_jacobian: target.log_jacobian(&natural),
        log_likelihood: initial.log_likelihood,
        trajectory: initial.trajectory,
        point,
        natural,
    };

    let k = config.iterations;
    let mut trace = ChainTrace {
        parameter_names: target.parameter_names(),
        parameters: Vec::with_capacity(k),
        log_likelihoods: Vec::with_capacity(k),
        accepted: Vec::with_capacity(k),
        state_trajectories: state.trajectory.as_ref().map(|_| Vec::with_capacity(k)),
    };
    record(&mut trace, &state, true);

    for _ in 1..k {
        let candidate_point = proposal.propose(&state.point, &mut master);
        let candidate = target.point_to_natural(&candidate_point);
        let filter_seed: u64 = master.random();
        let uniform: f64 = master.random();

        let mut evaluated = None;
        let log_ratio = if target.is_valid(&candidate) {
            match target.estimate(&candidate, &mut stream(filter_seed)) {
                Ok(est) if est.log_likelihood.is_finite() => {
                    let log_prior = target.log_prior(&candidate);
                    let log_jacobian = target.log_jacobian(&candidate);
                    let r = log_acceptance_ratio(
                        log_prior,
                        state.log_prior,
                        est.log_likelihood,
                        state.log_likelihood,
                        log_jacobian - state.log_jacobian,
                    );
                    evaluated = Some((est, log_prior, log_jacobian));
                    r
                }
                Ok(_) | Err(Error::Degeneracy { .. }) => f64::NEG_INFINITY,
                Err(e) => return Err(e),
            }
        } else {
            f64::NEG_INFINITY
        };

        let accept = uniform < acceptance_probability(log_ratio);
        if accept {
            let (est, log_prior, log_jacobian) = evaluated.expect("accepted candidates are evaluated");
            state = ChainState {
                point: candidate_point,
                natural: candidate,
                log_prior,
                log_jacobian,
                log_likelihood: est.log_likelihood,
                trajectory: est.trajectory,
            };
        }
        record(&mut trace, &state, accept);
    }
    Ok(trace)
}

fn record(trace: &mut ChainTrace, state: &ChainState, accepted: bool) {
    trace.parameters.push(state.natural.clone());
    trace.log_likelihoods.push(state.log_likelihood);
    trace.accepted.push(accepted);
    if let (Some(all), Some(current)) = (trace.state_trajectories.as_mut(), state.trajectory.as_ref()) {
        all.push(current.clone());
    }
}
