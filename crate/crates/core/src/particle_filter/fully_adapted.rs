use rand::Rng;
use rand_distr::StandardNormal;

use super::{log_likelihood_increment, resample_into, FilterOutput, ParticleSystem};
use crate::error::{Error, Result};
use crate::models::{normal_log_pdf, LgssParameters};

/// Fully adapted particle filter for the LGSS model.
///
/// At step `t` the particles at `t - 1` are weighted with the predictive
/// density `N(y_t; phi x, sigma_v^2 + sigma_e^2)`, resampled, and moved with
/// the optimal proposal `p(x_t | x_{t-1}, y_t)`. The resulting particles are
/// equally weighted, so the state estimate is their plain mean. Column `t`
/// of the stored log-weights is therefore the weight against `y_{t+1}`; the
/// final column is uniform.
pub fn fully_adapted_lgss<R: Rng + ?Sized>(
    observations: &[f64],
    params: &LgssParameters,
    num_particles: usize,
    x0: f64,
    rng: &mut R,
) -> Result<FilterOutput> {
    params.validate()?;
    if num_particles == 0 {
        return Err(Error::Config("at least one particle is required".into()));
    }
    if observations.is_empty() {
        return Err(Error::Config("no observations".into()));
    }
    let n = num_particles;
    let len = observations.len();

    let var_v = params.sigma_v * params.sigma_v;
    let var_e = params.sigma_e * params.sigma_e;
    let predictive_var = var_v + var_e;
    let proposal_var = 1.0 / (1.0 / var_v + 1.0 / var_e);
    let proposal_std = proposal_var.sqrt();

    let mut system = ParticleSystem::new(n, len);
    system.particles_mut(0).fill(x0);
    let mut state_estimates = Vec::with_capacity(len + 1);
    state_estimates.push(x0);
    let mut log_likelihood = 0.0;
    let mut cumulative = Vec::with_capacity(n);
    let mut ancestors = vec![0; n];

    for t in 1..=len {
        let y = observations[t - 1];
        let degenerate = |_| Error::Degeneracy { step: Some(t) };

        let (max, sum) = system
            .weigh(t - 1, |x| normal_log_pdf(y, params.phi * x, predictive_var))
            .map_err(degenerate)?;
        log_likelihood += log_likelihood_increment(max, sum, n);

        resample_into(system.weights(t - 1), rng, &mut cumulative, &mut ancestors).map_err(degenerate)?;
        system.ancestors_mut(t).copy_from_slice(&ancestors);

        let (previous, current) = system.particle_columns(t);
        let mut total = 0.0;
        for (x, &a) in current.iter_mut().zip(&ancestors) {
            let z: f64 = rng.sample(StandardNormal);
            let mean = proposal_var * (y / var_e + params.phi * previous[a] / var_v);
            *x = mean + proposal_std * z;
            total += *x;
        }
        state_estimates.push(total / n as f64);
    }

    Ok(FilterOutput {
        state_estimates,
        log_likelihood,
        sampled_trajectory: None,
        system,
    })
}
