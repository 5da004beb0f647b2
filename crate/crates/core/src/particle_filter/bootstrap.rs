use rand::Rng;

use super::{log_likelihood_increment, resample_into, sample_trajectory, FilterOutput, ParticleSystem};
use crate::error::{Error, Result};
use crate::models::{StateSpaceModel, SvParameters};

/// Bootstrap particle filter: propose from the state dynamics, weight by the
/// observation density, resample multinomially before every propagation.
///
/// The state estimate is the weighted mean `sum_i w_t^(i) x_t^(i)` and a
/// trajectory is drawn from the final genealogy.
pub fn bootstrap_filter<M, R>(
    model: &M,
    observations: &[f64],
    num_particles: usize,
    rng: &mut R,
) -> Result<FilterOutput>
where
    M: StateSpaceModel + ?Sized,
    R: Rng + ?Sized,
{
    if num_particles == 0 {
        return Err(Error::Config("at least one particle is required".into()));
    }
    if observations.is_empty() {
        return Err(Error::Config("no observations".into()));
    }
    let n = num_particles;
    let len = observations.len();

    let mut system = ParticleSystem::new(n, len);
    for x in system.particles_mut(0) {
        *x = model.sample_initial(rng);
    }
    let mut state_estimates = Vec::with_capacity(len + 1);
    state_estimates.push(system.particles(0).iter().sum::<f64>() / n as f64);
    let mut log_likelihood = 0.0;
    let mut cumulative = Vec::with_capacity(n);
    let mut ancestors = vec![0; n];

    for t in 1..=len {
        let y = observations[t - 1];
        let degenerate = |_| Error::Degeneracy { step: Some(t) };

        resample_into(system.weights(t - 1), rng, &mut cumulative, &mut ancestors).map_err(degenerate)?;
        system.ancestors_mut(t).copy_from_slice(&ancestors);

        let (previous, current) = system.particle_columns(t);
        for (x, &a) in current.iter_mut().zip(&ancestors) {
            *x = model.sample_transition(previous[a], rng);
        }

        let (max, sum) = system
            .weigh(t, |x| model.log_observation_density(y, x))
            .map_err(degenerate)?;
        log_likelihood += log_likelihood_increment(max, sum, n);

        let estimate = system
            .weights(t)
            .iter()
            .zip(system.particles(t))
            .map(|(w, x)| w * x)
            .sum();
        state_estimates.push(estimate);
    }

    let trajectory = sample_trajectory(&system, rng)?;
    Ok(FilterOutput {
        state_estimates,
        log_likelihood,
        sampled_trajectory: Some(trajectory),
        system,
    })
}

/// Bootstrap filter for the stochastic volatility model.
pub fn bootstrap_sv<R: Rng + ?Sized>(
    observations: &[f64],
    params: &SvParameters,
    num_particles: usize,
    rng: &mut R,
) -> Result<FilterOutput> {
    params.validate()?;
    bootstrap_filter(params, observations, num_particles, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simulate_sv;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn data() -> Vec<f64> {
        simulate_sv(&SvParameters::default(), 100, &mut ChaCha8Rng::seed_from_u64(1))
            .unwrap()
            .observations
    }

    #[test]
    fn single_particle_estimate_is_the_path() {
        let y = data();
        let out = bootstrap_sv(&y, &SvParameters::default(), 1, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(out.state_estimates, out.system.path(0));
        assert_eq!(out.sampled_trajectory.as_deref(), Some(out.state_estimates.as_slice()));
    }

    #[test]
    fn trajectory_follows_a_lineage() {
        let y = data();
        let out = bootstrap_sv(&y, &SvParameters::default(), 50, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let traj = out.sampled_trajectory.unwrap();
        assert_eq!(traj.len(), 101);
        let found = (0..50).any(|i| out.system.path(i) == traj);
        assert!(found);
        for t in 0..out.system.num_steps() {
            let s: f64 = out.system.weights(t).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        let y = data();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            bootstrap_sv(&y, &SvParameters::new(0.0, 1.0, 0.2), 10, &mut rng),
            Err(Error::ParameterDomain(_))
        ));
    }
}
