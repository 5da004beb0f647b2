use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{LgssParameters, SvParameters};
use crate::particle_filter::{bootstrap_sv, fully_adapted_lgss};
use crate::{stream, Stream};

/// Spread of the log-likelihood estimator at one particle count.
#[derive(Debug, Clone, PartialEq)]
pub struct NStudyRow {
    pub particles: usize,
    pub mean_log_likelihood: f64,
    pub std_log_likelihood: f64,
    pub successful_runs: usize,
    /// Runs whose filter failed; they are excluded from the statistics.
    pub failed_runs: usize,
}

/// Repeats `filter` `runs` times for each particle count in `grid` and
/// reports the sample standard deviation of the log-likelihood estimates.
///
/// Run seeds are drawn up front from `seed`, so the result does not depend
/// on how rayon schedules the runs.
pub fn loglik_std_study<F>(grid: &[usize], runs: usize, seed: u64, filter: F) -> Result<Vec<NStudyRow>>
where
    F: Fn(usize, &mut Stream) -> Result<f64> + Sync,
{
    if runs < 2 {
        return Err(Error::Config("at least two runs per particle count are needed".into()));
    }
    let mut master = stream(seed);
    let mut rows = Vec::with_capacity(grid.len());
    for &n in grid {
        let seeds: Vec<u64> = (0..runs).map(|_| master.random()).collect();
        let results: Vec<Result<f64>> = seeds.par_iter().map(|&s| filter(n, &mut stream(s))).collect();
        let estimates: Vec<f64> = results
            .iter()
            .filter_map(|r| r.as_ref().ok().copied())
            .filter(|v| v.is_finite())
            .collect();
        let failed_runs = runs - estimates.len();
        if estimates.len() < 2 {
            return Err(Error::Diagnostics(format!(
                "only {} of {runs} filter runs succeeded with {n} particles",
                estimates.len()
            )));
        }
        let k = estimates.len() as f64;
        let mean = estimates.iter().sum::<f64>() / k;
        let var = estimates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
        rows.push(NStudyRow {
            particles: n,
            mean_log_likelihood: mean,
            std_log_likelihood: var.sqrt(),
            successful_runs: estimates.len(),
            failed_runs,
        });
    }
    Ok(rows)
}

/// [`loglik_std_study`] with the bootstrap filter of the SV model.
pub fn loglik_std_study_sv(
    observations: &[f64],
    params: &SvParameters,
    grid: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<NStudyRow>> {
    params.validate()?;
    loglik_std_study(grid, runs, seed, |n, s| {
        bootstrap_sv(observations, params, n, s).map(|o| o.log_likelihood)
    })
}

/// [`loglik_std_study`] with the fully adapted filter of the LGSS model.
pub fn loglik_std_study_lgss(
    observations: &[f64],
    params: &LgssParameters,
    x0: f64,
    grid: &[usize],
    runs: usize,
    seed: u64,
) -> Result<Vec<NStudyRow>> {
    params.validate()?;
    loglik_std_study(grid, runs, seed, |n, s| {
        fully_adapted_lgss(observations, params, n, x0, s).map(|o| o.log_likelihood)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::simulate_sv;

    #[test]
    fn failures_are_counted_and_excluded() {
        let rows = loglik_std_study(&[1], 10, 0, |_, s| {
            let u: f64 = s.random();
            if u < 0.3 {
                Err(Error::Degeneracy { step: Some(1) })
            } else {
                Ok(u)
            }
        })
        .unwrap();
        assert_eq!(rows[0].failed_runs + rows[0].successful_runs, 10);
    }

    #[test]
    fn needs_two_runs() {
        assert!(loglik_std_study(&[10], 1, 0, |_, _| Ok(0.0)).is_err());
    }

    #[test]
    fn reproducible_and_decreasing() {
        let theta = SvParameters::new(0.0, 0.9, 0.2);
        let y = simulate_sv(&theta, 200, &mut stream(1)).unwrap().observations;
        let a = loglik_std_study_sv(&y, &theta, &[20, 400], 60, 9).unwrap();
        let b = loglik_std_study_sv(&y, &theta, &[20, 400], 60, 9).unwrap();
        assert_eq!(a, b);
        assert!(a[1].std_log_likelihood < a[0].std_log_likelihood);
    }
}
