//! Exact filtering for the scalar LGSS model.

use crate::error::Result;
use crate::models::{normal_log_pdf, LgssParameters};

#[derive(Debug, Clone, PartialEq)]
pub struct KalmanOutput {
    /// `E[x_t | y_{1:t}]` for `t = 1..=T`.
    pub filtered_means: Vec<f64>,
    /// `Var[x_t | y_{1:t}]` for `t = 1..=T`.
    pub filtered_variances: Vec<f64>,
    /// `log p(y_{1:T})` in nats.
    pub log_likelihood: f64,
}

/// Scalar Kalman filter started from the point mass `x_0 = x0`.
pub fn kalman_filter(observations: &[f64], params: &LgssParameters, x0: f64) -> Result<KalmanOutput> {
    params.validate()?;
    let q = params.sigma_v * params.sigma_v;
    let r = params.sigma_e * params.sigma_e;

    let mut mean = x0;
    let mut var = 0.0;
    let mut log_likelihood = 0.0;
    let mut filtered_means = Vec::with_capacity(observations.len());
    let mut filtered_variances = Vec::with_capacity(observations.len());

    for &y in observations {
        let pred_mean = params.phi * mean;
        let pred_var = params.phi * params.phi * var + q;
        let innovation_var = pred_var + r;
        log_likelihood += normal_log_pdf(y, pred_mean, innovation_var);

        let gain = pred_var / innovation_var;
        mean = pred_mean + gain * (y - pred_mean);
        // P r / S rather than (1 - K) P; stays non-negative as r -> 0
        var = pred_var * r / innovation_var;
        filtered_means.push(mean);
        filtered_variances.push(var);
    }

    Ok(KalmanOutput {
        filtered_means,
        filtered_variances,
        log_likelihood,
    })
}
