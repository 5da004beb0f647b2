use crate::error::{Error, Result};
use crate::pmh::ChainTrace;

/// Sample autocorrelations `rho_1..=rho_max_lag`, using the biased
/// (divide-by-K) autocovariance.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if n < max_lag + 2 {
        return Err(Error::Diagnostics(format!(
            "sequence of length {n} is too short for {max_lag} lags"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let c0: f64 = centred.iter().map(|v| v * v).sum();
    if c0.is_nan() || c0 <= 0.0 || x.iter().all(|&v| v == x[0]) {
        return Err(Error::Diagnostics("sequence has zero variance".into()));
    }
    Ok((1..=max_lag)
        .map(|tau| {
            let c: f64 = centred[..n - tau].iter().zip(&centred[tau..]).map(|(a, b)| a * b).sum();
            c / c0
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IactEstimate {
    /// `1 + 2 * sum_{tau=1}^{L} rho_tau`
    pub iact: f64,
    pub acf: Vec<f64>,
}

/// Integrated autocorrelation time with the ACF sum cut off at `lags`.
pub fn estimate_iact(x: &[f64], lags: usize) -> Result<IactEstimate> {
    let acf = autocorrelation(x, lags)?;
    let iact = 1.0 + 2.0 * acf.iter().sum::<f64>();
    Ok(IactEstimate { iact, acf })
}

/// Per-parameter mixing statistics of a chain after burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub parameter_names: Vec<String>,
    pub acf: Vec<Vec<f64>>,
    pub iact: Vec<f64>,
    pub lag_cutoff: usize,
    pub acceptance_rate: f64,
}

impl MixingReport {
    pub fn max_iact(&self) -> f64 {
        self.iact.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn mixing_report(trace: &ChainTrace, burn_in: usize, lags: usize) -> Result<MixingReport> {
    let mut acf = Vec::with_capacity(trace.dim());
    let mut iact = Vec::with_capacity(trace.dim());
    for j in 0..trace.dim() {
        let column = trace.column(j, burn_in);
        let est = estimate_iact(&column, lags)
            .map_err(|e| Error::Diagnostics(format!("{}: {e}", trace.parameter_names[j])))?;
        acf.push(est.acf);
        iact.push(est.iact);
    }
    Ok(MixingReport {
        parameter_names: trace.parameter_names.clone(),
        acf,
        iact,
        lag_cutoff: lags,
        acceptance_rate: trace.acceptance_rate(burn_in),
    })
}

/// The smallest lag whose autocorrelation drops below 0.05, capped at 100.
pub fn default_thinning_lag(x: &[f64]) -> Result<usize> {
    const CAP: usize = 100;
    let max_lag = CAP.min(x.len().saturating_sub(2));
    if max_lag == 0 {
        return Err(Error::Diagnostics("sequence too short to choose a thinning lag".into()));
    }
    let acf = autocorrelation(x, max_lag)?;
    Ok(acf.iter().position(|&r| r < 0.05).map_or(CAP, |i| i + 1))
}
