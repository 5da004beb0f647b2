use crate::error::{Error, Result};
use crate::pmh::ChainTrace;

/// Per-parameter posterior moments and equal-tailed 95% intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub parameter_names: Vec<String>,
    pub mean: Vec<f64>,
    /// Sample variance with the `n - 1` divisor (zero for a single row).
    pub variance: Vec<f64>,
    pub std: Vec<f64>,
    pub credible_interval_95: Vec<(f64, f64)>,
    /// Number of rows summarised.
    pub samples: usize,
}

/// Quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and non-empty.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summaries of the rows after `burn_in`.
pub fn posterior_summary(trace: &ChainTrace, burn_in: usize) -> Result<PosteriorSummary> {
    if burn_in >= trace.len() {
        return Err(Error::Diagnostics(format!(
            "burn-in {burn_in} leaves no samples in a trace of length {}",
            trace.len()
        )));
    }
    let d = trace.dim();
    let mut summary = PosteriorSummary {
        parameter_names: trace.parameter_names.clone(),
        mean: Vec::with_capacity(d),
        variance: Vec::with_capacity(d),
        std: Vec::with_capacity(d),
        credible_interval_95: Vec::with_capacity(d),
        samples: trace.len() - burn_in,
    };
    for j in 0..d {
        let mut column = trace.column(j, burn_in);
        let n = column.len() as f64;
        let mean = column.iter().sum::<f64>() / n;
        let variance = if column.len() > 1 {
            column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        column.sort_by(f64::total_cmp);
        summary.mean.push(mean);
        summary.variance.push(variance);
        summary.std.push(variance.sqrt());
        summary
            .credible_interval_95
            .push((quantile(&column, 0.025), quantile(&column, 0.975)));
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn single_column(values: Vec<f64>) -> ChainTrace {
        let k = values.len();
        ChainTrace {
            parameter_names: vec!["a".into()],
            parameters: values.into_iter().map(|v| vec![v]).collect(),
            log_likelihoods: vec![0.0; k],
            accepted: vec![true; k],
            state_trajectories: None,
        }
    }

    #[test]
    fn constant_trace() {
        let s = posterior_summary(&single_column(vec![2.5; 100]), 10).unwrap();
        assert_eq!(s.mean, vec![2.5]);
        assert_eq!(s.variance, vec![0.0]);
        assert_eq!(s.credible_interval_95, vec![(2.5, 2.5)]);
        assert_eq!(s.samples, 90);
    }

    #[test]
    fn gaussian_column() {
        let mut rng = stream(3);
        let v: Vec<f64> = (0..100_000).map(|_| 3.0 + 2.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        let s = posterior_summary(&single_column(v), 0).unwrap();
        assert!((s.mean[0] - 3.0).abs() < 0.05);
        assert!((s.variance[0] - 4.0).abs() < 0.15);
        assert!((s.std[0] - s.variance[0].sqrt()).abs() < 1e-12);
        let (lo, hi) = s.credible_interval_95[0];
        assert!((lo - (3.0 - 1.96 * 2.0)).abs() < 0.1 && (hi - (3.0 + 1.96 * 2.0)).abs() < 0.1);
    }

    #[test]
    fn matches_streaming_recomputation() {
        let mut rng = stream(5);
        let v: Vec<f64> = (0..5000).map(|_| rng.random::<f64>() * 10.0 - 3.0).collect();
        let s = posterior_summary(&single_column(v.clone()), 1000).unwrap();
        // Welford
        let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
        for &x in &v[1000..] {
            n += 1.0;
            let d = x - mean;
            mean += d / n;
            m2 += d * (x - mean);
        }
        assert!((s.mean[0] - mean).abs() < 1e-10);
        assert!((s.variance[0] - m2 / (n - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn empty_segment_is_an_error() {
        assert!(posterior_summary(&single_column(vec![1.0; 10]), 10).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&s, 0.0), 1.0);
        assert_eq!(quantile(&s, 1.0), 4.0);
        assert_eq!(quantile(&s, 0.5), 2.5);
    }
}
