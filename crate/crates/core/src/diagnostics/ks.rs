use super::acf::default_thinning_lag;
use crate::error::{Error, Result};

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic critical value `c(alpha) sqrt((n + m) / (n m))` with
/// `c(alpha) = sqrt(-ln(alpha / 2) / 2)`.
pub fn ks_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical_value: f64,
    pub thinning_lag: usize,
    /// Thinned sizes of the two halves.
    pub sample_sizes: (usize, usize),
    /// `true` when the halves are indistinguishable at level `alpha`.
    pub passed: bool,
}

/// Splits the post-burn-in samples into two equal halves, thins each by
/// keeping every `thinning_lag`-th value and compares them with a two-sample
/// KS test. Without a lag, [`default_thinning_lag`] of the post-burn-in
/// segment is used.
pub fn ks_stationarity_test(
    x: &[f64],
    burn_in: usize,
    thinning_lag: Option<usize>,
    alpha: f64,
) -> Result<KsOutcome> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let stationary = x
        .get(burn_in..)
        .ok_or_else(|| Error::Diagnostics("burn-in exceeds the trace length".into()))?;
    let lag = match thinning_lag {
        Some(0) => return Err(Error::Config("thinning lag must be positive".into())),
        Some(l) => l,
        None => default_thinning_lag(stationary)?,
    };
    let half = stationary.len() / 2;
    let first: Vec<f64> = stationary[..half].iter().step_by(lag).copied().collect();
    let second: Vec<f64> = stationary[half..2 * half].iter().step_by(lag).copied().collect();
    if first.len() < 20 || second.len() < 20 {
        return Err(Error::Diagnostics(format!(
            "thinned halves have {} and {} samples, need at least 20 each",
            first.len(),
            second.len()
        )));
    }
    let statistic = ks_statistic(&first, &second);
    let critical_value = ks_critical_value(alpha, first.len(), second.len());
    Ok(KsOutcome {
        statistic,
        critical_value,
        thinning_lag: lag,
        sample_sizes: (first.len(), second.len()),
        passed: statistic < critical_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    /// Brute-force sup over every sample point.
    fn statistic_oracle(a: &[f64], b: &[f64]) -> f64 {
        let ecdf = |s: &[f64], v: f64| s.iter().filter(|&&x| x <= v).count() as f64 / s.len() as f64;
        a.iter()
            .chain(b)
            .map(|&v| (ecdf(a, v) - ecdf(b, v)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn statistic_extremes() {
        assert_eq!(ks_statistic(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
    }

    #[test]
    fn critical_value_known() {
        // c(0.05) = 1.358
        let c = ks_critical_value(0.05, 1, 1) / 2f64.sqrt();
        assert!((c - 1.3581).abs() < 1e-3, "{c}");
    }

    #[test]
    fn size_under_the_null() {
        let reps = 200;
        let mut rejections = 0;
        for r in 0..reps {
            let x = normals(400, 1000 + r);
            if !ks_stationarity_test(&x, 0, Some(1), 0.05).unwrap().passed {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / reps as f64;
        assert!((rate - 0.05).abs() <= 0.04, "{rate}");
    }

    #[test]
    fn gross_shift_fails() {
        let mut x = normals(2000, 7);
        for v in &mut x[1000..] {
            *v += 5.0;
        }
        assert!(!ks_stationarity_test(&x, 0, Some(1), 0.05).unwrap().passed);
    }

    #[test]
    fn thinned_null_passes() {
        let mut failures = 0;
        for seed in 0..20 {
            let x = normals(10_000, 100 + seed);
            let out = ks_stationarity_test(&x, 0, Some(50), 0.05).unwrap();
            assert_eq!(out.sample_sizes, (100, 100));
            failures += usize::from(!out.passed);
        }
        assert!(failures <= 4, "{failures}");
    }

    #[test]
    fn too_short() {
        let x = normals(100, 9);
        assert!(ks_stationarity_test(&x, 0, Some(5), 0.05).is_err());
        assert!(ks_stationarity_test(&x, 200, Some(1), 0.05).is_err());
    }

    proptest! {
        #[test]
        fn statistic_matches_brute_force(
            a in proptest::collection::vec(-3i32..3, 1..40),
            b in proptest::collection::vec(-3i32..3, 1..40),
        ) {
            let a: Vec<f64> = a.into_iter().map(f64::from).collect();
            let b: Vec<f64> = b.into_iter().map(f64::from).collect();
            prop_assert!((ks_statistic(&a, &b) - statistic_oracle(&a, &b)).abs() < 1e-12);
        }

        #[test]
        fn affine_invariance(seed in 0u64..1000, scale in 0.01f64..100.0, shift in -1e3f64..1e3) {
            let x = normals(200, seed);
            let y: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
            let a = ks_stationarity_test(&x, 0, Some(2), 0.05).unwrap();
            let b = ks_stationarity_test(&y, 0, Some(2), 0.05).unwrap();
            prop_assert_eq!(a.statistic, b.statistic);
            prop_assert_eq!(a.passed, b.passed);
        }
    }
}
