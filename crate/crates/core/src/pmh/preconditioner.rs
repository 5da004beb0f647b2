use nalgebra::DMatrix;

use super::ChainTrace;
use crate::error::{Error, Result};
use crate::models::SvParameters;

/// Unbiased sample covariance of `rows` (each row one observation).
pub fn sample_covariance(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n < 2 {
        return Err(Error::Diagnostics("need at least two rows for a covariance".into()));
    }
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = DMatrix::zeros(d, d);
    for row in rows {
        for i in 0..d {
            let di = row[i] - mean[i];
            for j in 0..=i {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(cov)
}

/// Posterior covariance estimated from the rows of a pilot run after
/// `burn_in`, for use as a proposal pre-conditioner.
///
/// If the smallest eigenvalue falls below `1e-10 * trace`, that floor is
/// added to the diagonal.
pub fn estimate_preconditioner(trace: &ChainTrace, burn_in: usize) -> Result<DMatrix<f64>> {
    let rows = trace.parameters.get(burn_in..).unwrap_or(&[]);
    preconditioner_from_rows(rows, trace.dim())
}

/// As [`estimate_preconditioner`], but for an SV trace mapped to the
/// unconstrained coordinates `{mu, artanh(phi), ln(sigma_v)}` first.
pub fn estimate_preconditioner_unconstrained(trace: &ChainTrace, burn_in: usize) -> Result<DMatrix<f64>> {
    if trace.dim() != 3 {
        return Err(Error::Diagnostics("unconstrained pre-conditioner needs an SV trace".into()));
    }
    let rows = trace
        .parameters
        .get(burn_in..)
        .unwrap_or(&[])
        .iter()
        .map(|r| Ok(SvParameters::from_slice(r).to_unconstrained()?.to_array().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    preconditioner_from_rows(&rows, 3)
}

fn preconditioner_from_rows(rows: &[Vec<f64>], dim: usize) -> Result<DMatrix<f64>> {
    if rows.len() <= dim + 1 {
        return Err(Error::Diagnostics(format!(
            "need more than {} post-burn-in rows, have {}",
            dim + 1,
            rows.len()
        )));
    }
    if rows.iter().all(|r| r == &rows[0]) {
        return Err(Error::Diagnostics("chain is constant after burn-in".into()));
    }
    let mut cov = sample_covariance(rows)?;
    let floor = 1e-10 * cov.trace();
    let min_eig = cov.clone().symmetric_eigen().eigenvalues.min();
    if min_eig < floor {
        for i in 0..dim {
            cov[(i, i)] += floor;
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn trace_from(rows: Vec<Vec<f64>>) -> ChainTrace {
        let k = rows.len();
        ChainTrace {
            parameter_names: vec!["a".into(), "b".into(), "c".into()],
            parameters: rows,
            log_likelihoods: vec![0.0; k],
            accepted: vec![true; k],
            state_trajectories: None,
        }
    }

    #[test]
    fn iid_normal_gives_identity() {
        let mut rng = stream(4);
        let rows: Vec<Vec<f64>> = (0..100_000)
            .map(|_| (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let p = estimate_preconditioner(&trace_from(rows), 0).unwrap();
        let err = (p - DMatrix::<f64>::identity(3, 3)).amax();
        assert!(err < 0.02, "{err}");
    }

    #[test]
    fn constant_chain_is_an_error() {
        let rows = vec![vec![1.0, 2.0, 3.0]; 100];
        assert!(matches!(estimate_preconditioner(&trace_from(rows), 10), Err(Error::Diagnostics(_))));
    }

    #[test]
    fn too_short_is_an_error() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![1.5, 2.0, 3.0], vec![1.0, 2.5, 3.0]];
        assert!(estimate_preconditioner(&trace_from(rows), 0).is_err());
    }

    #[test]
    fn singular_covariance_is_regularised() {
        // third coordinate never moves
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64, (i % 7) as f64, 1.0]).collect();
        let p = estimate_preconditioner(&trace_from(rows), 0).unwrap();
        assert!(p[(2, 2)] > 0.0);
        assert!(p.clone().cholesky().is_some());
        assert_eq!(p, p.transpose());
    }
}
