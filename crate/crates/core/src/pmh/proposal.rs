use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `2.562`, the random-walk scale that minimises the IACT for Gaussian
/// targets; the covariance is multiplied by `2.562^2 / d`.
pub const OPTIMAL_SCALE: f64 = 2.562;

#[derive(Debug, Clone, PartialEq)]
pub enum ProposalKind {
    /// `theta' = theta + step_size * z` for a scalar parameter.
    ScalarRandomWalk { step_size: f64 },
    /// `theta' ~ N(theta, covariance)`.
    MultivariateRandomWalk { covariance: DMatrix<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProposalConfig {
    pub kind: ProposalKind,
    /// Multiply the covariance by `2.562^2 / d`.
    pub scale_rule: bool,
    /// Walk in unconstrained coordinates (only meaningful for the SV model).
    pub reparametrized: bool,
}

impl ProposalConfig {
    pub fn scalar(step_size: f64) -> Self {
        Self {
            kind: ProposalKind::ScalarRandomWalk { step_size },
            scale_rule: false,
            reparametrized: false,
        }
    }

    pub fn multivariate(covariance: DMatrix<f64>) -> Self {
        Self {
            kind: ProposalKind::MultivariateRandomWalk { covariance },
            scale_rule: false,
            reparametrized: false,
        }
    }

    /// Independent increments with the given standard deviations.
    pub fn diagonal(step_sizes: &[f64]) -> Self {
        let var: Vec<f64> = step_sizes.iter().map(|s| s * s).collect();
        Self::multivariate(DMatrix::from_diagonal(&DVector::from_vec(var)))
    }

    /// A pre-conditioned proposal `N(theta, 2.562^2 / d * P)`.
    pub fn preconditioned(preconditioner: DMatrix<f64>) -> Self {
        Self {
            scale_rule: true,
            ..Self::multivariate(preconditioner)
        }
    }

    pub fn with_reparametrization(mut self, on: bool) -> Self {
        self.reparametrized = on;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            ProposalKind::ScalarRandomWalk { .. } => 1,
            ProposalKind::MultivariateRandomWalk { covariance } => covariance.nrows(),
        }
    }

    /// The covariance of the increment after the scale rule is applied.
    pub fn effective_covariance(&self) -> DMatrix<f64> {
        let base = match &self.kind {
            ProposalKind::ScalarRandomWalk { step_size } => DMatrix::from_element(1, 1, step_size * step_size),
            ProposalKind::MultivariateRandomWalk { covariance } => covariance.clone(),
        };
        if self.scale_rule {
            base * (OPTIMAL_SCALE * OPTIMAL_SCALE / self.dim() as f64)
        } else {
            base
        }
    }

    /// Validates the configuration and factorises the covariance.
    pub fn build(&self) -> Result<Proposal> {
        match &self.kind {
            ProposalKind::ScalarRandomWalk { step_size } => {
                if !(step_size.is_finite() && *step_size >= 0.0) {
                    return Err(Error::Config(format!("step size must be finite and >= 0, got {step_size}")));
                }
                let scale = if self.scale_rule { OPTIMAL_SCALE } else { 1.0 };
                Ok(Proposal {
                    factor: DMatrix::from_element(1, 1, step_size * scale),
                })
            }
            ProposalKind::MultivariateRandomWalk { covariance } => {
                let d = covariance.nrows();
                if d == 0 || covariance.ncols() != d {
                    return Err(Error::Config("covariance must be a non-empty square matrix".into()));
                }
                if covariance.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("covariance has non-finite entries".into()));
                }
                let scale = covariance.amax().max(1.0);
                for i in 0..d {
                    for j in 0..i {
                        if (covariance[(i, j)] - covariance[(j, i)]).abs() > 1e-12 * scale {
                            return Err(Error::Config("covariance is not symmetric".into()));
                        }
                    }
                }
                let chol = self
                    .effective_covariance()
                    .cholesky()
                    .ok_or_else(|| Error::Config("covariance is not positive definite".into()))?;
                Ok(Proposal { factor: chol.unpack() })
            }
        }
    }
}

/// A validated Gaussian random walk, `theta' = theta + L z` with `L L^T` the
/// increment covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    factor: DMatrix<f64>,
}

impl Proposal {
    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        &self.factor * self.factor.transpose()
    }

    pub fn propose<R: Rng + ?Sized>(&self, current: &[f64], rng: &mut R) -> Vec<f64> {
        let d = self.dim();
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        (0..d)
            .map(|i| current[i] + (0..=i).map(|j| self.factor[(i, j)] * z[j]).sum::<f64>())
            .collect()
    }

    /// Log density of the increment `to - from`; symmetric in its arguments.
    pub fn log_density(&self, from: &[f64], to: &[f64]) -> f64 {
        let d = self.dim();
        let diff = DVector::from_iterator(d, (0..d).map(|i| to[i] - from[i]));
        let z = self
            .factor
            .solve_lower_triangular(&diff)
            .unwrap_or_else(|| DVector::from_element(d, f64::INFINITY));
        let log_det: f64 = self.factor.diagonal().iter().map(|v| v.ln()).sum();
        -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln()) - log_det - 0.5 * z.norm_squared()
    }
}
