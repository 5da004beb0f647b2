use rand::Rng;
use rand_distr::StandardNormal;

use super::{normal_log_pdf, StateSpaceModel, TimeSeries};
use crate::error::{Error, Result};

/// Parameters `{mu, phi, sigma_v}` of the stochastic volatility model
/// `x_t = mu + phi (x_{t-1} - mu) + sigma_v v_t`, `y_t = exp(x_t / 2) e_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvParameters {
    pub mu: f64,
    pub phi: f64,
    pub sigma_v: f64,
}

impl SvParameters {
    pub fn new(mu: f64, phi: f64, sigma_v: f64) -> Self {
        Self { mu, phi, sigma_v }
    }

    pub fn is_valid(&self) -> bool {
        self.mu.is_finite() && self.phi.abs() < 1.0 && self.sigma_v > 0.0 && self.sigma_v.is_finite()
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!(
                "SV requires |phi| < 1 and sigma_v > 0; got {self:?}"
            )))
        }
    }

    /// Variance of the stationary law of the log-volatility.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma_v * self.sigma_v / (1.0 - self.phi * self.phi)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.mu, self.phi, self.sigma_v]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// `phi = tanh(psi)`, `sigma_v = exp(varsigma)`.
    pub fn to_unconstrained(&self) -> Result<UnconstrainedSvParameters> {
        self.validate()?;
        Ok(UnconstrainedSvParameters {
            mu: self.mu,
            psi: self.phi.atanh(),
            varsigma: self.sigma_v.ln(),
        })
    }
}

impl Default for SvParameters {
    fn default() -> Self {
        Self::new(0.0, 0.9, 0.2)
    }
}

/// SV parameters on the real line: `{mu, psi = artanh(phi), varsigma = ln(sigma_v)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnconstrainedSvParameters {
    pub mu: f64,
    pub psi: f64,
    pub varsigma: f64,
}

impl UnconstrainedSvParameters {
    pub fn from_constrained(&self) -> SvParameters {
        SvParameters {
            mu: self.mu,
            phi: self.psi.tanh(),
            sigma_v: self.varsigma.exp(),
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.mu, self.psi, self.varsigma]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            mu: v[0],
            psi: v[1],
            varsigma: v[2],
        }
    }
}

/// Draws `x_0` from the stationary law, then `x_{1:T}` and `y_{1:T}`.
pub fn simulate_sv<R: Rng + ?Sized>(
    params: &SvParameters,
    len: usize,
    rng: &mut R,
) -> Result<TimeSeries> {
    params.validate()?;
    if len == 0 {
        return Err(Error::Config("series length must be at least 1".into()));
    }
    let mut states = Vec::with_capacity(len + 1);
    let mut observations = Vec::with_capacity(len);
    let mut x = params.sample_initial(rng);
    states.push(x);
    for _ in 0..len {
        x = params.sample_transition(x, rng);
        let e: f64 = rng.sample(StandardNormal);
        states.push(x);
        observations.push((0.5 * x).exp() * e);
    }
    Ok(TimeSeries {
        observations,
        initial_state: states[0],
        states: Some(states),
    })
}

/// `N(mu; 0, 1) + TN_[-1,1](phi; 0.95, 0.05^2) + Gamma(sigma_v; shape 2, rate 10)`
/// in log space, without truncation constants.
pub fn log_prior_sv(params: &SvParameters) -> f64 {
    if !params.is_valid() {
        return f64::NEG_INFINITY;
    }
    const SHAPE: f64 = 2.0;
    const RATE: f64 = 10.0;
    // ln Gamma(2) = 0
    let log_gamma = SHAPE * RATE.ln() + (SHAPE - 1.0) * params.sigma_v.ln() - RATE * params.sigma_v;
    normal_log_pdf(params.mu, 0.0, 1.0) + normal_log_pdf(params.phi, 0.95, 0.05 * 0.05) + log_gamma
}

/// Log of the ratio of Jacobian factors `|1 - phi'^2| / |1 - phi^2| * |sigma_v' / sigma_v|`
/// that enters the acceptance ratio when the chain moves in unconstrained space.
pub fn log_jacobian_correction(current: &SvParameters, proposed: &SvParameters) -> f64 {
    sv_log_jacobian(proposed) - sv_log_jacobian(current)
}

pub(crate) fn sv_log_jacobian(p: &SvParameters) -> f64 {
    (1.0 - p.phi * p.phi).abs().ln() + p.sigma_v.abs().ln()
}

impl StateSpaceModel for SvParameters {
    fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mu + self.stationary_variance().sqrt() * z
    }

    fn sample_transition<R: Rng + ?Sized>(&self, previous: f64, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mu + self.phi * (previous - self.mu) + self.sigma_v * z
    }

    #[inline]
    fn log_observation_density(&self, observation: f64, state: f64) -> f64 {
        // N(y; 0, exp(x))
        -0.5 * (super::LN_2PI + state + observation * observation * (-state).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn deterministic_per_seed() {
        let p = SvParameters::default();
        let a = simulate_sv(&p, 200, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = simulate_sv(&p, 200, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.states.unwrap().len(), 201);
    }

    #[test]
    fn degenerate_noise_gives_unit_variance_returns() {
        let p = SvParameters::new(0.0, 0.0, 1e-12);
        let ts = simulate_sv(&p, 20_000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert!(ts.states.unwrap().iter().all(|x| x.abs() < 1e-9));
        let n = ts.observations.len() as f64;
        let var = ts.observations.iter().map(|y| y * y).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    fn lag1_autocorrelation(v: &[f64]) -> f64 {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let c0: f64 = v.iter().map(|a| (a - m).powi(2)).sum();
        let c1: f64 = v.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        c1 / c0
    }

    #[test]
    fn volatility_clustering() {
        let p = SvParameters::new(0.0, 0.9, 0.2);
        let mut total = 0.0;
        for seed in 0..20 {
            let ts = simulate_sv(&p, 500, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let sq: Vec<f64> = ts.observations.iter().map(|y| y * y).collect();
            total += lag1_autocorrelation(&sq);
        }
        assert!(total / 20.0 > 0.0, "mean lag-1 acf of y^2 = {}", total / 20.0);
    }

    #[test]
    fn prior_support() {
        assert_eq!(log_prior_sv(&SvParameters::new(0.0, 0.95, -0.1)), f64::NEG_INFINITY);
        assert_eq!(log_prior_sv(&SvParameters::new(0.0, 0.95, 0.0)), f64::NEG_INFINITY);
        assert_eq!(log_prior_sv(&SvParameters::new(0.0, 1.0, 0.2)), f64::NEG_INFINITY);
        assert_eq!(log_prior_sv(&SvParameters::new(0.0, -1.2, 0.2)), f64::NEG_INFINITY);
        assert!(log_prior_sv(&SvParameters::new(0.0, 0.2, 0.2)).is_finite());
    }

    #[test]
    fn prior_mu_term() {
        let d = log_prior_sv(&SvParameters::new(0.0, 0.95, 0.2))
            - log_prior_sv(&SvParameters::new(1.0, 0.95, 0.2));
        assert!((d - 0.5).abs() < 1e-13, "{d}");
    }

    #[test]
    fn prior_gamma_mode_at_one_tenth() {
        // shape 2, rate 10: mode (shape - 1) / rate = 0.1
        let at = |s| log_prior_sv(&SvParameters::new(0.0, 0.95, s));
        assert!(at(0.1) > at(0.3));
        assert!(at(0.1) > at(0.05));
        // ln(100 * 0.1 * e^-1) = ln 10 - 1
        let g = at(0.1) - normal_log_pdf(0.0, 0.0, 1.0) - normal_log_pdf(0.95, 0.95, 0.0025);
        assert!((g - (10f64.ln() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn transform_examples() {
        let p = UnconstrainedSvParameters {
            mu: 0.3,
            psi: 0.0,
            varsigma: 0.0,
        }
        .from_constrained();
        assert_eq!((p.mu, p.phi, p.sigma_v), (0.3, 0.0, 1.0));
        let p = UnconstrainedSvParameters {
            mu: 0.0,
            psi: 0.0,
            varsigma: 0.15f64.ln(),
        }
        .from_constrained();
        assert!((p.sigma_v - 0.15).abs() < 1e-15);
        let u = SvParameters::new(0.0, 0.97, 0.2).to_unconstrained().unwrap();
        assert!((u.psi - 0.97f64.atanh()).abs() < 1e-15);
        assert!((u.from_constrained().phi - 0.97).abs() < 1e-12);
    }

    #[test]
    fn to_unconstrained_rejects_boundary() {
        assert!(SvParameters::new(0.0, 1.0, 0.2).to_unconstrained().is_err());
        assert!(SvParameters::new(0.0, 0.5, 0.0).to_unconstrained().is_err());
    }

    #[test]
    fn jacobian_examples() {
        let a = SvParameters::new(0.1, 0.5, 0.3);
        assert_eq!(log_jacobian_correction(&a, &a), 0.0);
        let b = SvParameters::new(0.0, 0.0, 0.4);
        let c = SvParameters::new(0.0, 0.0, 0.8);
        assert!((log_jacobian_correction(&b, &c) - 2f64.ln()).abs() < 1e-15);
    }

    /// Central-difference determinant of (psi, varsigma) -> (phi, sigma_v).
    fn fd_log_det(u: &UnconstrainedSvParameters) -> f64 {
        let h = 1e-6;
        let map = |psi: f64, vs: f64| {
            let p = UnconstrainedSvParameters {
                mu: u.mu,
                psi,
                varsigma: vs,
            }
            .from_constrained();
            (p.phi, p.sigma_v)
        };
        let (pp, sp) = map(u.psi + h, u.varsigma);
        let (pm, sm) = map(u.psi - h, u.varsigma);
        let (pq, sq) = map(u.psi, u.varsigma + h);
        let (pr, sr) = map(u.psi, u.varsigma - h);
        let j11 = (pp - pm) / (2.0 * h);
        let j21 = (sp - sm) / (2.0 * h);
        let j12 = (pq - pr) / (2.0 * h);
        let j22 = (sq - sr) / (2.0 * h);
        (j11 * j22 - j12 * j21).abs().ln()
    }

    proptest! {
        #[test]
        fn jacobian_matches_finite_differences(
            psi_a in -2.0f64..2.0, vs_a in -3.0f64..1.0,
            psi_b in -2.0f64..2.0, vs_b in -3.0f64..1.0,
        ) {
            let ua = UnconstrainedSvParameters { mu: 0.0, psi: psi_a, varsigma: vs_a };
            let ub = UnconstrainedSvParameters { mu: 0.0, psi: psi_b, varsigma: vs_b };
            let oracle = fd_log_det(&ub) - fd_log_det(&ua);
            let got = log_jacobian_correction(&ua.from_constrained(), &ub.from_constrained());
            prop_assert!((got - oracle).abs() < 1e-5, "{got} vs {oracle}");
        }

        #[test]
        fn jacobian_antisymmetric(
            pa in -0.99f64..0.99, sa in 0.01f64..3.0,
            pb in -0.99f64..0.99, sb in 0.01f64..3.0,
        ) {
            let a = SvParameters::new(0.0, pa, sa);
            let b = SvParameters::new(1.0, pb, sb);
            prop_assert_eq!(log_jacobian_correction(&a, &b), -log_jacobian_correction(&b, &a));
        }

        #[test]
        fn round_trip(mu in -5.0f64..5.0, phi in -(1.0 - 1e-9)..(1.0 - 1e-9), sigma in 1e-4f64..10.0) {
            let p = SvParameters::new(mu, phi, sigma);
            let back = p.to_unconstrained().unwrap().from_constrained();
            prop_assert_eq!(back.mu, mu);
            prop_assert!((back.phi - phi).abs() < 1e-12);
            prop_assert!((back.sigma_v - sigma).abs() < 1e-12 * sigma.max(1.0));
        }

        #[test]
        fn prior_finite_exactly_on_support(mu in -10.0f64..10.0, phi in -2.0f64..2.0, sigma in -1.0f64..2.0) {
            let p = SvParameters::new(mu, phi, sigma);
            let lp = log_prior_sv(&p);
            if phi.abs() < 1.0 && sigma > 0.0 {
                prop_assert!(lp.is_finite());
            } else {
                prop_assert_eq!(lp, f64::NEG_INFINITY);
            }
        }
    }
}
