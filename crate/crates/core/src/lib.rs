//! Bayesian state and parameter inference for scalar state-space models
//! with particle filters and particle Metropolis-Hastings (PMH).
//!
//! The crate covers two models: a linear Gaussian state-space (LGSS) model,
//! for which the Kalman filter supplies exact answers, and a stochastic
//! volatility (SV) model for daily log-returns.
//!
//! ```
//! use pmh_core::models::{simulate_lgss, LgssParameters};
//! use pmh_core::particle_filter::fully_adapted_lgss;
//! use pmh_core::{kalman::kalman_filter, stream};
//!
//! let theta = LgssParameters::new(0.75, 1.0, 0.1);
//! let data = simulate_lgss(&theta, 100, 0.0, &mut stream(1)).unwrap();
//! let pf = fully_adapted_lgss(&data.observations, &theta, 200, 0.0, &mut stream(2)).unwrap();
//! let kf = kalman_filter(&data.observations, &theta, 0.0).unwrap();
//! assert!((pf.log_likelihood - kf.log_likelihood).abs() < 1.0);
//! ```

pub mod datasets;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod kalman;
pub mod models;
pub mod particle_filter;
pub mod pmh;

pub use error::{Error, Result};
pub use kalman::{kalman_filter, KalmanOutput};
pub use models::{LgssParameters, SvParameters, TimeSeries, UnconstrainedSvParameters};
pub use particle_filter::{FilterOutput, ParticleSystem};
pub use pmh::{ChainConfig, ChainTrace, ProposalConfig};

use rand::SeedableRng;

/// The random stream type used throughout. Every filter run consumes one.
pub type Stream = rand_chacha::ChaCha8Rng;

/// A seeded [`Stream`].
pub fn stream(seed: u64) -> Stream {
    Stream::seed_from_u64(seed)
}
