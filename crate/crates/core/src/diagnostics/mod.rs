//! Post-processing of chains and filter runs.

mod acf;
mod ks;
mod metrics;
mod nstudy;
mod summary;

pub use acf::{autocorrelation, default_thinning_lag, estimate_iact, mixing_report, IactEstimate, MixingReport};
pub use ks::{ks_critical_value, ks_stationarity_test, ks_statistic, KsOutcome};
pub use metrics::{state_error_metrics, ErrorMetrics, LOG_FLOOR};
pub use nstudy::{loglik_std_study, loglik_std_study_lgss, loglik_std_study_sv, NStudyRow};
pub use summary::{posterior_summary, quantile, PosteriorSummary};

/// Lags used for the IACT unless told otherwise.
pub const DEFAULT_LAGS: usize = 100;
