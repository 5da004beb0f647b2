//! Reference datasets and experiment presets.

use std::path::Path;

use crate::error::Result;
use crate::io::{compute_log_returns, read_prices_file};
use crate::models::{simulate_lgss, simulate_sv, LgssParameters, SvParameters, TimeSeries};
use crate::stream;

pub const LGSS_REFERENCE_SEED: u64 = 20_150_101;
pub const LGSS_REFERENCE_LENGTH: usize = 250;
pub const LGSS_LONG_LENGTH: usize = 500;

pub const SV_SYNTHETIC_SEED: u64 = 20_150_102;
pub const SV_SYNTHETIC_LENGTH: usize = 500;
pub const SV_SYNTHETIC_PARAMS: SvParameters = SvParameters {
    mu: 0.0,
    phi: 0.9,
    sigma_v: 0.2,
};

/// Default per-coordinate standard deviations of the untuned SV proposal.
pub const SV_NAIVE_STEP_SIZES: [f64; 3] = [0.10, 0.01, 0.05];
pub const SV_INITIAL_PARAMS: SvParameters = SvParameters {
    mu: 0.0,
    phi: 0.9,
    sigma_v: 0.2,
};

pub const OMXS30_FROM: &str = "2012-01-02";
pub const OMXS30_TO: &str = "2014-01-02";

/// `θ = (0.75, 1, 0.1)`, `x_0 = 0`, `T = 250`.
pub fn reference_lgss() -> TimeSeries {
    lgss_of_length(LGSS_REFERENCE_LENGTH)
}

/// The same generator run to `T = 500`; prefixes give nested datasets.
pub fn long_lgss() -> TimeSeries {
    lgss_of_length(LGSS_LONG_LENGTH)
}

fn lgss_of_length(len: usize) -> TimeSeries {
    simulate_lgss(&LgssParameters::default(), len, 0.0, &mut stream(LGSS_REFERENCE_SEED))
        .expect("default parameters are valid")
}

pub fn synthetic_sv() -> TimeSeries {
    simulate_sv(&SV_SYNTHETIC_PARAMS, SV_SYNTHETIC_LENGTH, &mut stream(SV_SYNTHETIC_SEED))
        .expect("preset parameters are valid")
}

/// Log-returns of an OMXS30 price file restricted to the study window.
pub fn omxs30_returns(path: &Path) -> Result<TimeSeries> {
    let prices = read_prices_file(path)?;
    compute_log_returns(&prices.window(OMXS30_FROM, OMXS30_TO))
}
