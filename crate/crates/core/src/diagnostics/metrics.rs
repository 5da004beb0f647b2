use crate::error::{Error, Result};

/// Stand-in for `ln(0)`, keeping reports numeric.
pub const LOG_FLOOR: f64 = -745.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// `(1/T) sum |a_t - b_t|`
    pub bias: f64,
    /// `(1/T) sum (a_t - b_t)^2`
    pub mse: f64,
    pub log_bias: f64,
    pub log_mse: f64,
}

fn floored_ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

/// Absolute-error bias and MSE of `estimates` against `reference`.
pub fn state_error_metrics(estimates: &[f64], reference: &[f64]) -> Result<ErrorMetrics> {
    if estimates.len() != reference.len() {
        return Err(Error::input(
            None,
            format!("length mismatch: {} estimates vs {} reference values", estimates.len(), reference.len()),
        ));
    }
    if estimates.is_empty() {
        return Err(Error::input(None, "no states to compare"));
    }
    let n = estimates.len() as f64;
    let (mut abs, mut sq) = (0.0, 0.0);
    for (a, b) in estimates.iter().zip(reference) {
        let d = a - b;
        abs += d.abs();
        sq += d * d;
    }
    let (bias, mse) = (abs / n, sq / n);
    Ok(ErrorMetrics {
        bias,
        mse,
        log_bias: floored_ln(bias),
        log_mse: floored_ln(mse),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_sequences_hit_the_floor() {
        let m = state_error_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((m.log_bias, m.log_mse), (LOG_FLOOR, LOG_FLOOR));
    }

    #[test]
    fn constant_offset() {
        let d = 0.3f64;
        let a = [1.0, -2.0, 0.5];
        let b: Vec<f64> = a.iter().map(|v| v + d).collect();
        let m = state_error_metrics(&a, &b).unwrap();
        assert!((m.log_bias - d.ln()).abs() < 1e-12);
        assert!((m.log_mse - 2.0 * d.ln()).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(state_error_metrics(&[1.0], &[1.0, 2.0]), Err(Error::Input { .. })));
        assert!(state_error_metrics(&[], &[]).is_err());
    }

    proptest! {
        #[test]
        fn mse_dominates_squared_bias(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..100)
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let m = state_error_metrics(&a, &b).unwrap();
            prop_assert!(m.mse >= m.bias * m.bias * (1.0 - 1e-12));
        }
    }
}
