//! Wilson score interval for a binomial proportion.

use super::ConfidenceSpec;
use crate::error::{Error, Result};

/// Wilson score interval for `successes` out of `trials`.
///
/// With `p̂ = k/n` and critical value `z`, the interval is
///
/// ```text
/// ( p̂ + z²/2n  ±  z · sqrt( p̂(1-p̂)/n + z²/4n² ) ) / (1 + z²/n)
/// ```
///
/// Bounds always lie in `[0, 1]`; `k = 0` pins the lower bound at 0 and
/// `k = n` pins the upper bound at 1. Errors when `trials` is zero or
/// `successes > trials`.
pub fn wilson_interval(successes: u64, trials: u64, spec: &ConfidenceSpec) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid(
            "wilson interval requires at least one trial",
        ));
    }
    if successes > trials {
        return Err(Error::invalid(format!(
            "successes ({successes}) exceed trials ({trials})"
        )));
    }
    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z = spec.z;
    let z2 = z * z;

    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();

    // At the boundary counts the exact bound is 0 or 1; pin them rather
    // than let floating-point cancellation leave a stray ulp.
    let lo = if successes == 0 {
        0.0
    } else {
        ((center - half) / denom).clamp(0.0, 1.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        ((center + half) / denom).clamp(0.0, 1.0)
    };
    Ok((lo, hi))
}
