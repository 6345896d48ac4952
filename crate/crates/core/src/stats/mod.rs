//! Statistical building blocks: binomial intervals, percentile bootstrap,
//! inter-rater agreement, and OLS with robust covariance estimators.

mod agreement;
mod bootstrap;
mod ols;
mod wilson;

pub use agreement::{cohens_kappa, fleiss_kappa, AgreementKind, AgreementResult};
pub use bootstrap::{percentile_bootstrap, quantile_type7, BootstrapResult};
pub use ols::{
    interaction_marginal_effects, ols_fit, Design, MarginalEffect, RegressionResult,
    RegressionTerm, SeKind,
};
pub use wilson::wilson_interval;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Confidence level and its two-sided normal critical value.
///
/// The default is a 95% level with `z = 1.959964`; [`ConfidenceSpec::from_level`]
/// derives `z` for other levels from the standard normal quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceSpec {
    /// Two-sided coverage level in (0, 1).
    pub level: f64,
    /// Critical value `z` such that `P(|N(0,1)| <= z) = level`.
    pub z: f64,
}

impl Default for ConfidenceSpec {
    fn default() -> Self {
        ConfidenceSpec {
            level: 0.95,
            z: 1.959964,
        }
    }
}

impl ConfidenceSpec {
    /// Build a spec for an arbitrary level, deriving the critical value.
    pub fn from_level(level: f64) -> Result<ConfidenceSpec> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid(format!(
                "confidence level must be in (0, 1), got {level}"
            )));
        }
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        let z = normal.inverse_cdf(1.0 - (1.0 - level) / 2.0);
        Ok(ConfidenceSpec { level, z })
    }

    /// Mass in each tail: `(1 - level) / 2`.
    pub fn tail(&self) -> f64 {
        (1.0 - self.level) / 2.0
    }
}

/// A closed interval `[lo, hi]`, the serialized form of every confidence
/// bound in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

impl From<(f64, f64)> for Interval {
    fn from((lo, hi): (f64, f64)) -> Self {
        Interval { lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_95_percent() {
        let spec = ConfidenceSpec::default();
        assert_eq!(spec.level, 0.95);
        assert_eq!(spec.z, 1.959964);
        assert!((spec.tail() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn derived_z_matches_pinned_default() {
        let spec = ConfidenceSpec::from_level(0.95).unwrap();
        assert!((spec.z - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn ninety_percent_critical_value() {
        let spec = ConfidenceSpec::from_level(0.90).unwrap();
        assert!((spec.z - 1.6448536).abs() < 1e-5);
    }

    #[test]
    fn out_of_range_levels_are_rejected() {
        assert!(ConfidenceSpec::from_level(0.0).is_err());
        assert!(ConfidenceSpec::from_level(1.0).is_err());
        assert!(ConfidenceSpec::from_level(-0.5).is_err());
    }
}
