//! Estimators and independent reference samplers.

pub mod fit;
pub mod gue;
pub mod ks;
pub mod modulus;
pub mod tail;
pub mod two_point;

pub use fit::{fit_exponent, holder_fit, ExponentFit};
pub use gue::{dyson_top_oracle, sample_gue, sample_gue_top_eigenvalue, HermitianMatrix};
pub use ks::ks_distance;
pub use modulus::{modulus_dyadic, modulus_full, modulus_statistic};
pub use tail::{estimate_tail, wilson_interval, TailCurve};
pub use two_point::{two_point_record, two_point_tail, TwoPointRecord};

/// Constants for reference overlays. Their true values are unknown, so any
/// curve drawn from them only shows the shape of a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConstants {
    pub c: f64,
    pub big_c: f64,
    pub c1: f64,
}

impl TheoremConstants {
    pub fn new(c: f64, big_c: f64) -> crate::Result<Self> {
        if !(c > 0.0 && big_c > 0.0) {
            return Err(crate::Error::Config("constants must be positive".into()));
        }
        Ok(Self { c, big_c, c1: Self::c1_for(c) })
    }

    /// `c1 = min(2^{-5/2} c, 1/8)`.
    pub fn c1_for(c: f64) -> f64 {
        (2f64.powf(-2.5) * c).min(0.125)
    }

    pub fn is_consistent(&self) -> bool {
        (self.c1 - Self::c1_for(self.c)).abs() <= 1e-15
    }

    pub const LABEL: &'static str = "shape only";
}

impl Default for TheoremConstants {
    fn default() -> Self {
        Self { c: 1.0, big_c: 1.0, c1: Self::c1_for(1.0) }
    }
}
