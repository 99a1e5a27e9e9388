//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All computations are written against [`Scalar`], which `f32` and `f64`
//! implement. Products and norms are kept in the log domain, so an exact
//! rational type would buy nothing here and is not supported.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Values out of range saturate to infinity.
    fn of(x: f64) -> Self;

    /// Converts a count or an index.
    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Slack for comparisons of log-domain quantities that are equal in exact
    /// arithmetic but computed along different rounding paths.
    fn log_slack(reference: Self) -> Self {
        Self::epsilon() * Self::of(4096.0) * (Self::one() + reference.abs())
    }
}

impl Scalar for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }
}

/// `a <= b` up to [`Scalar::log_slack`]. Negative infinity compares exactly.
pub(crate) fn log_le<T: Scalar>(a: T, b: T) -> bool {
    if a == T::neg_infinity() || a <= b {
        return true;
    }
    if b == T::neg_infinity() {
        return false;
    }
    a <= b + T::log_slack(b)
}

/// Natural log with exact zero mapped to negative infinity.
pub(crate) fn ln_or_neg_inf<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        x.ln()
    } else {
        T::neg_infinity()
    }
}

/// `exp(log_value / k)`, the k-th root of a log-domain value.
pub(crate) fn root_of_log<T: Scalar>(log_value: T, k: usize) -> T {
    if log_value == T::neg_infinity() {
        T::zero()
    } else {
        (log_value / T::of_usize(k)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_le_is_exact_at_neg_infinity() {
        assert!(log_le(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert!(!log_le(-700.0f64, f64::NEG_INFINITY));
        assert!(log_le(1.0f64 + 1e-15, 1.0));
        assert!(!log_le(1.0f64 + 1e-9, 1.0));
    }

    #[test]
    fn roots() {
        assert_eq!(root_of_log(f64::NEG_INFINITY, 3), 0.0);
        assert!((root_of_log(8f64.ln(), 3) - 2.0).abs() < 1e-15);
        assert!((root_of_log(8f32.ln(), 3) - 2.0).abs() < 1e-6);
    }
}
