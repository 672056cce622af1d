use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used by the numerical modules: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Convert an `f64` constant. Never fails for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `|a|^(p-1) sign(a)`.
    #[inline]
    fn signed_pow(self, p: Self) -> Self {
        if self == Self::zero() {
            Self::zero()
        } else {
            self.abs().powf(p - Self::one()) * self.signum()
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `max(|x|, |y|)`-relative comparison used across tests and checks.
pub fn rel_diff<T: Scalar>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs()).max(T::min_positive_value());
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_pow_matches_definition() {
        assert_eq!(2.0f64.signed_pow(3.0), 4.0);
        assert_eq!((-2.0f64).signed_pow(3.0), -4.0);
        assert_eq!(0.0f64.signed_pow(1.0), 0.0);
        assert_eq!((-3.0f32).signed_pow(2.0), -3.0);
    }
}
