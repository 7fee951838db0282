//! Scalar types the curvature contractions are generic over.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational scalar used to certify polynomial identities.
pub type Rational = Ratio<BigInt>;

/// Field scalar accepted by the curvature engine.
///
/// Implemented for `f64` (the default path) and [`Rational`] (the exact
/// path). Conversions from `f64` are exact for `Rational`.
pub trait Scalar:
    Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Clone + Debug + Send + Sync + 'static
{
    /// `true` when arithmetic is exact, so identity residuals must vanish.
    const EXACT: bool;

    fn from_count(v: usize) -> Self {
        Self::from_u64(v as u64).expect("integer fits the scalar type")
    }

    fn from_f64_exact(v: f64) -> Self {
        Self::from_f64(v).expect("finite float")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
}

impl Scalar for Rational {
    const EXACT: bool = true;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_from_float_is_exact() {
        let x = 0.1_f64;
        let q = Rational::from_f64_exact(x);
        assert_eq!(q.to_f64_lossy(), x);
        // 0.1 is not a dyadic rational's shortest form
        assert_ne!(q, Rational::new(1.into(), 10.into()));
    }
}
