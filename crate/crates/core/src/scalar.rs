//! Scalar abstractions.
//!
//! [`LatticeScalar`] is the ring the lattice algorithms work over: exact
//! rationals or IEEE floats. [`Real`] is the float type used by the geometric
//! code (norm bodies, projections, sampling).

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Field elements the lattice routines (Gram–Schmidt, LLL, embeddings) run on.
pub trait LatticeScalar:
    Clone
    + Debug
    + PartialOrd
    + num_traits::Num
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Nearest integer, ties rounded away from zero.
    fn round_int(&self) -> BigInt;

    fn from_bigint(v: &BigInt) -> Self;

    /// Whether `self` should be treated as zero relative to `scale`.
    fn negligible(&self, scale: &Self) -> bool;
}

impl LatticeScalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn round_int(&self) -> BigInt {
        self.round().to_integer()
    }

    fn from_bigint(v: &BigInt) -> Self {
        BigRational::from_integer(v.clone())
    }

    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
}

macro_rules! float_lattice_scalar {
    ($t:ty) => {
        impl LatticeScalar for $t {
            const EXACT: bool = false;

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn from_f64(v: f64) -> Option<Self> {
                v.is_finite().then_some(v as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn abs(&self) -> Self {
                Float::abs(*self)
            }

            fn round_int(&self) -> BigInt {
                BigInt::from_f64(Float::round(*self) as f64).unwrap_or_else(BigInt::zero)
            }

            fn from_bigint(v: &BigInt) -> Self {
                v.to_f64().unwrap_or(f64::NAN) as $t
            }

            // Both sides are squared lengths, so this admits a relative
            // residual of about 32·sqrt(ε): rounding noise, but not the
            // short Gram–Schmidt vectors of skewed sublattice bases.
            fn negligible(&self, scale: &Self) -> bool {
                Float::abs(*self) <= 1024.0 * <$t>::EPSILON * scale.max(1.0)
            }
        }
    };
}

float_lattice_scalar!(f64);
float_lattice_scalar!(f32);

/// Floating point type for geometric computations.
pub trait Real:
    Float + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("representable constant")
    }

    /// Tolerance used for iterative solvers.
    fn solver_tol() -> Self {
        Self::c(1e-10).max(Self::epsilon() * Self::c(64.0))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Parses a decimal, integer or `p/q` string into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(i));
    }
    let (int, frac) = s.split_once('.')?;
    let neg = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Renders a rational as an integer or `p/q` string.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_rational("-7").unwrap(), BigRational::from_integer((-7).into()));
        assert_eq!(parse_rational("-1.25").unwrap(), BigRational::new((-5).into(), 4.into()));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn round_ties_away_from_zero() {
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(half.round_int(), BigInt::from(1));
        assert_eq!((-half).round_int(), BigInt::from(-1));
        assert_eq!(2.5f64.round_int(), BigInt::from(3));
    }

    #[test]
    fn format_roundtrip() {
        let r = BigRational::new(6.into(), (-4).into());
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}
