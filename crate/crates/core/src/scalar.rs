//! The coefficient field abstraction.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, One, Signed};

/// Binary length of a nonnegative integer, with `bitlen(0) = 1`.
pub fn bitlen_u64(x: u64) -> u64 {
    (64 - x.leading_zeros() as u64).max(1)
}

fn bitlen_uint(x: &BigUint) -> u64 {
    x.bits().max(1)
}

/// Coefficient field for every polynomial in the workbench.
///
/// The arithmetic only needs an ordered field. The extra hooks expose the
/// reduced-fraction representation that the encoded-size measures are defined
/// on, so they only make sense for exact scalar types; the shipped
/// implementation is [`BigRational`].
pub trait Scalar: Num + Signed + Ord + Clone + Display + Debug + FromStr + 'static {
    /// Encoded size in bits: one sign bit plus the binary lengths of the
    /// reduced numerator and denominator (`bitlen(0) = 1`).
    fn bit_size(&self) -> u64;

    /// Binary length of the largest component, i.e. `max(bitlen(|numerator|),
    /// bitlen(denominator))`.
    fn component_bits(&self) -> u64;

    /// Exact power of two; a negative exponent gives `1 / 2^|exp|`.
    fn pow2(exp: i64) -> Self;

    fn from_int(n: i64) -> Self;

    /// Exact fraction `num / den`; panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Scalar for BigRational {
    fn bit_size(&self) -> u64 {
        bitlen_uint(self.numer().magnitude()) + bitlen_uint(self.denom().magnitude()) + 1
    }

    fn component_bits(&self) -> u64 {
        bitlen_uint(self.numer().magnitude()).max(bitlen_uint(self.denom().magnitude()))
    }

    fn pow2(exp: i64) -> Self {
        let mag = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            BigRational::from_integer(mag)
        } else {
            BigRational::new(BigInt::one(), mag)
        }
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn bit_size_matches_reduced_fraction() {
        // 2^16 encodes as 17 numerator bits, 1 denominator bit, 1 sign bit.
        assert_eq!(Rat::pow2(16).bit_size(), 19);
        assert_eq!(Rat::from_int(0).bit_size(), 3);
        assert_eq!(Rat::from_ratio(3, 2).bit_size(), 5);
        // 4/8 reduces to 1/2 before measuring.
        assert_eq!(Rat::from_ratio(4, 8).bit_size(), 4);
    }

    #[test]
    fn pow2_negative_exponent() {
        assert_eq!(Rat::pow2(-3), Rat::from_ratio(1, 8));
        assert_eq!(Rat::pow2(0), Rat::from_int(1));
        assert_eq!(Rat::pow2(8), Rat::from_int(256));
    }

    #[test]
    fn component_bits_takes_the_larger_side() {
        assert_eq!(Rat::from_ratio(3, 16).component_bits(), 5);
        assert_eq!(Rat::from_ratio(-1025, 2).component_bits(), 11);
    }
}
