//! The exact integer type the homology pipeline is generic over.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use dashu_int::IBig;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

/// Arbitrary-precision signed integers.
///
/// The fused updates take references so implementations can avoid the
/// temporaries that owned `num-traits` arithmetic would force.
pub trait ExactInt:
    Integer + Signed + Clone + Hash + Debug + Display + From<i64> + Send + Sync + 'static
{
    /// `self += a * b`.
    fn add_mul(&mut self, a: &Self, b: &Self);

    /// `self -= a * b`.
    fn sub_mul(&mut self, a: &Self, b: &Self);

    fn to_ibig(&self) -> IBig;

    fn from_ibig(x: &IBig) -> Self;

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    /// Bit length of `|self|`; a cheap size measure for pivoting.
    fn bits(&self) -> usize;
}

impl ExactInt for IBig {
    fn add_mul(&mut self, a: &IBig, b: &IBig) {
        *self += a * b;
    }

    fn sub_mul(&mut self, a: &IBig, b: &IBig) {
        *self -= a * b;
    }

    fn to_ibig(&self) -> IBig {
        self.clone()
    }

    fn from_ibig(x: &IBig) -> IBig {
        x.clone()
    }

    fn is_unit(&self) -> bool {
        *self == IBig::ONE || *self == IBig::NEG_ONE
    }

    fn bits(&self) -> usize {
        dashu_int::ops::BitTest::bit_len(self)
    }
}

impl ExactInt for BigInt {
    fn add_mul(&mut self, a: &BigInt, b: &BigInt) {
        *self += a * b;
    }

    fn sub_mul(&mut self, a: &BigInt, b: &BigInt) {
        *self -= a * b;
    }

    fn to_ibig(&self) -> IBig {
        self.to_string().parse().expect("decimal round trip")
    }

    fn from_ibig(x: &IBig) -> BigInt {
        x.to_string().parse().expect("decimal round trip")
    }

    fn bits(&self) -> usize {
        self.bits() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exercise<T: ExactInt>() {
        let mut x = T::from(7);
        x.add_mul(&T::from(3), &T::from(-4));
        assert_eq!(x, T::from(-5));
        x.sub_mul(&T::from(2), &T::from(-3));
        assert_eq!(x, T::from(1));
        assert!(x.is_unit());
        assert!(T::from(-1).is_unit());
        assert!(!T::from(2).is_unit());
        assert_eq!(T::from(-12).gcd(&T::from(18)), T::from(6));
        assert_eq!(T::from(1024).bits(), 11);
        assert_eq!(T::from(-99).to_ibig(), IBig::from(-99));
        let big = IBig::from(3u8).pow(100) * IBig::NEG_ONE;
        assert_eq!(T::from_ibig(&big).to_ibig(), big);
    }

    #[test]
    fn ibig_and_bigint_agree() {
        exercise::<IBig>();
        exercise::<BigInt>();
    }
}
