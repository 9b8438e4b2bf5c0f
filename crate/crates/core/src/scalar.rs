//! Scalar types usable as CCDF fractions.

use std::fmt::Display;

use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type a CCDF fraction can be stored in: `f32`, `f64`, or an exact
/// ratio such as `Ratio<u64>`.
pub trait Fraction: Num + FromPrimitive + ToPrimitive + Copy + PartialOrd + Display {
    /// `num / den`; `den` must be non-zero.
    fn ratio(num: usize, den: usize) -> Self {
        let n = Self::from_usize(num).expect("representable numerator");
        let d = Self::from_usize(den).expect("representable denominator");
        n / d
    }

    /// Arithmetic mean of `values`; zero for an empty slice.
    fn mean(values: &[Self]) -> Self {
        if values.is_empty() {
            return Self::zero();
        }
        let sum = values.iter().fold(Self::zero(), |acc, &v| acc + v);
        sum / Self::from_usize(values.len()).expect("representable count")
    }
}

impl<T> Fraction for T where T: Num + FromPrimitive + ToPrimitive + Copy + PartialOrd + Display {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn ratio_and_mean() {
        assert_eq!(<f64 as Fraction>::ratio(3, 4), 0.75);
        assert_eq!(<f32 as Fraction>::ratio(1, 2), 0.5);
        let exact = <Ratio<u64> as Fraction>::ratio(2, 4);
        assert_eq!(exact, Ratio::new(1, 2));
        let m = Fraction::mean(&[Ratio::new(1u64, 3), Ratio::new(2, 3)]);
        assert_eq!(m, Ratio::new(1, 2));
        assert_eq!(<f64 as Fraction>::mean(&[]), 0.0);
    }
}
