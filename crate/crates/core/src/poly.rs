//! Dense polynomials in `u` with exact integer coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// `c_0 + c_1 u + … + c_d u^d`, trailing zeros trimmed. The zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<i128>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn from_coeffs(coeffs: impl Into<Vec<i128>>) -> Self {
        let mut p = Self { coeffs: coeffs.into() };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> i128 {
        self.coeffs.get(power).copied().unwrap_or(0)
    }

    /// Degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Drop every power above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        let keep = self.coeffs.len().min(order + 1);
        Self::from_coeffs(&self.coeffs[..keep])
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i).checked_add(other.coeff(i)).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_coeffs(coeffs))
    }

    /// Product truncated at `u^order`.
    pub fn checked_mul_truncated(&self, other: &Self, order: usize) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let len = (self.degree() + other.degree() + 1).min(order + 1);
        let mut out = vec![0i128; len];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (j, &b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                let term = a.checked_mul(b).ok_or(Error::Overflow)?;
                out[i + j] = out[i + j].checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        Ok(Self::from_coeffs(out))
    }

    /// In-place multiplication by `(1 + sign·u^power)`, keeping powers up to
    /// `order`.
    pub fn mul_binomial_truncated(&mut self, sign: i8, power: usize, order: usize) -> Result<()> {
        if power == 0 {
            return Err(Error::InvalidPath("binomial factor of power zero"));
        }
        let new_len = (self.coeffs.len() + power).min(order + 1);
        if new_len <= power {
            return Ok(());
        }
        self.coeffs.resize(new_len, 0);
        for i in (power..new_len).rev() {
            let shifted = self.coeffs[i - power];
            if shifted != 0 {
                let term = if sign >= 0 { shifted } else { shifted.checked_neg().ok_or(Error::Overflow)? };
                self.coeffs[i] = self.coeffs[i].checked_add(term).ok_or(Error::Overflow)?;
            }
        }
        self.trim();
        Ok(())
    }

    /// Horner evaluation.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c as f64)
    }

    pub fn coefficient_sum(&self) -> Result<i128> {
        self.coeffs.iter().try_fold(0i128, |acc, &c| acc.checked_add(c).ok_or(Error::Overflow))
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0) {
            let mag = c.unsigned_abs();
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => f.write_str("u")?,
                (1, m) => write!(f, "{m}u")?,
                (p, 1) => write!(f, "u^{p}")?,
                (p, m) => write!(f, "{m}u^{p}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    #[test]
    fn display() {
        assert_eq!(IntPolynomial::from_coeffs([1, 0, 0, 0, 4, 0, -4]).to_string(), "1 + 4u^4 - 4u^6");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!(IntPolynomial::from_coeffs([0, 1]).to_string(), "u");
    }

    #[test]
    fn trims_and_degree() {
        let p = IntPolynomial::from_coeffs([1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coeff(7), 0);
        assert_eq!(IntPolynomial::zero().degree(), 0);
    }

    #[test]
    fn binomial_product_with_truncation() {
        let mut p = IntPolynomial::one();
        p.mul_binomial_truncated(1, 4, 10).unwrap();
        p.mul_binomial_truncated(-1, 4, 10).unwrap();
        assert_eq!(p, IntPolynomial::from_coeffs([1, 0, 0, 0, 0, 0, 0, 0, -1]));
        p.mul_binomial_truncated(1, 6, 10).unwrap();
        assert_eq!(p.coeff(6), 1);
        assert_eq!(p.coeff(14), 0);
        assert_eq!(p.degree(), 8);
    }

    #[test]
    fn overflow_is_reported() {
        let p = IntPolynomial::from_coeffs([i128::MAX]);
        assert_eq!(p.checked_add(&IntPolynomial::one()), Err(Error::Overflow));
    }

    proptest! {
        #[test]
        fn binomial_matches_general_product(
            coeffs in proptest::collection::vec(-50i128..50, 1..8),
            power in 1usize..6,
            negative in any::<bool>(),
            order in 0usize..12,
        ) {
            let p = IntPolynomial::from_coeffs(coeffs);
            let sign: i8 = if negative { -1 } else { 1 };
            let mut factor = vec![0i128; power + 1];
            factor[0] = 1;
            factor[power] = sign as i128;
            let expected = p.checked_mul_truncated(&IntPolynomial::from_coeffs(factor), order).unwrap();
            let mut got = p.truncated(order);
            got.mul_binomial_truncated(sign, power, order).unwrap();
            prop_assert_eq!(got, expected);
        }

        #[test]
        fn eval_is_ring_homomorphism(
            a in proptest::collection::vec(-9i128..9, 0..6),
            b in proptest::collection::vec(-9i128..9, 0..6),
            u in -0.9f64..0.9,
        ) {
            let pa = IntPolynomial::from_coeffs(a);
            let pb = IntPolynomial::from_coeffs(b);
            let prod = pa.checked_mul_truncated(&pb, 64).unwrap();
            let sum = pa.checked_add(&pb).unwrap();
            prop_assert!((prod.eval(u) - pa.eval(u) * pb.eval(u)).abs() < 1e-9);
            prop_assert!((sum.eval(u) - pa.eval(u) - pb.eval(u)).abs() < 1e-9);
        }
    }
}
