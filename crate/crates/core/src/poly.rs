//! Exact polynomials in `x = 1/c`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial in `x = 1/c` with exact rational coefficients; `coeffs[i]`
/// multiplies `x^i`. Trailing zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `a * x^k`
    pub fn monomial(a: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = BigRational::from_integer(a.into());
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    /// Integer coefficients, lowest power first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(
            coeffs
                .iter()
                .map(|&a| BigRational::from_integer(a.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|a| !a.is_zero())
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * k).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Value at `x = 1/c`.
    pub fn eval(&self, c: u32) -> BigRational {
        assert!(c > 0, "c must be positive");
        let x = BigRational::new(BigInt::one(), BigInt::from(c));
        self.eval_at(&x)
    }

    pub fn eval_at(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, a| acc * x + a)
    }

    /// `"p(x) = a0 + a1 x + ..."` with zero terms omitted.
    pub fn render(&self) -> String {
        format!("p(x) = {self}")
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            if first {
                if a.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = a.abs();
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag} x")?,
                _ => write!(f, "{mag} x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        RationalPoly::from_coeffs(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self + &(-rhs)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn normalizes_trailing_zeros() {
        let p = RationalPoly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!((&p - &p).is_zero());
        assert_eq!((&p - &p).degree(), None);
    }

    #[test]
    fn evaluates_in_reciprocal() {
        // x^2 - 7x^4 + 12x^6 - 6x^8 at c = 2
        let p = RationalPoly::from_ints(&[0, 0, 1, 0, -7, 0, 12, 0, -6]);
        assert_eq!(p.eval(2), r(-3, 128));
    }

    #[test]
    fn renders() {
        let p = RationalPoly::from_ints(&[0, 0, 1, 0, -7]);
        assert_eq!(p.render(), "p(x) = 1 x^2 - 7 x^4");
        assert_eq!(RationalPoly::zero().to_string(), "0");
        assert_eq!(RationalPoly::from_ints(&[-3, 1]).to_string(), "-3 + 1 x");
    }

    fn small_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec(-20i64..20, 0..6).prop_map(|v| RationalPoly::from_ints(&v))
    }

    proptest! {
        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), c in 2u32..12) {
            prop_assert_eq!((&a * &b).eval(c), a.eval(c) * b.eval(c));
            prop_assert_eq!((&a + &b).eval(c), a.eval(c) + b.eval(c));
            prop_assert_eq!((&a - &b).eval(c), a.eval(c) - b.eval(c));
        }
    }
}
