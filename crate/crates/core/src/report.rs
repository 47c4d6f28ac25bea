//! JSON encodings shared by the report types.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

/// An exact rational encoded as decimal integer strings plus a float.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }
}

impl From<BigRational> for Exact {
    fn from(r: BigRational) -> Self {
        Exact(r)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            num: String,
            den: String,
            float: f64,
        }
        Repr {
            num: self.0.numer().to_string(),
            den: self.0.denom().to_string(),
            float: self.to_f64(),
        }
        .serialize(s)
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn from_biguint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Serializes big integers as decimal strings.
pub fn biguint_string<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_json_shape() {
        let v = serde_json::to_value(Exact(ratio(-10, 6))).unwrap();
        assert_eq!(v["num"], "-5");
        assert_eq!(v["den"], "3");
        assert!((v["float"].as_f64().unwrap() + 5.0 / 3.0).abs() < 1e-15);
    }
}
