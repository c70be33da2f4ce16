//! Exact rational helpers and the `"p/q"` string encoding used in every
//! serialized artifact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Lowest-terms string, `"p/q"` with `q > 0`, or `"p"` for integers.
pub fn to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Integer value if `x` is integral and fits an `i64`.
pub fn to_i64(x: &Q) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn floor_i64(x: &Q) -> i64 {
    x.floor().numer().to_i64().expect("floor out of range")
}

pub fn ceil_i64(x: &Q) -> i64 {
    x.ceil().numer().to_i64().expect("ceil out of range")
}

pub fn to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive_integer(x: &Q) -> bool {
    is_integer(x) && x.is_positive()
}

/// Binomial coefficient `C(n, k)` for integer `n` (possibly negative), `k >= 0`.
pub fn binomial(n: i64, k: u64) -> Q {
    let mut acc = one();
    for i in 0..k as i64 {
        acc = acc * q(n - i) / q(i + 1);
    }
    acc
}

/// Serde adapters so that structs can carry `Q` fields as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(to_string(&frac(6, -4)), "-3/2");
        assert_eq!(to_string(&q(5)), "5");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn binomial_negative_top() {
        // C(-2, 3) = (-2)(-3)(-4)/6 = -4
        assert_eq!(binomial(-2, 3), q(-4));
        assert_eq!(binomial(5, 0), q(1));
    }

    proptest! {
        #[test]
        fn string_roundtrip(n in -10_000i64..10_000, d in 1i64..500) {
            let x = frac(n, d);
            prop_assert_eq!(parse(&to_string(&x)).unwrap(), x);
        }
    }
}
