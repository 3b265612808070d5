//! Exact rationals and circle values.
//!
//! A circle value is a rational modulo 1; the canonical representative lies in `[0, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Representative of `x mod 1` in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    let fl = x.numer().div_floor(x.denom());
    x - Q::from_integer(fl)
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Signed distance from `x` to the nearest integer, in `[-1/2, 1/2)`.
pub fn centered_frac(x: &Q) -> Q {
    let f = frac(x);
    if f >= q(1, 2) {
        f - Q::one()
    } else {
        f
    }
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        format!("{}/1", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Q::new(n, d))
}

pub fn abs_max<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Q {
    xs.into_iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_is_in_unit_interval() {
        assert_eq!(frac(&q(-1, 3)), q(2, 3));
        assert_eq!(frac(&q(7, 3)), q(1, 3));
        assert_eq!(frac(&qi(-4)), Q::zero());
        assert_eq!(centered_frac(&q(5, 6)), q(-1, 6));
    }

    #[test]
    fn parse_roundtrip() {
        for x in [q(3, 7), q(-5, 2), qi(0), qi(12)] {
            assert_eq!(parse_q(&format_q(&x)).unwrap(), x);
        }
        assert!(parse_q("1/0").is_err());
        assert_eq!(parse_q("4").unwrap(), qi(4));
    }
}
