//! Exact rational helpers shared by the algebraic modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRationalError(pub String);

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Q, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let mut p: BigInt = digits.parse().map_err(|_| err())?;
        if neg {
            p = -p;
        }
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Q::new(p, q));
    }
    let p: BigInt = t.parse().map_err(|_| err())?;
    Ok(Q::from_integer(p))
}

/// Canonical `"p/q"` string (integers are written as `"p"`).
pub fn format_rational(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // huge numerator/denominator: fall back to a scaled quotient
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

pub fn is_negative(q: &Q) -> bool {
    q.is_negative()
}

pub(crate) mod serde_q {
    use super::{format_rational, parse_rational, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("3").unwrap(), q_int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), q_frac(-3, 2));
        assert_eq!(parse_rational("1.25").unwrap(), q_frac(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), q_frac(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&q_frac(6, 4)), "3/2");
        assert_eq!(format_rational(&q_int(-7)), "-7");
        assert_eq!(parse_rational(&format_rational(&q_frac(-22, 7))).unwrap(), q_frac(-22, 7));
    }
}
