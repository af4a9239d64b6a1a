//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {0:?} as a rational number")]
pub struct ParseRationalError(pub String);

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `base^exp` for a possibly negative exponent.
pub fn pow(base: i64, exp: i32) -> Rational {
    let p = BigInt::from(base).pow(exp.unsigned_abs());
    if exp >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back for huge numerators/denominators
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// `x mod p` in `[0, p)` for `p > 0`.
pub fn modulo(x: &Rational, p: &Rational) -> Rational {
    let k = (x / p).floor();
    x - k * p
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// Parses `"p/q"`, integers and plain decimals like `"-0.125"`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(err());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    let d = BigInt::from(10u32).pow(fp.len() as u32);
    let q = Rational::new(n, d);
    Ok(if neg { -q } else { q })
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn lcm_denoms<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Smallest `j` with `base^j >= x`, for `x > 0` and `base >= 2`.
pub fn ceil_log(base: i64, x: &Rational) -> i32 {
    let mut j = 0i32;
    while pow(base, j) < *x {
        j += 1;
    }
    while pow(base, j - 1) >= *x {
        j -= 1;
    }
    j
}

/// Largest `j` with `base^j <= x`, for `x > 0` and `base >= 2`.
pub fn floor_log(base: i64, x: &Rational) -> i32 {
    let mut j = 0i32;
    while pow(base, j) > *x {
        j -= 1;
    }
    while pow(base, j + 1) <= *x {
        j += 1;
    }
    j
}

pub mod serde_str {
    //! Serialize a rational as its `"p/q"` string.
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse("7").unwrap(), int(7));
        assert_eq!(parse(".5").unwrap(), rat(1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn logs() {
        assert_eq!(ceil_log(4, &int(1)), 0);
        assert_eq!(ceil_log(4, &int(5)), 2);
        assert_eq!(floor_log(4, &int(5)), 1);
        assert_eq!(floor_log(2, &rat(1, 3)), -2);
        assert_eq!(ceil_log(2, &rat(1, 3)), -1);
    }

    #[test]
    fn modulo_is_nonnegative() {
        assert_eq!(modulo(&rat(-1, 3), &rat(1, 2)), rat(1, 6));
        assert_eq!(frac(&rat(-5, 4)), rat(3, 4));
        assert_eq!(format(&rat(6, 4)), "3/2");
    }
}
