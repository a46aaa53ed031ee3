//! Exact rational scalars and their textual forms.
//!
//! Literals accept `"p/q"`, plain decimals with an optional exponent
//! (`"0.125"`, `"1e-8"`), bare JSON numbers, and `"inf"` where an extended
//! value is allowed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exact conversion of a finite float.
pub fn qf(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

pub fn to_f64(q: &Q) -> f64 {
    if q.denom().is_one() {
        return q.numer().to_f64().unwrap_or(f64::NAN);
    }
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale both down first.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

pub fn parse_q(text: &str) -> Result<Q, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty scalar".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_q(n)?;
        let d = parse_q(d)?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|_| format!("bad exponent in `{s}`"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("not a number: `{s}`"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: `{s}`"));
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let numer: BigInt = digits.parse().map_err(|_| format!("not a number: `{s}`"))?;
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 4000 {
        return Err(format!("exponent out of range in `{s}`"));
    }
    let ten = BigInt::from(10);
    let mut value = Q::from_integer(numer);
    if scale >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A rational or `+inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ext {
    Finite(Q),
    Infinite,
}

impl Ext {
    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::Finite(q) => to_f64(q),
            Ext::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Ext::Finite(q) => Some(q),
            Ext::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinite)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(q) => write!(f, "{}", fmt_q(q)),
            Ext::Infinite => write!(f, "inf"),
        }
    }
}

pub fn parse_ext(text: &str) -> Result<Ext, String> {
    match text.trim() {
        "inf" | "+inf" | "Infinity" | "infinity" | "∞" => Ok(Ext::Infinite),
        other => parse_q(other).map(Ext::Finite),
    }
}

/// Serde wrapper for an exact scalar literal.
#[derive(Debug, Clone, PartialEq)]
pub struct Lit(pub Q);

/// Serde wrapper for an extended scalar literal.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtLit(pub Ext);

struct ScalarVisitor {
    allow_inf: bool,
}

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Ext;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        if self.allow_inf {
            f.write_str("a number, a decimal string, \"p/q\" or \"inf\"")
        } else {
            f.write_str("a number, a decimal string or \"p/q\"")
        }
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ext, E> {
        Ok(Ext::Finite(qi(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ext, E> {
        Ok(Ext::Finite(Q::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Ext, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        // Shortest round-trip decimal, so 0.1 becomes 1/10.
        parse_q(&format!("{v:e}")).map(Ext::Finite).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Ext, E> {
        let parsed = if self.allow_inf {
            parse_ext(v)
        } else {
            parse_q(v).map(Ext::Finite)
        };
        parsed.map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match d.deserialize_any(ScalarVisitor { allow_inf: false })? {
            Ext::Finite(q) => Ok(Lit(q)),
            Ext::Infinite => Err(de::Error::custom("infinite value not allowed here")),
        }
    }
}

impl Serialize for Lit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for ExtLit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(ScalarVisitor { allow_inf: true }).map(ExtLit)
    }
}

impl Serialize for ExtLit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

pub fn abs_q(q: &Q) -> Q {
    q.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_exactly() {
        assert_eq!(parse_q("3/4").unwrap(), qr(3, 4));
        assert_eq!(parse_q("-6/8").unwrap(), qr(-3, 4));
    }

    #[test]
    fn parses_decimals_and_exponents() {
        assert_eq!(parse_q("0.125").unwrap(), qr(1, 8));
        assert_eq!(parse_q("1e-3").unwrap(), qr(1, 1000));
        assert_eq!(parse_q("2.5E2").unwrap(), qi(250));
        assert_eq!(parse_q(".5").unwrap(), qr(1, 2));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn json_number_keeps_decimal_meaning() {
        let l: Lit = serde_json::from_str("0.1").unwrap();
        assert_eq!(l.0, qr(1, 10));
        let e: ExtLit = serde_json::from_str("\"inf\"").unwrap();
        assert!(e.0.is_infinite());
        assert!(serde_json::from_str::<Lit>("\"inf\"").is_err());
    }

    #[test]
    fn formats_round_trip() {
        for s in ["3/4", "-7", "22/7"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Q::from_integer(num_traits::pow(BigInt::from(10), 400));
        let x = (big.clone() + qi(1)) / (big * qi(3));
        assert!((to_f64(&x) - 1.0 / 3.0).abs() < 1e-15);
    }
}
