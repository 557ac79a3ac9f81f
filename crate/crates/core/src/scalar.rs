//! Protocol-wide numbers.
//!
//! A [`Scalar`] is either an exact arbitrary-precision rational or an IEEE-754
//! double. One game uses one [`NumericMode`] throughout; operands from
//! different modes are coerced to float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Pow, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest decimal exponent accepted by [`parse_rational`].
const MAX_DECIMAL_EXPONENT: i64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    /// Arbitrary-precision rationals, no rounding anywhere.
    #[default]
    Exact,
    /// IEEE-754 binary64, round-to-nearest.
    Float,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericMode::Exact => f.write_str("exact"),
            NumericMode::Float => f.write_str("float"),
        }
    }
}

impl NumericMode {
    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, value: i64) -> Scalar {
        match self {
            NumericMode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(value))),
            NumericMode::Float => Scalar::Float(value as f64),
        }
    }

    pub fn from_u64(self, value: u64) -> Scalar {
        match self {
            NumericMode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(value))),
            NumericMode::Float => Scalar::Float(value as f64),
        }
    }

    pub fn from_bigint(self, value: &BigInt) -> Scalar {
        match self {
            NumericMode::Exact => Scalar::Exact(BigRational::from_integer(value.clone())),
            NumericMode::Float => Scalar::Float(value.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Converts an exact rational into this mode (correctly rounded in float mode).
    pub fn from_rational(self, value: &BigRational) -> Scalar {
        match self {
            NumericMode::Exact => Scalar::Exact(value.clone()),
            NumericMode::Float => Scalar::Float(rational_to_f64(value)),
        }
    }
}

fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> NumericMode {
        match self {
            Scalar::Exact(_) => NumericMode::Exact,
            Scalar::Float(_) => NumericMode::Float,
        }
    }

    /// Re-expresses the value in `mode`. Float to exact yields the exact binary value.
    pub fn to_mode(&self, mode: NumericMode) -> Scalar {
        match (self, mode) {
            (Scalar::Exact(r), NumericMode::Float) => Scalar::Float(rational_to_f64(r)),
            (Scalar::Float(x), NumericMode::Exact) => match BigRational::from_f64(*x) {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Float(*x),
            },
            _ => self.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn pow(&self, exp: u32) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(Pow::pow(r, exp)),
            Scalar::Float(x) => Scalar::Float(x.powi(exp.min(i32::MAX as u32) as i32)),
        }
    }

    /// The larger of two values; `self` wins ties and unordered pairs.
    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    fn zip(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Float(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.zip(rhs, |a, b| a $op b, |a, b| a $op b)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

impl_binop!(Add, add, +);
impl_binop!(Sub, sub, -);
impl_binop!(Mul, mul, *);
// Exact division by zero panics inside num-rational; callers guard divisors.
impl_binop!(Div, div, /);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

// Exact values travel as "p/q" strings, finite floats as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.collect_str(r),
            Scalar::Float(x) if x.is_finite() => serializer.serialize_f64(*x),
            Scalar::Float(x) if x.is_nan() => serializer.serialize_str("nan"),
            Scalar::Float(x) if *x > 0.0 => serializer.serialize_str("inf"),
            Scalar::Float(_) => serializer.serialize_str("-inf"),
        }
    }
}

struct ScalarVisitor;

impl Visitor<'_> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a rational string \"p/q\" or a JSON number")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
        Ok(Scalar::Float(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::Float(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar::Float(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        match v {
            "inf" => Ok(Scalar::Float(f64::INFINITY)),
            "-inf" => Ok(Scalar::Float(f64::NEG_INFINITY)),
            "nan" => Ok(Scalar::Float(f64::NAN)),
            _ => parse_rational(v).map(Scalar::Exact).map_err(E::custom),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal at offset {offset}: expected {expected}")]
pub struct LiteralError {
    pub offset: usize,
    pub expected: &'static str,
}

/// Parses `"p/q"`, an integer, or a decimal with optional exponent (`"1.5"`,
/// `"-.25"`, `"1e-6"`) into an exact rational. Decimals are never rounded.
pub fn parse_rational(text: &str) -> Result<BigRational, LiteralError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let err = |offset, expected| LiteralError { offset, expected };

    let negative = match bytes.first() {
        Some(b'-') => {
            pos += 1;
            true
        }
        Some(b'+') => {
            pos += 1;
            false
        }
        _ => false,
    };

    let int_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    let int_digits = &text[int_start..pos];

    if pos < bytes.len() && bytes[pos] == b'/' {
        if int_digits.is_empty() {
            return Err(err(int_start, "digit"));
        }
        pos += 1;
        let den_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if den_start == pos {
            return Err(err(den_start, "digit"));
        }
        if pos != bytes.len() {
            return Err(err(pos, "end of literal"));
        }
        let num: BigInt = int_digits.parse().map_err(|_| err(int_start, "digit"))?;
        let den: BigInt = text[den_start..].parse().map_err(|_| err(den_start, "digit"))?;
        if den.is_zero() {
            return Err(err(den_start, "nonzero denominator"));
        }
        let value = BigRational::new(num, den);
        return Ok(if negative { -value } else { value });
    }

    let mut frac_digits = "";
    if pos < bytes.len() && bytes[pos] == b'.' {
        pos += 1;
        let frac_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        frac_digits = &text[frac_start..pos];
    }
    if int_digits.is_empty() && frac_digits.is_empty() {
        return Err(err(int_start, "digit"));
    }

    let mut exponent: i64 = 0;
    if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        pos += 1;
        let exp_start = pos;
        if pos < bytes.len() && (bytes[pos] == b'-' || bytes[pos] == b'+') {
            pos += 1;
        }
        let digits_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if digits_start == pos {
            return Err(err(digits_start, "exponent digit"));
        }
        exponent = text[exp_start..pos]
            .parse()
            .ok()
            .filter(|e: &i64| e.abs() <= MAX_DECIMAL_EXPONENT)
            .ok_or(err(exp_start, "exponent of at most 4096 in magnitude"))?;
    }
    if pos != bytes.len() {
        return Err(err(pos, "digit, '.', '/', 'e' or end of literal"));
    }

    let mut mantissa = String::with_capacity(int_digits.len() + frac_digits.len());
    mantissa.push_str(int_digits);
    mantissa.push_str(frac_digits);
    let mantissa: BigInt = mantissa.parse().map_err(|_| err(int_start, "digit"))?;
    let scale = exponent - frac_digits.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(mantissa * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(mantissa, Pow::pow(&ten, scale.unsigned_abs()))
    };
    Ok(if negative { -value } else { value })
}

/// Convenience for tests and fixtures: `rat(1, 2)` is one half.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exact(n: i64, d: i64) -> Scalar {
        Scalar::Exact(rat(n, d))
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("1e-6").unwrap(), rat(1, 1_000_000));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("+3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("2.5E+2").unwrap(), rat(250, 1));
        assert_eq!(parse_rational("7.").unwrap(), rat(7, 1));
    }

    #[test]
    fn rejects_malformed_literals_with_offsets() {
        assert_eq!(parse_rational("").unwrap_err().offset, 0);
        assert_eq!(parse_rational("1/0").unwrap_err().expected, "nonzero denominator");
        assert_eq!(parse_rational("1/").unwrap_err().offset, 2);
        assert_eq!(parse_rational("1.5x").unwrap_err().offset, 3);
        assert_eq!(parse_rational("1e").unwrap_err().offset, 2);
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("1e99999").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn exact_arithmetic_has_no_rounding() {
        let third = exact(1, 3);
        let sum = &(&third + &third) + &third;
        assert_eq!(sum, exact(1, 1));
        assert_eq!(&exact(1, 10) * &exact(10, 1), exact(1, 1));
        assert_eq!(&exact(3, 4) / &exact(3, 8), exact(2, 1));
    }

    #[test]
    fn mixed_modes_fall_back_to_float() {
        let r = &exact(1, 2) + &Scalar::Float(0.25);
        assert_eq!(r.mode(), NumericMode::Float);
        assert_eq!(r.to_f64(), 0.75);
    }

    #[test]
    fn serde_encodings() {
        let json = serde_json::to_string(&exact(-3, 2)).unwrap();
        assert_eq!(json, "\"-3/2\"");
        assert_eq!(serde_json::to_string(&exact(6, 1)).unwrap(), "\"6\"");
        assert_eq!(serde_json::to_string(&Scalar::Float(0.5)).unwrap(), "0.5");
        assert_eq!(
            serde_json::to_string(&Scalar::Float(f64::NEG_INFINITY)).unwrap(),
            "\"-inf\""
        );
        let back: Scalar = serde_json::from_str("\"-3/2\"").unwrap();
        assert_eq!(back, exact(-3, 2));
        let back: Scalar = serde_json::from_str("1").unwrap();
        assert_eq!(back.mode(), NumericMode::Float);
    }

    #[test]
    fn float_to_exact_is_the_binary_value() {
        let s = Scalar::Float(0.1).to_mode(NumericMode::Exact);
        assert_ne!(s, exact(1, 10));
        assert_eq!(s.to_f64(), 0.1);
    }

    proptest! {
        #[test]
        fn float_json_round_trips_bitwise(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let json = serde_json::to_string(&Scalar::Float(x)).unwrap();
            let back: Scalar = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back.to_f64().to_bits(), x.to_bits());
        }

        #[test]
        fn scientific_literals_are_exact(n in -1_000_000i64..1_000_000, k in 0u32..12) {
            let denom = 10i64.pow(k);
            prop_assert_eq!(parse_rational(&format!("{n}e-{k}")).unwrap(), rat(n, denom));
        }

        #[test]
        fn exact_display_parses_back(n in -1_000_000i64..1_000_000, d in 1i64..1_000_000) {
            let value = rat(n, d);
            prop_assert_eq!(parse_rational(&value.to_string()).unwrap(), value);
        }

        #[test]
        fn exact_order_matches_cross_multiplication(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let lhs = exact(a, b);
            let rhs = exact(c, d);
            prop_assert_eq!(lhs.partial_cmp(&rhs), Some((a * d).cmp(&(c * b))));
        }
    }
}
