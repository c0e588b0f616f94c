//! Exact scientific-notation values (`d.ddd E±x`) with decimal-string mantissas.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use crate::natural::to_decimal;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// `sign * m0.m1m2... * 10^exponent`, where `mantissa = "m0m1m2..."` and
/// `m0` is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SciDecimal {
    sign: Sign,
    mantissa: String,
    exponent: BigInt,
}

impl SciDecimal {
    pub fn new(
        sign: Sign,
        mantissa: impl Into<String>,
        exponent: impl Into<BigInt>,
    ) -> Result<Self> {
        let mantissa = mantissa.into();
        let bytes = mantissa.as_bytes();
        if bytes.is_empty() || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(Error::InvalidSciDecimal(format!("mantissa {mantissa:?}")));
        }
        if bytes[0] == b'0' {
            return Err(Error::InvalidSciDecimal(format!(
                "mantissa {mantissa:?} has a leading zero"
            )));
        }
        Ok(SciDecimal {
            sign,
            mantissa,
            exponent: exponent.into(),
        })
    }

    /// Scientific form of a nonzero integer, keeping every significant digit
    /// (trailing zeros dropped from the mantissa).
    pub fn from_natural(x: &BigUint) -> Result<Self> {
        let s = to_decimal(x);
        if s == "0" {
            return Err(Error::InvalidSciDecimal(
                "zero has no scientific form".into(),
            ));
        }
        let exponent = BigInt::from(s.len() - 1);
        let trimmed = s.trim_end_matches('0');
        SciDecimal::new(Sign::Plus, trimmed, exponent)
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn mantissa(&self) -> &str {
        &self.mantissa
    }

    pub fn exponent(&self) -> &BigInt {
        &self.exponent
    }

    /// Rounds half-up to `digits` significant digits. A carry out of the
    /// leading digit bumps the exponent (`9.96` to 2 digits is `1.0E+1`).
    pub fn rounded(&self, digits: usize) -> SciDecimal {
        assert!(digits >= 1);
        let m = self.mantissa.as_bytes();
        if m.len() <= digits {
            let mut mantissa = self.mantissa.clone();
            mantissa.extend(std::iter::repeat_n('0', digits - m.len()));
            return SciDecimal {
                mantissa,
                ..self.clone()
            };
        }
        let mut kept: Vec<u8> = m[..digits].iter().map(|b| b - b'0').collect();
        let mut exponent = self.exponent.clone();
        if m[digits] >= b'5' {
            let mut i = kept.len();
            loop {
                if i == 0 {
                    kept.insert(0, 1);
                    kept.pop();
                    exponent += 1;
                    break;
                }
                i -= 1;
                if kept[i] == 9 {
                    kept[i] = 0;
                } else {
                    kept[i] += 1;
                    break;
                }
            }
        }
        SciDecimal {
            sign: self.sign,
            mantissa: kept.iter().map(|&d| char::from(b'0' + d)).collect(),
            exponent,
        }
    }

    /// Whether `self`, rounded to as many digits as `predicted` carries,
    /// reproduces `predicted` exactly (sign, every mantissa digit, exponent).
    pub fn agrees_with(&self, predicted: &SciDecimal) -> bool {
        self.rounded(predicted.mantissa.len()) == *predicted
    }

    /// Integer value when the exponent is large enough for it to be whole.
    pub fn to_natural(&self) -> Option<BigUint> {
        if self.sign == Sign::Minus {
            return None;
        }
        let frac = i64::try_from(self.mantissa.len() - 1).ok()?;
        let exp = i64::try_from(&self.exponent).ok()?;
        let shift = u64::try_from(exp - frac).ok()?;
        let m = crate::natural::parse_decimal(&self.mantissa)?;
        Some(m * crate::natural::pow10(shift))
    }

    /// Decimal digit count of the integer value, if whole.
    pub fn integer_digits(&self) -> Option<BigUint> {
        if self.exponent < BigInt::from(0) {
            return None;
        }
        Some(self.exponent.magnitude() + 1u32)
    }
}

impl fmt::Display for SciDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        let (lead, rest) = self.mantissa.split_at(1);
        let rest = if rest.is_empty() { "0" } else { rest };
        let exp_sign = if self.exponent < BigInt::from(0) {
            '-'
        } else {
            '+'
        };
        write!(f, "{lead}.{rest}E{exp_sign}{}", self.exponent.magnitude())
    }
}

impl Serialize for SciDecimal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for SciDecimal {
    type Err = Error;

    /// Accepts `[-]d[.ddd]E[+|-]x`. The mantissa keeps every written digit
    /// ("1.0" stays two digits); separators in the exponent are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSciDecimal(s.to_string());
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, s.strip_prefix('+').unwrap_or(s)),
        };
        let (mant, exp) = body.split_once(['E', 'e']).ok_or_else(bad)?;
        let mantissa: String = mant.chars().filter(|&c| c != '.').collect();
        let exp: String = exp.chars().filter(|&c| c != ',' && c != ' ').collect();
        let exponent: BigInt = exp.parse().map_err(|_| bad())?;
        SciDecimal::new(sign, mantissa, exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sci(s: &str) -> SciDecimal {
        s.parse().unwrap()
    }

    #[test]
    fn display_forms() {
        assert_eq!(sci("9.1E-190").to_string(), "9.1E-190");
        assert_eq!(sci("1.0E-9").to_string(), "1.0E-9");
        assert_eq!(sci("-8.92E-5590").to_string(), "-8.92E-5590");
        assert_eq!(sci("4.9005E+11").to_string(), "4.9005E+11");
        assert_eq!(
            sci("9.00000001E-8,888,888,890").exponent(),
            &BigInt::from(-8_888_888_890i64)
        );
    }

    #[test]
    fn rejects_bad_mantissa() {
        assert!(SciDecimal::new(Sign::Plus, "091", 3).is_err());
        assert!(SciDecimal::new(Sign::Plus, "", 3).is_err());
        assert!(SciDecimal::new(Sign::Plus, "9x", 3).is_err());
    }

    #[test]
    fn rounding() {
        let x = SciDecimal::new(Sign::Plus, "900991992001", -2890).unwrap();
        assert_eq!(x.rounded(3), sci("9.01E-2890"));
        let x = SciDecimal::new(Sign::Minus, "891973234422", -5590).unwrap();
        assert_eq!(x.rounded(3), sci("-8.92E-5590"));
        let x = SciDecimal::new(Sign::Plus, "996", 4).unwrap();
        assert_eq!(x.rounded(2), SciDecimal::new(Sign::Plus, "10", 5).unwrap());
        let x = SciDecimal::new(Sign::Plus, "9", 0).unwrap();
        assert_eq!(x.rounded(3).mantissa(), "900");
    }

    #[test]
    fn agreement_needs_sign_and_exponent() {
        let obs = SciDecimal::new(Sign::Plus, "910101938402", -190).unwrap();
        assert!(obs.agrees_with(&sci("9.1E-190")));
        assert!(!obs.agrees_with(&sci("-9.1E-190")));
        assert!(!obs.agrees_with(&sci("9.1E-189")));
        assert!(!obs.agrees_with(&sci("9.2E-190")));
    }

    #[test]
    fn natural_round_trip() {
        let d = BigUint::from(490_050_000_000u64);
        let s = SciDecimal::from_natural(&d).unwrap();
        assert_eq!(s.to_string(), "4.9005E+11");
        assert_eq!(s.to_natural().unwrap(), d);
        assert_eq!(s.integer_digits().unwrap(), BigUint::from(12u32));
    }
}
