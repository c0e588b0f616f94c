//! Decimal helpers on top of `num_bigint::BigUint`.
//!
//! `BigUint`'s own radix conversion is quadratic, which is fine for a few
//! thousand digits but not for the half-million digit prefixes the deeper
//! HWM levels need. Parsing here splits recursively so the work lands in the
//! sub-quadratic multiplication kernels instead.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub type Natural = BigUint;

const PARSE_LEAF: usize = 2048;

pub fn pow10(k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    BigUint::from(10u32).pow(u32::try_from(k).expect("power of ten exponent fits in u32"))
}

/// Builds the integer whose decimal digits (values 0..=9, most significant
/// first) are `digits`. Leading zeros are allowed.
pub fn from_decimal_digits(digits: &[u8]) -> BigUint {
    debug_assert!(digits.iter().all(|&d| d < 10));
    let mut powers = HashMap::new();
    parse_rec(digits, &mut powers)
}

fn parse_rec(digits: &[u8], powers: &mut HashMap<usize, BigUint>) -> BigUint {
    if digits.len() <= PARSE_LEAF {
        if digits.is_empty() {
            return BigUint::zero();
        }
        return BigUint::from_radix_be(digits, 10).expect("digits are in 0..10");
    }
    // Split on a power-of-two multiple of the leaf size so powers are reused.
    let mut low_len = PARSE_LEAF;
    while low_len * 2 < digits.len() {
        low_len *= 2;
    }
    let (high, low) = digits.split_at(digits.len() - low_len);
    let high = parse_rec(high, powers);
    let low = parse_rec(low, powers);
    let scale = powers
        .entry(low_len)
        .or_insert_with(|| pow10(low_len as u64));
    high * &*scale + low
}

/// Parses an ASCII decimal string.
pub fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
    Some(from_decimal_digits(&digits))
}

/// Number of decimal digits of `x`; zero has one digit.
pub fn decimal_len(x: &BigUint) -> u64 {
    if let Some(v) = x.to_u64() {
        return if v == 0 { 1 } else { u64::from(v.ilog10()) + 1 };
    }
    let bits = x.bits();
    // floor(log10 x) lies in [(bits-1)*log10(2), bits*log10(2)).
    let mut d = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u64;
    d = d.saturating_sub(1);
    let mut p = pow10(d);
    // Invariant: 10^d <= x.
    while p > *x {
        p /= 10u32;
        d -= 1;
    }
    loop {
        let next = &p * 10u32;
        if next > *x {
            return d + 1;
        }
        p = next;
        d += 1;
    }
}

pub fn to_decimal(x: &BigUint) -> String {
    x.to_str_radix(10)
}

/// Decimal string of `x`, left-padded with zeros to `width`.
pub fn to_decimal_padded(x: &BigUint, width: usize) -> String {
    let s = to_decimal(x);
    if s.len() >= width {
        s
    } else {
        let mut out = "0".repeat(width - s.len());
        out.push_str(&s);
        out
    }
}

/// Converts to `u64`, reporting overflow with a label.
pub fn to_u64(x: &BigUint, what: &'static str) -> crate::Result<u64> {
    x.to_u64().ok_or(crate::Error::Overflow(what))
}

/// Serializes as a decimal string, so values past `u64` survive JSON.
pub(crate) fn serialize_decimal<S: serde::Serializer>(
    x: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_matches_std_radix() {
        let s: String = (1..3000).map(|n| n.to_string()).collect();
        let ours = parse_decimal(&s).unwrap();
        let theirs = BigUint::parse_bytes(s.as_bytes(), 10).unwrap();
        assert_eq!(ours, theirs);
    }

    #[test]
    fn parse_keeps_leading_zeros_harmless() {
        let mut s = "0".repeat(5000);
        s.push_str("12345");
        assert_eq!(parse_decimal(&s).unwrap(), BigUint::from(12345u32));
        assert!(parse_decimal("").is_none());
        assert!(parse_decimal("12a").is_none());
    }

    #[test]
    fn decimal_len_boundaries() {
        assert_eq!(decimal_len(&BigUint::zero()), 1);
        assert_eq!(decimal_len(&BigUint::from(9u32)), 1);
        assert_eq!(decimal_len(&BigUint::from(10u32)), 2);
        for k in [19u64, 20, 21, 63, 64, 100, 1000, 4567] {
            let p = pow10(k);
            assert_eq!(decimal_len(&p), k + 1);
            assert_eq!(decimal_len(&(&p - 1u32)), k);
        }
    }

    #[test]
    fn padded_decimal() {
        assert_eq!(to_decimal_padded(&BigUint::from(42u32), 5), "00042");
        assert_eq!(to_decimal_padded(&BigUint::from(42u32), 1), "42");
    }
}
