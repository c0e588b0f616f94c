//! Digits of Champernowne's constant and position arithmetic.
//!
//! Positions are 0-based over the digit string "0123456789101112...", so the
//! '0' left of the decimal point sits at position 0 and the first digit of
//! the integer 1 at position 1. The decimal point is not counted.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::natural::from_decimal_digits;
use crate::{Error, Result};

/// Default cap on how many C10 digits a single request may materialize.
pub const DEFAULT_MAX_DIGITS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position(pub u64);

/// Upper bound on materialized digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitBudget(pub u64);

impl Default for DigitBudget {
    fn default() -> Self {
        DigitBudget(DEFAULT_MAX_DIGITS)
    }
}

impl DigitBudget {
    pub fn check(self, required: u64) -> Result<()> {
        if required > self.0 {
            Err(Error::BudgetExceeded {
                required,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// The integer covering a position and which of its digits (1-based) it is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DigitLocation {
    pub integer: u64,
    pub digit_ordinal: u32,
}

/// `"0" d1 d2 ... dP`: C10 truncated at a position, one byte (0..=9) per digit.
#[derive(Clone, PartialEq, Eq)]
pub struct DigitPrefix {
    digits: Vec<u8>,
}

impl std::fmt::Debug for DigitPrefix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DigitPrefix(last_position={})", self.last_position().0)
    }
}

impl DigitPrefix {
    pub fn last_position(&self) -> Position {
        Position(self.digits.len() as u64 - 1)
    }

    /// Digit values, position 0 first.
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn to_ascii(&self) -> String {
        self.digits.iter().map(|&d| char::from(b'0' + d)).collect()
    }

    /// The digits read as one integer; the prefix equals this over 10^P.
    pub fn to_natural(&self) -> BigUint {
        from_decimal_digits(&self.digits)
    }

    /// The prefix cut back to `last`.
    pub fn truncated(&self, last: Position) -> DigitPrefix {
        let end = (last.0 as usize + 1).min(self.digits.len());
        DigitPrefix {
            digits: self.digits[..end].to_vec(),
        }
    }
}

/// Position of the integer `10^m`: `1 + sum_{k=1..m} 9 k 10^(k-1)`.
pub fn position_of_power(m: u32) -> BigUint {
    let mut pos = BigUint::one();
    let mut block_base = BigUint::one();
    for k in 1..=m {
        pos += &block_base * (9u64 * u64::from(k));
        block_base *= 10u32;
    }
    pos
}

/// `position_of_power` when it fits in a machine word.
pub fn position_of_power_u64(m: u32) -> Result<u64> {
    crate::natural::to_u64(&position_of_power(m), "position of power of ten")
}

fn digit_count(n: u64) -> u32 {
    n.ilog10() + 1
}

/// Position of the first digit of `n`.
pub fn position_of_integer(n: u64) -> Result<Position> {
    if n == 0 {
        return Err(Error::ZeroInteger);
    }
    let d = digit_count(n);
    let start = position_of_power_u64(d - 1)?;
    let offset = u128::from(d) * u128::from(n - 10u64.pow(d - 1));
    u64::try_from(u128::from(start) + offset)
        .map(Position)
        .map_err(|_| Error::Overflow("position of integer"))
}

/// Which integer, and which digit of it, lands on position `p`.
pub fn locate_position(p: Position) -> Result<DigitLocation> {
    if p.0 == 0 {
        return Err(Error::LeadingZeroPosition);
    }
    let mut start: u128 = 1;
    let mut width: u32 = 1;
    let mut first: u128 = 1;
    loop {
        let block = 9 * u128::from(width) * first;
        if u128::from(p.0) < start + block {
            break;
        }
        start += block;
        width += 1;
        first *= 10;
    }
    let offset = u128::from(p.0) - start;
    let integer = first + offset / u128::from(width);
    let ordinal = (offset % u128::from(width)) as u32 + 1;
    Ok(DigitLocation {
        integer: u64::try_from(integer).map_err(|_| Error::Overflow("located integer"))?,
        digit_ordinal: ordinal,
    })
}

/// Writes the decimal digits of every integer in `first..` into `out` until it
/// holds `len` digits, starting mid-integer at `skip` digits into `first`.
fn emit_from(first: u64, skip: usize, len: usize, out: &mut Vec<u8>) {
    let target = out.len() + len;
    // Decimal odometer; avoids formatting each integer.
    let mut counter: Vec<u8> = first.to_string().bytes().map(|b| b - b'0').collect();
    let mut skip = skip;
    while out.len() < target {
        let room = target - out.len();
        let take = (counter.len() - skip).min(room);
        out.extend_from_slice(&counter[skip..skip + take]);
        skip = 0;
        let mut i = counter.len();
        loop {
            if i == 0 {
                counter.insert(0, 1);
                break;
            }
            i -= 1;
            if counter[i] == 9 {
                counter[i] = 0;
            } else {
                counter[i] += 1;
                break;
            }
        }
    }
}

/// C10 digits at positions `0..=p`.
pub fn digits_up_to(p: Position, budget: DigitBudget) -> Result<DigitPrefix> {
    let total = p.0.checked_add(1).ok_or(Error::Overflow("digit count"))?;
    budget.check(total)?;
    let mut digits = Vec::with_capacity(total as usize);
    digits.push(0);
    emit_from(1, 0, p.0 as usize, &mut digits);
    Ok(DigitPrefix { digits })
}

/// C10 digits at positions `start..start+len`, generated without the prefix.
pub fn digit_window(start: Position, len: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return Ok(out);
    }
    let mut from = start;
    if start.0 == 0 {
        out.push(0);
        from = Position(1);
    }
    let loc = locate_position(from)?;
    emit_from(
        loc.integer,
        loc.digit_ordinal as usize - 1,
        len - out.len(),
        &mut out,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(p: usize) -> String {
        let mut s = String::from("0");
        let mut n = 1u64;
        while s.len() < p + 1 {
            s.push_str(&n.to_string());
            n += 1;
        }
        s.truncate(p + 1);
        s
    }

    /// Linear scan over the concatenated sequence.
    fn locate_by_scan(p: u64) -> (u64, u32) {
        let mut pos = 1u64;
        let mut n = 1u64;
        loop {
            let w = n.to_string().len() as u64;
            if p < pos + w {
                return (n, (p - pos) as u32 + 1);
            }
            pos += w;
            n += 1;
        }
    }

    #[test]
    fn power_positions() {
        assert_eq!(position_of_power(0), BigUint::from(1u32));
        assert_eq!(position_of_power(1), BigUint::from(10u32));
        assert_eq!(position_of_power(2), BigUint::from(190u32));
        assert_eq!(position_of_power(3), BigUint::from(2890u32));
        // no overflow past 64 bits
        assert!(position_of_power(30).bits() > 64);
    }

    #[test]
    fn prefixes() {
        let b = DigitBudget::default();
        assert_eq!(digits_up_to(Position(0), b).unwrap().to_ascii(), "0");
        assert_eq!(digits_up_to(Position(1), b).unwrap().to_ascii(), "01");
        assert_eq!(
            digits_up_to(Position(10), b).unwrap().to_ascii(),
            "01234567891"
        );
        let p = digits_up_to(Position(10), b).unwrap();
        assert_eq!(p.last_position(), Position(10));
        assert_eq!(p.to_natural(), BigUint::from(1234567891u64));
    }

    #[test]
    fn budget_guard() {
        let err = digits_up_to(Position(100), DigitBudget(50)).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                required: 101,
                budget: 50
            }
        );
    }

    #[test]
    fn locate_examples() {
        let l = locate_position(Position(1)).unwrap();
        assert_eq!((l.integer, l.digit_ordinal), (1, 1));
        let l = locate_position(Position(15)).unwrap();
        assert_eq!((l.integer, l.digit_ordinal), (12, 2));
        // Scan oracle gives 1674 (the prose elsewhere has 1634).
        assert_eq!(locate_by_scan(5589), (1674, 4));
        let l = locate_position(Position(5589)).unwrap();
        assert_eq!((l.integer, l.digit_ordinal), (1674, 4));
        assert_eq!(
            locate_position(Position(0)),
            Err(Error::LeadingZeroPosition)
        );
    }

    #[test]
    fn integer_positions() {
        assert_eq!(position_of_integer(1).unwrap(), Position(1));
        assert_eq!(position_of_integer(12).unwrap(), Position(14));
        assert_eq!(position_of_integer(1674).unwrap(), Position(5586));
        assert_eq!(position_of_integer(0), Err(Error::ZeroInteger));
    }

    #[test]
    fn locate_agrees_with_scan() {
        for p in 1..20_000u64 {
            let l = locate_position(Position(p)).unwrap();
            assert_eq!((l.integer, l.digit_ordinal), locate_by_scan(p), "p={p}");
        }
    }

    #[test]
    fn power_matches_integer_position() {
        for m in 0..10u32 {
            assert_eq!(
                BigUint::from(position_of_integer(10u64.pow(m)).unwrap().0),
                position_of_power(m)
            );
        }
    }

    #[test]
    fn windows_match_prefix() {
        let full = naive(5000);
        for start in [0usize, 1, 9, 10, 11, 189, 190, 191, 2889, 2890, 4000] {
            let w = digit_window(Position(start as u64), 50).unwrap();
            let s: String = w.iter().map(|&d| char::from(b'0' + d)).collect();
            assert_eq!(s, &full[start..start + 50]);
        }
    }

    #[test]
    fn prefix_matches_naive_small() {
        let b = DigitBudget::default();
        for p in 0..400 {
            assert_eq!(
                digits_up_to(Position(p as u64), b).unwrap().to_ascii(),
                naive(p)
            );
        }
    }
}
