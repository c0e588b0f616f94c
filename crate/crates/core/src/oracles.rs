//! Closed-form predictors for the convergents truncated before each HWM and
//! before each 2nd-generation (child) HWM.
//!
//! Every predictor is a pure function of the HWM number. Each states its own
//! lower bound and rejects smaller inputs.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::digits::position_of_power;
use crate::natural::pow10;
use crate::sci::{SciDecimal, Sign};
use crate::{Error, Result};

/// The `N` of "HWM #N". Numbering follows OEIS A143533, so HWM #4 is the
/// 6-digit coefficient at index 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HwmIndex(u32);

impl HwmIndex {
    /// Smallest HWM number any predictor accepts.
    pub const MIN: u32 = 3;

    pub fn new(n: u32) -> Result<Self> {
        if n < Self::MIN {
            return Err(Error::HwmOutOfRange {
                op: "HwmIndex",
                min: Self::MIN,
                got: n,
            });
        }
        Ok(HwmIndex(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn at_least(self, op: &'static str, min: u32) -> Result<u32> {
        if self.0 < min {
            Err(Error::HwmOutOfRange {
                op,
                min,
                got: self.0,
            })
        } else {
            Ok(self.0)
        }
    }

    pub(crate) fn minus(self, k: u32) -> HwmIndex {
        HwmIndex(self.0 - k)
    }
}

impl fmt::Display for HwmIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

fn to_natural(x: BigInt, what: &'static str) -> Result<BigUint> {
    x.to_biguint().ok_or(Error::Overflow(what))
}

/// Number of correct digits (leading '0' included) of the convergent before
/// HWM #N: `position_of_power(N-3) - N + 2`.
pub fn ncd(n: HwmIndex) -> Result<BigUint> {
    let n = n.at_least("ncd", 3)?;
    Ok(position_of_power(n - 3) + 2u32 - n)
}

/// Decimal length of HWM #N: `NCD(N) - 2 NCD(N-1) - 3(N-2) + 4`.
pub fn hwm_length(n: HwmIndex) -> Result<BigUint> {
    let k = n.at_least("hwm_length", 4)?;
    let v = BigInt::from(ncd(n)?) - 2 * BigInt::from(ncd(n.minus(1))?) - 3 * i64::from(k - 2) + 4;
    to_natural(v, "hwm length")
}

/// Exponent of the convergent-before-HWM denominator: `NCD(N-1) + 2(N-2) - 3`.
fn denominator_exponent(n: HwmIndex) -> Result<BigUint> {
    let k = n.get();
    Ok(ncd(n.minus(1))? + 2 * (k - 2) - 3u32)
}

/// Denominator of the convergent before HWM #N in scientific form:
/// `4.[9 x (N-4)][0 x (N-3)]5 E+exp`.
pub fn denominator_sci(n: HwmIndex) -> Result<SciDecimal> {
    let k = n.at_least("denominator", 5)?;
    let mut mantissa = String::from("4");
    mantissa.push_str(&"9".repeat((k - 4) as usize));
    mantissa.push_str(&"0".repeat((k - 3) as usize));
    mantissa.push('5');
    SciDecimal::new(Sign::Plus, mantissa, BigInt::from(denominator_exponent(n)?))
}

/// The denominator as `(m, k)` with value `m * 10^k` and `m` ending in 5.
pub fn denominator_parts(n: HwmIndex) -> Result<(BigUint, u64)> {
    let sci = denominator_sci(n)?;
    let m = crate::natural::parse_decimal(sci.mantissa()).expect("mantissa is decimal");
    let exp = sci
        .exponent()
        .to_u64()
        .ok_or(Error::Overflow("denominator exponent"))?;
    let shift = exp - (sci.mantissa().len() as u64 - 1);
    Ok((m, shift))
}

/// The exact denominator of the convergent before HWM #N, N >= 5.
pub fn denominator(n: HwmIndex) -> Result<BigUint> {
    let (m, shift) = denominator_parts(n)?;
    Ok(m * pow10(shift))
}

/// Decimal length of `denominator(N)`: `NCD(N-1) + 2(N-2) - 2`.
pub fn denominator_digits(n: HwmIndex) -> Result<BigUint> {
    n.at_least("denominator", 5)?;
    Ok(denominator_exponent(n)? + 1u32)
}

/// Predicted error (convergent minus C10) of the convergent before HWM #N.
/// N = 4 is the fixed `1.0E-9`; otherwise `+9.[0 x (N-5)]1 E-(NCD(N)+N-2)`.
pub fn error_profile(n: HwmIndex) -> Result<SciDecimal> {
    let k = n.at_least("error_profile", 4)?;
    if k == 4 {
        return SciDecimal::new(Sign::Plus, "10", -9);
    }
    let mut mantissa = String::from("9");
    mantissa.push_str(&"0".repeat((k - 5) as usize));
    mantissa.push('1');
    let exp: BigInt = BigInt::from(ncd(n)?) + i64::from(k) - 2;
    SciDecimal::new(Sign::Plus, mantissa, -exp)
}

/// `(10^(N-3) - 2, 10^(N-3) - 1)`: the integer whose final 8 is the first
/// wrong digit, and the integer the convergent produces in its place.
pub fn failing_integer(n: HwmIndex) -> Result<(BigUint, BigUint)> {
    let k = n.at_least("failing_integer", 4)?;
    let p = pow10(u64::from(k - 3));
    Ok((&p - 2u32, p - 1u32))
}

/// Digits the convergent produces from the failing '8' onward: '9', then
/// `2(N-4)+1` zeroes, '1', `N-4` zeroes, '2'.
pub fn failure_tail_pattern(n: HwmIndex) -> Result<String> {
    let k = n.at_least("failure_tail_pattern", 4)? as usize;
    let mut s = String::from("9");
    s.push_str(&"0".repeat(2 * (k - 4) + 1));
    s.push('1');
    s.push_str(&"0".repeat(k - 4));
    s.push('2');
    Ok(s)
}

/// Length of the 2nd-generation HWM between HWM #(N+1) and HWM #(N+2):
/// `length(HWM #N) - 10(N-5) - 26`.
pub fn child_length(n: HwmIndex) -> Result<BigUint> {
    let k = n.at_least("child_length", 5)?;
    let v = BigInt::from(hwm_length(n)?) - 10 * i64::from(k - 5) - 26;
    to_natural(v, "child length")
}

/// Predicted error of the convergent before the child HWM lying between
/// HWM #N and HWM #(N+1): `-8.[9 x (N-5)]2 E-exp` with
/// `exp = -2 e_N - NCD(N-1) - N + 3`, `e_N` the (negative) exponent of
/// `error_profile(N)`.
pub fn child_error_profile(n: HwmIndex) -> Result<SciDecimal> {
    let k = n.at_least("child_error_profile", 6)?;
    let mut mantissa = String::from("8");
    mantissa.push_str(&"9".repeat((k - 5) as usize));
    mantissa.push('2');
    let hwm_exp = error_profile(n)?.exponent().clone();
    let exp: BigInt = -2 * hwm_exp - BigInt::from(ncd(n.minus(1))?) - i64::from(k) + 3;
    SciDecimal::new(Sign::Minus, mantissa, -exp)
}

/// A block of denominator digits whose content may not be predictable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DigitBlock {
    Known(String),
    Unknown { length: u64 },
}

impl DigitBlock {
    pub fn len(&self) -> u64 {
        match self {
            DigitBlock::Known(s) => s.len() as u64,
            DigitBlock::Unknown { length } => *length,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for DigitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitBlock::Known(s) => f.write_str(s),
            DigitBlock::Unknown { length } => write!(f, "{{{length} digits}}"),
        }
    }
}

/// preamble, run of nines, penultimate, run of zeroes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DenominatorShape {
    pub preamble: DigitBlock,
    #[serde(serialize_with = "crate::natural::serialize_decimal")]
    pub nines_count: BigUint,
    pub penultimate: DigitBlock,
    #[serde(serialize_with = "crate::natural::serialize_decimal")]
    pub zeroes_count: BigUint,
}

impl DenominatorShape {
    pub fn total_digits(&self) -> BigUint {
        BigUint::from(self.preamble.len() + self.penultimate.len())
            + &self.nines_count
            + &self.zeroes_count
    }

    /// Whether the block lengths satisfy `len(penultimate) = len(preamble) - 1`.
    pub fn lengths_consistent(&self) -> bool {
        !self.preamble.is_empty() && self.penultimate.len() + 1 == self.preamble.len()
    }

    /// The decimal string this shape spells out, when every digit is known.
    pub fn realize(&self) -> Option<String> {
        let (DigitBlock::Known(pre), DigitBlock::Known(pen)) = (&self.preamble, &self.penultimate)
        else {
            return None;
        };
        let nines = self.nines_count.to_usize()?;
        let zeroes = self.zeroes_count.to_usize()?;
        let mut s = String::with_capacity(pre.len() + nines + pen.len() + zeroes);
        s.push_str(pre);
        s.extend(std::iter::repeat_n('9', nines));
        s.push_str(pen);
        s.extend(std::iter::repeat_n('0', zeroes));
        Some(s)
    }

    /// Same block lengths and counts, ignoring block contents.
    pub fn same_lengths(&self, other: &DenominatorShape) -> bool {
        self.preamble.len() == other.preamble.len()
            && self.nines_count == other.nines_count
            && self.penultimate.len() == other.penultimate.len()
            && self.zeroes_count == other.zeroes_count
    }
}

/// Predicted shape of the child-HWM convergent denominator after HWM #N.
/// Block contents are not predicted; only their lengths.
pub fn child_denominator_shape(n: HwmIndex) -> Result<DenominatorShape> {
    let k = n.at_least("child_denominator_shape", 6)?;
    let preamble_len = u64::from(7 * (k - 2) - 9);
    let nines =
        BigInt::from(ncd(n)?) - BigInt::from(ncd(n.minus(1))?) - i64::from(7 * (k - 2)) + 10;
    let zeroes = ncd(n.minus(2))? - 1u32;
    Ok(DenominatorShape {
        preamble: DigitBlock::Unknown {
            length: preamble_len,
        },
        nines_count: to_natural(nines, "nines count")?,
        penultimate: DigitBlock::Unknown {
            length: preamble_len - 1,
        },
        zeroes_count: zeroes,
    })
}

/// Closed form of the total child denominator length:
/// `NCD(N) - NCD(N-1) + NCD(N-2) + 7(N-2) - 10`.
pub fn child_denominator_digits(n: HwmIndex) -> Result<BigUint> {
    let k = n.at_least("child_denominator_shape", 6)?;
    let v = BigInt::from(ncd(n)?) - BigInt::from(ncd(n.minus(1))?)
        + BigInt::from(ncd(n.minus(2))?)
        + i64::from(7 * (k - 2))
        - 10;
    to_natural(v, "child denominator length")
}

/// Which kind of HWM a coefficient index is claimed to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generation {
    /// Running-maximum HWM; its index must be even.
    First,
    /// 2nd-generation HWM; its index must be odd.
    Child,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityCheck {
    Consistent,
    Violation,
}

/// Coefficient-number parity: 1st-generation HWMs sit at even indices (the
/// convergent before them ends on an odd index and over-approximates),
/// children at odd ones.
pub fn hwm_parity_rule(index: u64, generation: Generation) -> ParityCheck {
    let even = index.is_multiple_of(2);
    match (generation, even) {
        (Generation::First, true) | (Generation::Child, false) => ParityCheck::Consistent,
        _ => ParityCheck::Violation,
    }
}

/// Number of C10 digits (leading '0' included) the numerator construction
/// for HWM #N consumes: `position_of_power(N-4) + 1`.
pub fn c10_digits_required(n: HwmIndex) -> Result<BigUint> {
    let k = n.at_least("c10_digits_required", 4)?;
    Ok(position_of_power(k - 4) + BigUint::one())
}
