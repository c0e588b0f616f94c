//! Continued-fraction machinery: the ceiling construction of convergent
//! numerators, Euclidean extraction with the parity-driven degenerate split,
//! the convergent recurrence, and the naive digit-prefix baseline.

use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::digits::{position_of_power_u64, DigitPrefix, Position};
use crate::natural::{decimal_len, parse_decimal, pow10, to_decimal};
use crate::oracles::{denominator, denominator_parts, HwmIndex};
use crate::{Error, Result};

/// Non-negative rational in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    numerator: BigUint,
    denominator: BigUint,
}

impl Rational {
    /// Reduces `numerator / denominator` to lowest terms.
    pub fn new(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let g = numerator.gcd(&denominator);
        if g.is_one() {
            return Ok(Rational {
                numerator,
                denominator,
            });
        }
        Ok(Rational {
            numerator: numerator / &g,
            denominator: denominator / g,
        })
    }

    /// For pairs already known to be coprime (convergent recurrence output,
    /// or a pair whose Euclidean run ended on a unit remainder).
    pub(crate) fn from_coprime(numerator: BigUint, denominator: BigUint) -> Self {
        debug_assert!(!denominator.is_zero());
        Rational {
            numerator,
            denominator,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn is_proper(&self) -> bool {
        self.numerator < self.denominator
    }
}

/// Parity of the final index a caller expects an expansion to end on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalParity {
    /// Convergent before a 1st-generation HWM (the HWM index is even).
    Odd,
    /// Convergent before a child HWM (the child index is odd).
    Even,
}

/// `[a0; a1, a2, ...]`, 0-based. Index 0 is the integer part.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoefficientList {
    terms: Vec<BigUint>,
}

impl CoefficientList {
    pub fn new(terms: Vec<BigUint>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidCoefficients("empty list".into()));
        }
        if let Some(k) = terms.iter().skip(1).position(Zero::is_zero) {
            return Err(Error::InvalidCoefficients(format!(
                "term {} is zero",
                k + 1
            )));
        }
        Ok(CoefficientList { terms })
    }

    pub fn from_u64s(terms: &[u64]) -> Result<Self> {
        Self::new(terms.iter().map(|&t| BigUint::from(t)).collect())
    }

    pub fn terms(&self) -> &[BigUint] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn into_terms(self) -> Vec<BigUint> {
        self.terms
    }

    /// Index of the final term.
    pub fn final_index(&self) -> usize {
        self.terms.len() - 1
    }

    /// Canonical lists never end in 1 (a single-term list is always canonical).
    pub fn is_canonical(&self) -> bool {
        self.terms.len() == 1 || !self.terms.last().is_some_and(One::is_one)
    }

    /// The first `k` terms.
    pub fn prefix(&self, k: usize) -> Result<CoefficientList> {
        if k == 0 || k > self.terms.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.terms.len(),
            });
        }
        Ok(CoefficientList {
            terms: self.terms[..k].to_vec(),
        })
    }

    pub fn digit_lengths(&self) -> Vec<u64> {
        self.terms.iter().map(decimal_len).collect()
    }

    pub fn total_digits(&self) -> u64 {
        self.digit_lengths().iter().sum()
    }

    /// One term per line, LF-terminated, line 1 = index 0.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for t in &self.terms {
            w.write_all(to_decimal(t).as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the one-term-per-line format. Blank lines, carriage returns and
    /// anything other than ASCII digits are rejected.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, line) in r.split(b'\n').enumerate() {
            let line = line?;
            let text = std::str::from_utf8(&line).map_err(|_| Error::Parse {
                line: i + 1,
                reason: "not UTF-8".into(),
            })?;
            let value = parse_decimal(text).ok_or_else(|| Error::Parse {
                line: i + 1,
                reason: if text.is_empty() {
                    "blank line".into()
                } else {
                    format!("not a decimal integer: {:?}", truncate_for_message(text))
                },
            })?;
            terms.push(value);
        }
        CoefficientList::new(terms).map_err(|e| Error::Parse {
            line: 0,
            reason: e.to_string(),
        })
    }
}

fn truncate_for_message(s: &str) -> String {
    s.chars().take(24).collect()
}

/// Euclidean expansion of `numerator / denominator`, plus the final nonzero
/// divisor (the gcd of the pair). The expansion is canonical.
pub fn euclid(numerator: &BigUint, denominator: &BigUint) -> Result<(CoefficientList, BigUint)> {
    if denominator.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    let mut terms = Vec::new();
    let mut a = numerator.clone();
    let mut b = denominator.clone();
    while !b.is_zero() {
        let (q, r) = a.div_rem(&b);
        terms.push(q);
        a = b;
        b = r;
    }
    Ok((CoefficientList { terms }, a))
}

/// Rewrites `..., Y` as `..., Y-1, 1` so the final index has the expected
/// parity. Lists that already match are returned unchanged.
pub fn apply_parity(mut list: CoefficientList, expect: FinalParity) -> Result<CoefficientList> {
    let ends_odd = list.final_index() % 2 == 1;
    let matches = match expect {
        FinalParity::Odd => ends_odd,
        FinalParity::Even => !ends_odd,
    };
    if matches {
        return Ok(list);
    }
    let single = list.terms.len() == 1;
    let last = list.terms.last_mut().expect("nonempty");
    let splittable = if single {
        !last.is_zero()
    } else {
        *last > BigUint::one()
    };
    if !splittable {
        return Err(Error::InvalidCoefficients(
            "final term cannot be split to change parity".into(),
        ));
    }
    *last -= 1u32;
    list.terms.push(BigUint::one());
    Ok(list)
}

/// Continued fraction of `r`. With no parity expectation the canonical
/// expansion is returned; otherwise the degenerate split is applied when the
/// canonical expansion ends on the wrong parity.
pub fn cfe_extract(r: &Rational, expect: Option<FinalParity>) -> Result<CoefficientList> {
    let (list, _) = euclid(&r.numerator, &r.denominator)?;
    match expect {
        None => Ok(list),
        Some(p) => apply_parity(list, p),
    }
}

/// Evaluates a coefficient list with the convergent recurrence
/// `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`.
pub fn convergent_from_coefficients(c: &CoefficientList) -> Rational {
    let mut p_prev = BigUint::one();
    let mut q_prev = BigUint::zero();
    let mut p = c.terms[0].clone();
    let mut q = BigUint::one();
    for a in &c.terms[1..] {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Rational::from_coprime(p, q)
}

/// Denominator of the convergent before HWM #N: 81 for N = 4, the
/// closed form otherwise.
pub fn hwm_denominator(n: HwmIndex) -> Result<BigUint> {
    if n.get() == 4 {
        Ok(BigUint::from(81u32))
    } else {
        denominator(n)
    }
}

/// Fractional digits the numerator construction needs (`P_N`).
pub fn numerator_position(n: HwmIndex) -> Result<Position> {
    if n.get() < 4 {
        return Err(Error::HwmOutOfRange {
            op: "numerator_for_hwm",
            min: 4,
            got: n.get(),
        });
    }
    Ok(Position(position_of_power_u64(n.get() - 4)?))
}

/// Numerator of the convergent before HWM #N: `ceil(D_N * C10[0..P_N])`,
/// computed in integers. N = 4 uses the half-scale identity
/// `2 * ceil(40.5 * 0.1) = 10`.
pub fn numerator_for_hwm(n: HwmIndex, prefix: &DigitPrefix) -> Result<BigUint> {
    let p = numerator_position(n)?;
    if prefix.last_position() < p {
        return Err(Error::InsufficientPrefix {
            required: p.0,
            available: prefix.last_position().0,
        });
    }
    let truncated = prefix.truncated(p);
    let t = truncated.to_natural();
    if n.get() == 4 {
        // ceil((81/2) * t / 10^P) * 2
        let (q, r) = (&t * 81u32).div_rem(&(pow10(p.0) * 2u32));
        let half = if r.is_zero() { q } else { q + 1u32 };
        return Ok(half * 2u32);
    }
    // D_N = m * 10^k, so D_N * t / 10^P = m * t / 10^(P-k).
    let (m, k) = denominator_parts(n)?;
    let product = m * t;
    if k >= p.0 {
        return Ok(product * pow10(k - p.0));
    }
    let (q, r) = product.div_rem(&pow10(p.0 - k));
    Ok(if r.is_zero() { q } else { q + 1u32 })
}

/// Convergent before HWM #N built from its closed-form denominator and the
/// ceiling numerator.
pub fn hwm_convergent_parts(n: HwmIndex, prefix: &DigitPrefix) -> Result<(BigUint, BigUint)> {
    Ok((numerator_for_hwm(n, prefix)?, hwm_denominator(n)?))
}

/// Canonical expansion of a digit prefix read as an exact decimal, and how
/// many leading terms are certain to be terms of C10 itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveCfe {
    pub terms: CoefficientList,
    /// Terms shared with the expansion of the prefix plus one final unit,
    /// so valid for every number in between (C10 included).
    pub trusted_terms: usize,
}

/// The reciprocal-of-remainder expansion of `0.d1...dP` as an exact rational.
pub fn naive_cfe(prefix: &DigitPrefix) -> Result<NaiveCfe> {
    let p = prefix.last_position().0;
    if p == 0 {
        return Err(Error::Domain("prefix has no fractional digits".into()));
    }
    let scale = pow10(p);
    let low = prefix.to_natural();
    let high = &low + 1u32;
    let (lower, _) = euclid(&low, &scale)?;
    let (upper, _) = euclid(&high, &scale)?;
    let common = lower
        .terms
        .iter()
        .zip(&upper.terms)
        .take_while(|(a, b)| a == b)
        .count();
    let exhausted = common == lower.len() || common == upper.len();
    let trusted_terms = if exhausted {
        common.saturating_sub(1)
    } else {
        common
    };
    Ok(NaiveCfe {
        terms: lower,
        trusted_terms,
    })
}

/// Consistency checks on a convergent numerator's decimal tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumeratorTailReport {
    /// `"4" + "0" x (N-5) + "9"`, for N >= 6.
    pub expected_tail: Option<String>,
    pub tail_matches: Option<bool>,
    pub longest_nines_run: u64,
    /// Published run length for N in {5, 7, 9, 11}.
    pub published_nines_run: Option<u64>,
    pub nines_run_matches: Option<bool>,
}

impl NumeratorTailReport {
    /// Every applicable check holds.
    pub fn consistent(&self) -> bool {
        self.tail_matches.unwrap_or(true) && self.nines_run_matches.unwrap_or(true)
    }
}

pub fn published_nines_run(n: HwmIndex) -> Option<u64> {
    match n.get() {
        5 => Some(5),
        7 => Some(173),
        9 => Some(2869),
        11 => Some(35_987),
        _ => None,
    }
}

pub fn numerator_tail_checks(n: HwmIndex, numerator: &BigUint) -> NumeratorTailReport {
    let s = to_decimal(numerator);
    let expected_tail = (n.get() >= 6).then(|| {
        let mut t = String::from("4");
        t.push_str(&"0".repeat(n.get() as usize - 5));
        t.push('9');
        t
    });
    let tail_matches = expected_tail.as_ref().map(|t| s.ends_with(t.as_str()));
    let mut longest = 0u64;
    let mut run = 0u64;
    for b in s.bytes() {
        if b == b'9' {
            run += 1;
            longest = longest.max(run);
        } else {
            run = 0;
        }
    }
    let published = published_nines_run(n);
    NumeratorTailReport {
        expected_tail,
        tail_matches,
        longest_nines_run: longest,
        published_nines_run: published,
        nines_run_matches: published.map(|p| p == longest),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::{digits_up_to, DigitBudget};

    fn h(n: u32) -> HwmIndex {
        HwmIndex::new(n).unwrap()
    }

    fn rat(n: u64, d: u64) -> Rational {
        Rational::new(BigUint::from(n), BigUint::from(d)).unwrap()
    }

    fn terms(c: &CoefficientList) -> Vec<u64> {
        c.terms()
            .iter()
            .map(|t| u64::try_from(t).unwrap())
            .collect()
    }

    const HWM5_TERMS: [u64; 18] = [0, 8, 9, 1, 149083, 1, 1, 1, 4, 1, 1, 1, 3, 4, 1, 1, 1, 15];

    #[test]
    fn rational_reduces() {
        let r = rat(20, 162);
        assert_eq!(r.numerator(), &BigUint::from(10u32));
        assert_eq!(r.denominator(), &BigUint::from(81u32));
        assert_eq!(
            Rational::new(BigUint::one(), BigUint::zero()),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn extract_small() {
        // 81 = 8*10 + 1, 10 = 10*1
        let canonical = cfe_extract(&rat(10, 81), None).unwrap();
        assert_eq!(terms(&canonical), vec![0, 8, 10]);
        let split = cfe_extract(&rat(10, 81), Some(FinalParity::Odd)).unwrap();
        assert_eq!(terms(&split), vec![0, 8, 9, 1]);
        assert_eq!(terms(&cfe_extract(&rat(1, 1), None).unwrap()), vec![1]);
        // already odd: no split
        let kept = cfe_extract(&rat(10, 81), Some(FinalParity::Even)).unwrap();
        assert_eq!(terms(&kept), vec![0, 8, 10]);
    }

    #[test]
    fn extract_hwm5_pair() {
        let r = rat(60_499_999_499, 490_050_000_000);
        let c = cfe_extract(&r, Some(FinalParity::Odd)).unwrap();
        assert_eq!(terms(&c), HWM5_TERMS.to_vec());
        assert_eq!(cfe_extract(&r, None).unwrap(), c);
    }

    #[test]
    fn recurrence() {
        let c = CoefficientList::from_u64s(&[0, 8, 10]).unwrap();
        assert_eq!(convergent_from_coefficients(&c), rat(10, 81));
        let c = CoefficientList::from_u64s(&[0, 8]).unwrap();
        assert_eq!(convergent_from_coefficients(&c), rat(1, 8));
        let c = CoefficientList::from_u64s(&HWM5_TERMS).unwrap();
        assert_eq!(
            convergent_from_coefficients(&c),
            rat(60_499_999_499, 490_050_000_000)
        );
        // the split form evaluates to the same value
        let c = CoefficientList::from_u64s(&[0, 8, 9, 1]).unwrap();
        assert_eq!(convergent_from_coefficients(&c), rat(10, 81));
    }

    #[test]
    fn numerators() {
        let b = DigitBudget::default();
        let prefix = digits_up_to(Position(10), b).unwrap();
        assert_eq!(
            numerator_for_hwm(h(5), &prefix).unwrap(),
            BigUint::from(60_499_999_499u64)
        );
        // longer prefixes are cut back to P_N
        let long = digits_up_to(Position(300), b).unwrap();
        assert_eq!(
            numerator_for_hwm(h(5), &long).unwrap(),
            BigUint::from(60_499_999_499u64)
        );
        let p1 = digits_up_to(Position(1), b).unwrap();
        assert_eq!(numerator_for_hwm(h(4), &p1).unwrap(), BigUint::from(10u32));
        let short = digits_up_to(Position(9), b).unwrap();
        assert_eq!(
            numerator_for_hwm(h(5), &short),
            Err(Error::InsufficientPrefix {
                required: 10,
                available: 9
            })
        );
    }

    #[test]
    fn numerator_agrees_with_plain_ceiling() {
        // Direct D * T div 10^P (+1 unless exact), no factoring of D.
        let b = DigitBudget::default();
        for n in 5..=7 {
            let p = numerator_position(h(n)).unwrap();
            let prefix = digits_up_to(p, b).unwrap();
            let product = denominator(h(n)).unwrap() * prefix.to_natural();
            let (q, r) = product.div_rem(&pow10(p.0));
            let expected = if r.is_zero() { q } else { q + 1u32 };
            assert_eq!(numerator_for_hwm(h(n), &prefix).unwrap(), expected);
        }
    }

    #[test]
    fn hwm6_expansion_size() {
        let prefix = digits_up_to(Position(190), DigitBudget::default()).unwrap();
        let (num, den) = hwm_convergent_parts(h(6), &prefix).unwrap();
        let (c, g) = euclid(&num, &den).unwrap();
        let c = apply_parity(c, FinalParity::Odd).unwrap();
        assert!(g.is_one());
        assert_eq!(c.len(), 40);
        assert_eq!(c.total_digits(), 217);
    }

    #[test]
    fn naive_baseline() {
        let prefix = digits_up_to(Position(10), DigitBudget::default()).unwrap();
        let naive = naive_cfe(&prefix).unwrap();
        assert_eq!(&terms(&naive.terms)[..5], &[0, 8, 9, 1, 148921]);
        assert_eq!(naive.trusted_terms, 4);
        let p1 = digits_up_to(Position(1), DigitBudget::default()).unwrap();
        assert_eq!(terms(&naive_cfe(&p1).unwrap().terms), vec![0, 10]);
        let p0 = digits_up_to(Position(0), DigitBudget::default()).unwrap();
        assert!(naive_cfe(&p0).is_err());
    }

    #[test]
    fn naive_first_wrong_term_against_convergent_list() {
        let b = DigitBudget::default();
        let prefix = digits_up_to(Position(11), b).unwrap();
        assert_eq!(prefix.to_ascii(), "012345678910");
        let naive = naive_cfe(&prefix).unwrap();
        let p6 = digits_up_to(Position(190), b).unwrap();
        let (num, den) = hwm_convergent_parts(h(6), &p6).unwrap();
        let (truth, _) = euclid(&num, &den).unwrap();
        let first_wrong = naive
            .terms
            .terms()
            .iter()
            .zip(truth.terms())
            .position(|(a, b)| a != b)
            .unwrap();
        assert!(first_wrong >= naive.trusted_terms);
        assert_eq!(&terms(&naive.terms)[..4], &[0, 8, 9, 1]);
    }

    #[test]
    fn tail_checks() {
        let r = numerator_tail_checks(h(5), &BigUint::from(60_499_999_499u64));
        assert_eq!(r.longest_nines_run, 5);
        assert_eq!(r.nines_run_matches, Some(true));
        assert_eq!(r.tail_matches, None);
        let r = numerator_tail_checks(h(6), &BigUint::from(1_234_409u64));
        assert_eq!(r.expected_tail.as_deref(), Some("409"));
        assert_eq!(r.tail_matches, Some(true));
        let r = numerator_tail_checks(h(7), &BigUint::from(1_234_409u64));
        assert_eq!(r.tail_matches, Some(false));
    }

    #[test]
    fn parity_split_rejects_unsplittable() {
        let c = CoefficientList::from_u64s(&[0]).unwrap();
        assert!(apply_parity(c, FinalParity::Odd).is_err());
        let c = CoefficientList::from_u64s(&[1]).unwrap();
        assert_eq!(
            terms(&apply_parity(c, FinalParity::Odd).unwrap()),
            vec![0, 1]
        );
    }

    #[test]
    fn file_format() {
        let c = CoefficientList::from_u64s(&HWM5_TERMS).unwrap();
        let mut buf = Vec::new();
        c.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("0\n8\n9\n1\n149083\n"));
        assert!(text.ends_with("\n15\n"));
        assert_eq!(text.lines().count(), 18);
        assert_eq!(CoefficientList::read_from(&buf[..]).unwrap(), c);
    }

    #[test]
    fn file_format_rejects_malformed() {
        for bad in ["0\n\n8\n", "0\r\n8\n", "0\n-8\n", "0\n8 \n", "", "0\n0\n"] {
            assert!(
                CoefficientList::read_from(bad.as_bytes()).is_err(),
                "{bad:?}"
            );
        }
        let err = CoefficientList::read_from("0\n8\nx\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}
