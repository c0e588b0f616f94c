//! Ground-truth checks: expand convergents against generated C10 digits,
//! find the first wrong digit, measure the error, and compare everything to
//! the closed-form predictions.
//!
//! Errors are reported as `convergent - C10`, so convergents before
//! 1st-generation HWMs (which end on an odd index and overshoot) carry a
//! positive error and child convergents a negative one.

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cfe::{
    apply_parity, convergent_from_coefficients, euclid, hwm_denominator, numerator_for_hwm,
    numerator_position, numerator_tail_checks, CoefficientList, FinalParity, NumeratorTailReport,
    Rational,
};
use crate::classify::{find_hwms, number_hwms};
use crate::digits::{
    digit_window, digits_up_to, locate_position, position_of_integer, DigitBudget, DigitLocation,
    DigitPrefix, Position,
};
use crate::natural::{
    decimal_len, from_decimal_digits, pow10, to_decimal, to_decimal_padded, to_u64,
};
use crate::oracles::{
    child_denominator_shape, child_error_profile, child_length, denominator_parts, denominator_sci,
    error_profile, failing_integer, failure_tail_pattern, hwm_length, hwm_parity_rule, ncd,
    DenominatorShape, DigitBlock, Generation, HwmIndex, ParityCheck,
};
use crate::sci::{SciDecimal, Sign};
use crate::{Error, Result};

pub const PROFILE_VERSION: u32 = 1;
pub const DEFAULT_GUARD_DIGITS: u64 = 10;
/// Mantissa digits carried by an observed error.
pub const OBSERVED_MANTISSA_DIGITS: usize = 12;
/// Digits compared immediately before a predicted failure position.
const LEAD_IN: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub budget: DigitBudget,
    pub guard_digits: u64,
    /// Materialize enough C10 digits to measure NCD and the error directly
    /// (about 12x the digits the coefficients need).
    pub compute_error: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            budget: DigitBudget::default(),
            guard_digits: DEFAULT_GUARD_DIGITS,
            compute_error: true,
        }
    }
}

/// `b = m * 10^k`. Convergent-before-HWM denominators are a handful of
/// digits followed by a long run of zeros, and most of the arithmetic
/// below only ever touches `m`.
#[derive(Debug, Clone)]
struct ScaledDenominator {
    m: BigUint,
    k: u64,
}

impl ScaledDenominator {
    fn plain(b: &BigUint) -> Self {
        ScaledDenominator { m: b.clone(), k: 0 }
    }

    fn of_hwm(n: HwmIndex) -> Result<Self> {
        if n.get() == 4 {
            return Ok(Self::plain(&BigUint::from(81u32)));
        }
        let (m, k) = denominator_parts(n)?;
        Ok(ScaledDenominator { m, k })
    }
}

/// Scientific form of `b`, skipping the decimal conversion of a known
/// run of `k` trailing zeros when it is there.
fn scientific(b: &BigUint, k: u64) -> Result<SciDecimal> {
    let scale = pow10(k);
    let (q, r) = b.div_rem(&scale);
    if !r.is_zero() || q.is_zero() {
        return SciDecimal::from_natural(b);
    }
    let head = SciDecimal::from_natural(&q)?;
    SciDecimal::new(
        head.sign(),
        head.mantissa(),
        head.exponent() + BigInt::from(k),
    )
}

fn require_proper(r: &Rational) -> Result<()> {
    if r.is_proper() {
        Ok(())
    } else {
        Err(Error::NotProperFraction("convergent"))
    }
}

/// `(a * 10^(s-1)) mod b`, reduced to the scaled form: returns `y` with
/// `(a * 10^(s-1)) mod b = y * 10^k'` and `y < m * 10^(k-k')`.
fn shifted_residue(a: &BigUint, den: &ScaledDenominator, s: u64) -> (BigUint, BigUint) {
    let shift = s - 1;
    if shift >= den.k {
        let m = &den.m;
        let y = (a % m) * BigUint::from(10u32).modpow(&BigUint::from(shift - den.k), m) % m;
        (y, m.clone())
    } else {
        let b = &den.m * pow10(den.k);
        ((a * pow10(shift)) % &b, b)
    }
}

fn window_scaled(a: &BigUint, den: &ScaledDenominator, start: Position, len: usize) -> String {
    let (y, modulus) = shifted_residue(a, den, start.0);
    let w = y * pow10(len as u64) / modulus;
    to_decimal_padded(&w, len)
}

/// Fractional digits of `r` at positions `start..start+len` (position 1 is
/// the first digit after the point), by modular exponentiation rather than
/// a full long division.
pub fn digits_of(r: &Rational, start: Position, len: usize) -> Result<String> {
    require_proper(r)?;
    if start.0 == 0 {
        return Err(Error::LeadingZeroPosition);
    }
    Ok(window_scaled(
        r.numerator(),
        &ScaledDenominator::plain(r.denominator()),
        start,
        len,
    ))
}

/// The first `digits` fractional digits of `r`, truncated.
pub fn long_divide(r: &Rational, digits: u64, budget: DigitBudget) -> Result<String> {
    require_proper(r)?;
    if digits == 0 {
        return Err(Error::Domain("digit count must be at least 1".into()));
    }
    budget.check(digits)?;
    let q = r.numerator() * pow10(digits) / r.denominator();
    Ok(to_decimal_padded(&q, digits as usize))
}

/// `r` against a truth prefix `T / 10^P`: holds `a 10^(P-k) - T m`, which is
/// `(a 10^P - T b) / 10^k`.
struct TruthComparison<'t> {
    scaled_diff: BigInt,
    m: BigUint,
    truth: &'t DigitPrefix,
}

impl<'t> TruthComparison<'t> {
    fn new(a: &BigUint, den: &ScaledDenominator, truth: &'t DigitPrefix) -> Self {
        let p = truth.last_position().0;
        let (m, k) = if den.k <= p {
            (den.m.clone(), den.k)
        } else {
            (&den.m * pow10(den.k - p), p)
        };
        let t = truth.to_natural();
        let lhs = BigInt::from(a * pow10(p - k));
        let rhs = BigInt::from(t * &m);
        TruthComparison {
            scaled_diff: lhs - rhs,
            m,
            truth,
        }
    }

    fn p(&self) -> u64 {
        self.truth.last_position().0
    }

    /// Position of the first wrong digit (= NCD), and `r`'s digits from there
    /// through the end of the truth.
    fn first_mismatch(&self) -> Result<(u64, String)> {
        let p = self.p();
        // e = floor(a 10^P / b) - T
        let e = self.scaled_diff.div_floor(&BigInt::from(self.m.clone()));
        if e.is_zero() {
            return Err(Error::InsufficientTruth {
                required: p + 2,
                available: p + 1,
            });
        }
        // Smallest j with floor(q / 10^j) == floor(T / 10^j), where
        // q = T + e: it is where (T mod 10^j) + e first lands in [0, 10^j).
        let digits = self.truth.digits();
        let mut j = decimal_len(e.magnitude()) - 1;
        let mut low = BigInt::from(from_decimal_digits(&digits[digits.len() - j as usize..]));
        let mut scale = BigInt::from(pow10(j));
        loop {
            let shifted = &low + &e;
            if !shifted.is_negative() && shifted < scale {
                let ncd = p - j + 1;
                let tail = shifted.to_biguint().expect("non-negative");
                return Ok((ncd, to_decimal_padded(&tail, j as usize)));
            }
            j += 1;
            if j > p {
                return Err(Error::NotProperFraction("convergent"));
            }
            let d = digits[digits.len() - j as usize];
            low += &scale * u32::from(d);
            scale *= 10u32;
        }
    }

    /// `r - truncation`, with `mantissa_digits` leading digits (truncated).
    fn error(&self, mantissa_digits: usize, guard: u64) -> Result<SciDecimal> {
        let p = self.p();
        if self.scaled_diff.is_zero() {
            return Err(Error::InsufficientTruth {
                required: p + 2,
                available: p + 1,
            });
        }
        let sign = if self.scaled_diff.sign() == BigSign::Plus {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let num = self.scaled_diff.magnitude();
        let num_len = decimal_len(num) as i64;
        let den_len = decimal_len(&self.m) as i64;
        // Quotient of num * 10^shift / m carries at least mantissa+1 digits;
        // floor(floor(x / 10^t) / m) = floor(x / (m 10^t)) keeps it exact.
        let shift = mantissa_digits as i64 + 2 + den_len - num_len;
        let q = if shift >= 0 {
            num * pow10(shift as u64) / &self.m
        } else {
            (num / pow10((-shift) as u64)) / &self.m
        };
        let qs = to_decimal(&q);
        let exponent = qs.len() as i64 - 1 - shift - p as i64;
        let required = exponent.unsigned_abs() + mantissa_digits as u64 + guard;
        if exponent < 0 && required > p {
            return Err(Error::InsufficientTruth {
                required,
                available: p,
            });
        }
        SciDecimal::new(sign, &qs[..mantissa_digits.min(qs.len())], exponent)
    }
}

/// NCD of `r` against `truth` and where the first wrong digit falls.
pub fn measure_ncd(r: &Rational, truth: &DigitPrefix) -> Result<(u64, DigitLocation)> {
    require_proper(r)?;
    let cmp = TruthComparison::new(
        r.numerator(),
        &ScaledDenominator::plain(r.denominator()),
        truth,
    );
    let (ncd, _) = cmp.first_mismatch()?;
    Ok((ncd, locate_position(Position(ncd))?))
}

/// Leading digits of `r - C10`, with C10 taken from `truth`. The truth must
/// reach `|exponent| + mantissa_digits + guard` digits.
pub fn measure_error(
    r: &Rational,
    truth: &DigitPrefix,
    mantissa_digits: usize,
    guard: u64,
) -> Result<SciDecimal> {
    require_proper(r)?;
    if mantissa_digits == 0 {
        return Err(Error::Domain(
            "mantissa digit count must be at least 1".into(),
        ));
    }
    TruthComparison::new(
        r.numerator(),
        &ScaledDenominator::plain(r.denominator()),
        truth,
    )
    .error(mantissa_digits, guard)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Confirmed,
    Violation,
}

/// A prediction the observation did not reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub field: String,
    pub predicted: String,
    pub observed: String,
}

#[derive(Default)]
struct Diff(Vec<Mismatch>);

impl Diff {
    fn check(&mut self, field: &str, predicted: impl ToString, observed: impl ToString, ok: bool) {
        if !ok {
            self.0.push(Mismatch {
                field: field.to_string(),
                predicted: predicted.to_string(),
                observed: observed.to_string(),
            });
        }
    }

    fn eq<T: PartialEq + ToString>(&mut self, field: &str, predicted: T, observed: T) {
        let ok = predicted == observed;
        self.check(field, predicted, observed, ok);
    }

    fn status(&self) -> Status {
        if self.0.is_empty() {
            Status::Confirmed
        } else {
            Status::Violation
        }
    }
}

/// The convergent before HWM #N and its expansion.
#[derive(Debug, Clone)]
pub struct HwmComputation {
    pub n: HwmIndex,
    pub convergent: Rational,
    /// Expansion with the degenerate split applied if needed; its length is
    /// the coefficient number of HWM #N.
    pub coefficients: CoefficientList,
    pub degenerate_split: bool,
    /// The Euclidean run ended on a unit remainder.
    pub lowest_terms: bool,
    /// Digits of C10 consumed, leading '0' included.
    pub c10_digits_used: u64,
}

/// Denominator from the closed form, numerator by the ceiling construction,
/// coefficients by the Euclidean algorithm.
pub fn compute_hwm(n: HwmIndex, budget: DigitBudget) -> Result<HwmComputation> {
    let p = numerator_position(n)?;
    budget.check(p.0 + 1)?;
    let prefix = digits_up_to(p, budget)?;
    let numerator = numerator_for_hwm(n, &prefix)?;
    let denominator = hwm_denominator(n)?;
    let (canonical, gcd) = euclid(&numerator, &denominator)?;
    let canonical_len = canonical.len();
    let coefficients = apply_parity(canonical, FinalParity::Odd)?;
    let lowest_terms = gcd.is_one();
    let convergent = if lowest_terms {
        Rational::from_coprime(numerator, denominator)
    } else {
        Rational::new(numerator, denominator)?
    };
    Ok(HwmComputation {
        n,
        convergent,
        degenerate_split: coefficients.len() != canonical_len,
        coefficients,
        lowest_terms,
        c10_digits_used: p.0 + 1,
    })
}

/// A coefficient observed at a known HWM position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HwmObservation {
    pub hwm: u32,
    pub index: usize,
    pub observed_length: u64,
    pub predicted_length: u64,
    pub parity: ParityCheck,
}

impl HwmObservation {
    pub fn matches(&self) -> bool {
        self.observed_length == self.predicted_length && self.parity == ParityCheck::Consistent
    }
}

/// Where the convergent stops reproducing C10 and what it writes instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureObservation {
    /// Position of the first wrong digit.
    pub position: u64,
    pub location: DigitLocation,
    /// Digits of the convergent starting at `position`.
    pub convergent_digits: String,
    /// Digits of C10 starting at `position`.
    pub c10_digits: String,
    /// The integer the convergent writes where `location.integer` belongs.
    pub fails_as: u64,
}

fn failure_at(
    a: &BigUint,
    den: &ScaledDenominator,
    position: u64,
    window: usize,
) -> Result<FailureObservation> {
    let location = locate_position(Position(position))?;
    let start = position_of_integer(location.integer)?;
    let width = location.integer.ilog10() as usize + 1;
    let fails_as_digits = window_scaled(a, den, start, width);
    let c10: String = digit_window(Position(position), window)?
        .iter()
        .map(|&d| char::from(b'0' + d))
        .collect();
    Ok(FailureObservation {
        position,
        location,
        convergent_digits: window_scaled(a, den, Position(position), window),
        c10_digits: c10,
        fails_as: fails_as_digits
            .parse()
            .map_err(|_| Error::Overflow("failing integer"))?,
    })
}

/// Checks around the predicted failure position alone, without the
/// truth prefix: the lead-in agrees with C10 and the predicted digit does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalFailureCheck {
    pub failure: FailureObservation,
    pub lead_in_agrees: bool,
    pub digit_differs: bool,
}

fn local_failure_check(
    a: &BigUint,
    den: &ScaledDenominator,
    position: u64,
    window: usize,
) -> Result<LocalFailureCheck> {
    let failure = failure_at(a, den, position, window)?;
    let from = position.saturating_sub(LEAD_IN).max(1);
    let len = (position - from) as usize;
    let ours = window_scaled(a, den, Position(from), len);
    let theirs: String = digit_window(Position(from), len)?
        .iter()
        .map(|&d| char::from(b'0' + d))
        .collect();
    let digit_differs =
        failure.convergent_digits.as_bytes().first() != failure.c10_digits.as_bytes().first();
    Ok(LocalFailureCheck {
        lead_in_agrees: ours == theirs,
        digit_differs,
        failure,
    })
}

/// Measured against a full truth prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruthMeasurement {
    pub ncd: u64,
    pub failure: FailureObservation,
    pub error: SciDecimal,
    pub truth_digits: u64,
}

fn measure_against_truth(
    a: &BigUint,
    den: &ScaledDenominator,
    truth_last: u64,
    window: usize,
    guard: u64,
    budget: DigitBudget,
) -> Result<TruthMeasurement> {
    budget.check(truth_last + 1)?;
    let truth = digits_up_to(Position(truth_last), budget)?;
    let cmp = TruthComparison::new(a, den, &truth);
    let (ncd, tail) = cmp.first_mismatch()?;
    let error = cmp.error(OBSERVED_MANTISSA_DIGITS, guard)?;
    let location = locate_position(Position(ncd))?;
    let start = position_of_integer(location.integer)?;
    let width = location.integer.ilog10() as usize + 1;
    let fails_as = window_scaled(a, den, start, width)
        .parse()
        .map_err(|_| Error::Overflow("failing integer"))?;
    let window = window.min(tail.len());
    let c10: String = truth.digits()[ncd as usize..ncd as usize + window]
        .iter()
        .map(|&d| char::from(b'0' + d))
        .collect();
    Ok(TruthMeasurement {
        ncd,
        failure: FailureObservation {
            position: ncd,
            location,
            convergent_digits: tail[..window].to_string(),
            c10_digits: c10,
            fails_as,
        },
        error,
        truth_digits: truth_last + 1,
    })
}

/// One row of the HWM summary, with every prediction checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergentProfile {
    pub profile_version: u32,
    pub hwm: u32,
    pub status: Status,
    pub mismatches: Vec<Mismatch>,
    /// Published figures the computation does not reproduce.
    pub published_discrepancies: Vec<Mismatch>,
    pub coefficient_count: usize,
    pub parity: ParityCheck,
    pub degenerate_split: bool,
    pub lowest_terms: bool,
    pub rebuilt_convergent_matches: bool,
    pub denominator_predicted: SciDecimal,
    pub denominator_observed: SciDecimal,
    pub denominator_digits: u64,
    pub numerator_digits: u64,
    pub total_coefficient_digits: u64,
    pub c10_digits_used: u64,
    pub previous_hwm: Option<HwmObservation>,
    pub numerator_tail: NumeratorTailReport,
    pub predicted_ncd: u64,
    pub failing_integer_predicted: u64,
    pub fails_as_predicted: u64,
    pub failure_pattern_predicted: String,
    /// Present when the truth prefix was not materialized.
    pub local_failure: Option<LocalFailureCheck>,
    pub error_predicted: SciDecimal,
    /// Present when the truth prefix was materialized.
    pub measured: Option<TruthMeasurement>,
    pub observed_ncd: Option<u64>,
    pub first_fail: Option<DigitLocation>,
    pub error_observed: Option<SciDecimal>,
}

/// C10 digits needed to verify HWM #N (leading '0' included).
pub fn required_digits(n: HwmIndex, opts: &VerifyOptions) -> Result<u64> {
    let coefficient_digits = numerator_position(n)?.0 + 1;
    if !opts.compute_error {
        return Ok(coefficient_digits);
    }
    Ok(coefficient_digits.max(truth_last_for_hwm(n, opts)? + 1))
}

fn truth_last_for_hwm(n: HwmIndex, opts: &VerifyOptions) -> Result<u64> {
    let predicted = error_profile(n)?;
    let exp = to_u64(predicted.exponent().magnitude(), "error exponent")?;
    let pattern = failure_tail_pattern(n)?.len() as u64;
    let ncd = to_u64(&ncd(n)?, "ncd")?;
    Ok((exp + OBSERVED_MANTISSA_DIGITS as u64 + opts.guard_digits)
        .max(ncd + pattern + opts.guard_digits))
}

pub fn verify_hwm(n: HwmIndex, opts: &VerifyOptions) -> Result<ConvergentProfile> {
    opts.budget.check(required_digits(n, opts)?)?;
    let computation = compute_hwm(n, opts.budget)?;
    verify_computation(&computation, opts)
}

fn small(x: &BigUint, what: &'static str) -> Result<u64> {
    to_u64(x, what)
}

/// Checks a finished computation against every applicable prediction.
pub fn verify_computation(c: &HwmComputation, opts: &VerifyOptions) -> Result<ConvergentProfile> {
    let n = c.n;
    let mut diff = Diff::default();
    let den = ScaledDenominator::of_hwm(n)?;
    let a = c.convergent.numerator();
    let b = c.convergent.denominator();
    require_proper(&c.convergent)?;

    let coefficient_count = c.coefficients.len();
    let parity = hwm_parity_rule(coefficient_count as u64, Generation::First);
    diff.check(
        "hwm_index_parity",
        "even",
        coefficient_count,
        parity == ParityCheck::Consistent,
    );
    diff.eq("lowest_terms", true, c.lowest_terms);
    let rebuilt = convergent_from_coefficients(&c.coefficients);
    let rebuilt_ok = rebuilt == c.convergent;
    diff.eq("rebuilt_convergent", true, rebuilt_ok);

    let denominator_predicted = if n.get() == 4 {
        SciDecimal::new(Sign::Plus, "81", 1)?
    } else {
        denominator_sci(n)?
    };
    let denominator_observed = scientific(b, den.k)?;
    diff.eq(
        "denominator",
        denominator_predicted.to_string(),
        denominator_observed.to_string(),
    );

    let lengths = c.coefficients.digit_lengths();
    let previous_hwm = match n.get().checked_sub(1).and_then(|p| HwmIndex::new(p).ok()) {
        Some(prev) if prev.get() >= 4 => {
            let marks = number_hwms(&find_hwms(&lengths));
            let predicted_length = small(&hwm_length(prev)?, "hwm length")?;
            let obs = marks
                .iter()
                .find(|m| m.number == prev.get())
                .map(|m| HwmObservation {
                    hwm: prev.get(),
                    index: m.index,
                    observed_length: m.length,
                    predicted_length,
                    parity: hwm_parity_rule(m.index as u64, Generation::First),
                });
            match &obs {
                Some(o) => diff.check(
                    "previous_hwm_length",
                    o.predicted_length,
                    format!("{} at index {}", o.observed_length, o.index),
                    o.matches(),
                ),
                None => diff.check("previous_hwm_length", predicted_length, "absent", false),
            }
            obs
        }
        _ => None,
    };

    let numerator_tail = numerator_tail_checks(n, a);
    if let Some(ok) = numerator_tail.tail_matches {
        diff.check(
            "numerator_tail",
            numerator_tail.expected_tail.clone().unwrap_or_default(),
            "different tail",
            ok,
        );
    }
    // Published run lengths are observations, not predictions: a difference
    // is reported but does not change the status.
    let mut published = Diff::default();
    if let Some(p) = numerator_tail.published_nines_run {
        published.eq("numerator_nines_run", p, numerator_tail.longest_nines_run);
    }

    let predicted_ncd = small(&ncd(n)?, "ncd")?;
    let (fail_int, fails_as) = failing_integer(n)?;
    let failing_integer_predicted = small(&fail_int, "failing integer")?;
    let fails_as_predicted = small(&fails_as, "failing integer")?;
    let pattern = failure_tail_pattern(n)?;
    let error_predicted = error_profile(n)?;

    let (local_failure, measured) = if opts.compute_error {
        let last = truth_last_for_hwm(n, opts)?;
        let m =
            measure_against_truth(a, &den, last, pattern.len(), opts.guard_digits, opts.budget)?;
        (None, Some(m))
    } else {
        let local = local_failure_check(a, &den, predicted_ncd, pattern.len())?;
        diff.eq("lead_in_agrees", true, local.lead_in_agrees);
        diff.eq("failing_digit_differs", true, local.digit_differs);
        (Some(local), None)
    };

    let failure = measured
        .as_ref()
        .map(|m| &m.failure)
        .or(local_failure.as_ref().map(|l| &l.failure))
        .expect("one of the two paths ran");
    diff.eq(
        "failing_integer",
        failing_integer_predicted,
        failure.location.integer,
    );
    diff.eq("fails_as", fails_as_predicted, failure.fails_as);
    diff.eq(
        "failure_pattern",
        pattern.clone(),
        failure.convergent_digits.clone(),
    );
    if let Some(m) = &measured {
        diff.eq("ncd", predicted_ncd, m.ncd);
        diff.check(
            "error",
            &error_predicted,
            &m.error,
            m.error.agrees_with(&error_predicted),
        );
    }

    Ok(ConvergentProfile {
        profile_version: PROFILE_VERSION,
        hwm: n.get(),
        status: diff.status(),
        mismatches: diff.0,
        published_discrepancies: published.0,
        coefficient_count,
        parity,
        degenerate_split: c.degenerate_split,
        lowest_terms: c.lowest_terms,
        rebuilt_convergent_matches: rebuilt_ok,
        denominator_predicted,
        denominator_observed,
        denominator_digits: decimal_len(b),
        numerator_digits: decimal_len(a),
        total_coefficient_digits: lengths.iter().sum(),
        c10_digits_used: c.c10_digits_used,
        previous_hwm,
        numerator_tail,
        predicted_ncd,
        failing_integer_predicted,
        fails_as_predicted,
        failure_pattern_predicted: pattern,
        local_failure,
        error_predicted,
        observed_ncd: measured.as_ref().map(|m| m.ncd),
        first_fail: measured.as_ref().map(|m| m.failure.location),
        error_observed: measured.as_ref().map(|m| m.error.clone()),
        measured,
    })
}

/// HWM #N's own length, read from the expansion of the convergent before
/// HWM #(N+1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainObservation {
    pub observation: HwmObservation,
    /// The coefficients before HWM #N agree between both expansions.
    pub prefix_consistent: bool,
    /// HWM #N is a strict running maximum at that index.
    pub is_running_maximum: bool,
}

impl ChainObservation {
    pub fn confirmed(&self) -> bool {
        self.observation.matches() && self.prefix_consistent && self.is_running_maximum
    }
}

/// Exposes HWM #N by computing through the convergent before HWM #(N+1).
pub fn hwm_length_chain(n: HwmIndex, budget: DigitBudget) -> Result<ChainObservation> {
    if n.get() < 4 {
        return Err(Error::HwmOutOfRange {
            op: "hwm_length_chain",
            min: 4,
            got: n.get(),
        });
    }
    let current = compute_hwm(n, budget)?;
    let next = compute_hwm(HwmIndex::new(n.get() + 1)?, budget)?;
    chain_observation(&current, &next)
}

/// HWM #`current.n` as it appears in the expansion `next`.
pub fn chain_observation(
    current: &HwmComputation,
    next: &HwmComputation,
) -> Result<ChainObservation> {
    let n = current.n;
    if next.n.get() != n.get() + 1 {
        return Err(Error::Domain(format!(
            "expansions for {} and {} are not consecutive",
            n, next.n
        )));
    }
    let index = current.coefficients.len();
    let Some(term) = next.coefficients.terms().get(index) else {
        return Err(Error::IndexOutOfRange {
            index,
            len: next.coefficients.len(),
        });
    };
    let observed_length = decimal_len(term);
    let prefix_consistent =
        next.coefficients.terms()[..index] == current.coefficients.terms()[..index];
    let lengths = next.coefficients.digit_lengths();
    let is_running_maximum = lengths[..index].iter().all(|&l| l < observed_length);
    Ok(ChainObservation {
        observation: HwmObservation {
            hwm: n.get(),
            index,
            observed_length,
            predicted_length: small(&hwm_length(n)?, "hwm length")?,
            parity: hwm_parity_rule(index as u64, Generation::First),
        },
        prefix_consistent,
        is_running_maximum,
    })
}

/// Splits a decimal denominator into preamble, longest run of nines,
/// penultimate and trailing zeros.
pub fn parse_denominator_shape(b: &BigUint) -> DenominatorShape {
    let s = to_decimal(b);
    let body = s.trim_end_matches('0');
    let zeroes = (s.len() - body.len()) as u64;
    let bytes = body.as_bytes();
    let (mut best_start, mut best_len) = (bytes.len(), 0usize);
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'9' {
            let start = i;
            while i < bytes.len() && bytes[i] == b'9' {
                i += 1;
            }
            if i - start > best_len {
                best_start = start;
                best_len = i - start;
            }
        } else {
            i += 1;
        }
    }
    DenominatorShape {
        preamble: DigitBlock::Known(body[..best_start].to_string()),
        nines_count: BigUint::from(best_len),
        penultimate: DigitBlock::Known(body[(best_start + best_len).min(body.len())..].to_string()),
        zeroes_count: BigUint::from(zeroes),
    }
}

/// Convergent truncated before a 2nd-generation HWM, measured and checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChildProfile {
    pub profile_version: u32,
    pub coefficient_index: usize,
    /// The HWM that opens the interval holding the child.
    pub after_hwm: u32,
    pub status: Status,
    pub mismatches: Vec<Mismatch>,
    pub parity: ParityCheck,
    pub coefficient_length: Option<u64>,
    pub predicted_length: u64,
    pub ncd: u64,
    /// The first wrong digit sits at `|error exponent| - 1`.
    pub predicted_fail_position: u64,
    pub failure: FailureObservation,
    pub error_predicted: SciDecimal,
    pub error_observed: SciDecimal,
    pub denominator_digits: u64,
    pub shape_predicted: DenominatorShape,
    pub shape_observed: DenominatorShape,
    pub truth_digits: u64,
}

/// Analyses the convergent formed by the first `index` coefficients, where
/// coefficient `index` is claimed to be a 2nd-generation HWM.
pub fn analyze_child(
    coefficients: &CoefficientList,
    index: usize,
    opts: &VerifyOptions,
) -> Result<ChildProfile> {
    let lengths = coefficients.digit_lengths();
    let marks = number_hwms(&find_hwms(&lengths[..index.min(lengths.len())]));
    let Some(opening) = marks.iter().rev().find(|m| m.index < index) else {
        return Err(Error::Domain(format!(
            "coefficient {index} precedes every HWM"
        )));
    };
    let n = HwmIndex::new(opening.number)?;
    if n.get() < 6 {
        return Err(Error::Domain(format!(
            "coefficient {index} lies after HWM #{}; children start after HWM #6",
            n.get()
        )));
    }
    let prefix = coefficients.prefix(index)?;
    let r = convergent_from_coefficients(&prefix);
    require_proper(&r)?;

    let mut diff = Diff::default();
    let parity = hwm_parity_rule(index as u64, Generation::Child);
    diff.check(
        "child_index_parity",
        "odd",
        index,
        parity == ParityCheck::Consistent,
    );

    let predicted_length = small(&child_length(n.minus(1))?, "child length")?;
    let coefficient_length = lengths.get(index).copied();
    if let Some(len) = coefficient_length {
        diff.eq("child_length", predicted_length, len);
    }

    let error_predicted = child_error_profile(n)?;
    let exp = to_u64(
        error_predicted.exponent().magnitude(),
        "child error exponent",
    )?;
    let truth_last = exp + OBSERVED_MANTISSA_DIGITS as u64 + opts.guard_digits;
    let m = measure_against_truth(
        r.numerator(),
        &ScaledDenominator::plain(r.denominator()),
        truth_last,
        8,
        opts.guard_digits,
        opts.budget,
    )?;
    let predicted_fail_position = exp - 1;
    diff.eq("fail_position", predicted_fail_position, m.ncd);
    diff.check(
        "error",
        &error_predicted,
        &m.error,
        m.error.agrees_with(&error_predicted),
    );

    let shape_predicted = child_denominator_shape(n)?;
    let shape_observed = parse_denominator_shape(r.denominator());
    let fmt_shape = |s: &DenominatorShape| {
        format!(
            "{}/{}/{}/{}",
            s.preamble.len(),
            s.nines_count,
            s.penultimate.len(),
            s.zeroes_count
        )
    };
    diff.check(
        "denominator_shape",
        fmt_shape(&shape_predicted),
        fmt_shape(&shape_observed),
        shape_predicted.same_lengths(&shape_observed),
    );

    Ok(ChildProfile {
        profile_version: PROFILE_VERSION,
        coefficient_index: index,
        after_hwm: n.get(),
        status: diff.status(),
        mismatches: diff.0,
        parity,
        coefficient_length,
        predicted_length,
        ncd: m.ncd,
        predicted_fail_position,
        failure: m.failure,
        error_predicted,
        error_observed: m.error,
        denominator_digits: decimal_len(r.denominator()),
        shape_predicted,
        shape_observed,
        truth_digits: m.truth_digits,
    })
}

/// Rounds an observed error to the precision of a prediction, for display.
pub fn rounded_like(observed: &SciDecimal, predicted: &SciDecimal) -> SciDecimal {
    observed.rounded(predicted.mantissa().len())
}
