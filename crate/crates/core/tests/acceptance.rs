//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use c10_cfe::cfe::{
    cfe_extract, convergent_from_coefficients, naive_cfe, CoefficientList, Rational,
};
use c10_cfe::classify::{child_positions, classify, ScanThresholds};
use c10_cfe::digits::{digits_up_to, locate_position, position_of_integer, DigitBudget, Position};
use c10_cfe::oracles::{
    child_length, denominator_sci, error_profile, failing_integer, hwm_length, ncd, HwmIndex,
};
use c10_cfe::sci::SciDecimal;
use c10_cfe::verify::{
    analyze_child, chain_observation, compute_hwm, measure_error, verify_computation, verify_hwm,
    HwmComputation, Status, VerifyOptions,
};

// Observed error mantissas are rounded half-up to the predicted length and
// must then match digit for digit. There is no slack in the last place.

/// Guard digits beyond the error exponent when materializing C10.
const GUARD_DIGITS: u64 = 10;
/// Wall-clock allowance for the N = 4..8 reproduction.
const TABLE1_TIME_LIMIT: Duration = Duration::from_secs(120);

const RANDOM_RATIONALS: usize = 1_000;
const POSITION_ROUND_TRIPS: u64 = 100_000;
const CONCATENATION_DIGITS: u64 = 1_000_000;
const SEED: u64 = 0x00C1_0CFE;

type Outcome = Result<String, String>;

fn h(n: u32) -> HwmIndex {
    HwmIndex::new(n).expect("valid hwm")
}

fn sci(s: &str) -> SciDecimal {
    s.parse().expect("valid literal")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nat(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Convergents before HWM #4..#9, computed once and shared.
struct Computed {
    levels: Vec<HwmComputation>,
    elapsed_to_8: Duration,
}

impl Computed {
    fn get(&self, n: u32) -> &HwmComputation {
        &self.levels[(n - 4) as usize]
    }
}

fn compute_all() -> Result<Computed, String> {
    let start = Instant::now();
    let mut levels = Vec::new();
    let mut elapsed_to_8 = Duration::ZERO;
    for n in 4..=9 {
        levels.push(compute_hwm(h(n), DigitBudget::default()).map_err(|e| format!("N={n}: {e}"))?);
        if n == 8 {
            elapsed_to_8 = start.elapsed();
        }
    }
    Ok(Computed {
        levels,
        elapsed_to_8,
    })
}

fn table1(c: &Computed) -> Outcome {
    let rows: [(u32, usize, u64, &str, &str); 5] = [
        (4, 4, 8, "8.1E+1", "1.0E-9"),
        (5, 18, 187, "4.9005E+11", "9.1E-190"),
        (6, 40, 2886, "4.990005E+192", "9.01E-2890"),
        (7, 162, 38_885, "4.99900005E+2893", "9.001E-38890"),
        (8, 526, 488_884, "4.9999000005E+38894", "9.0001E-488890"),
    ];
    let opts = VerifyOptions {
        guard_digits: GUARD_DIGITS,
        ..VerifyOptions::default()
    };
    let start = Instant::now();
    let mut seen = Vec::new();
    for (n, index, want_ncd, den, err) in rows {
        let p = verify_computation(c.get(n), &opts).map_err(|e| format!("N={n}: {e}"))?;
        ensure(p.status == Status::Confirmed, || {
            format!("N={n} violation: {:?}", p.mismatches)
        })?;
        ensure(p.coefficient_count == index, || {
            format!("N={n}: HWM at {} not {index}", p.coefficient_count)
        })?;
        ensure(p.observed_ncd == Some(want_ncd), || {
            format!("N={n}: ncd {:?} not {want_ncd}", p.observed_ncd)
        })?;
        ensure(p.denominator_observed.to_string() == den, || {
            format!("N={n}: denominator {} not {den}", p.denominator_observed)
        })?;
        let predicted = sci(err);
        ensure(
            predicted == error_profile(h(n)).map_err(|e| e.to_string())?,
            || format!("N={n}: oracle error differs from {err}"),
        )?;
        let observed = p.error_observed.clone().ok_or("no error measured")?;
        ensure(observed.agrees_with(&predicted), || {
            format!("N={n}: error {observed} does not round to {err}")
        })?;
        if n >= 5 {
            ensure(
                denominator_sci(h(n))
                    .map_err(|e| e.to_string())?
                    .to_string()
                    == den,
                || format!("N={n}: oracle denominator differs from {den}"),
            )?;
        }
        let (fails, fails_as) = failing_integer(h(n)).map_err(|e| e.to_string())?;
        let first = p.first_fail.ok_or("no failure located")?;
        ensure(nat(first.integer) == fails, || {
            format!("N={n}: fails at {}", first.integer)
        })?;
        ensure(nat(p.fails_as_predicted) == fails_as, || {
            format!("N={n}: fails as")
        })?;
        seen.push(format!("#{n}@{index}"));
    }
    let verify_time = start.elapsed();
    let total = verify_time + c.elapsed_to_8;
    ensure(total <= TABLE1_TIME_LIMIT, || {
        format!("took {total:.1?}, limit {TABLE1_TIME_LIMIT:?}")
    })?;
    Ok(format!("{} confirmed in {total:.1?}", seen.join(" ")))
}

fn table2(c: &Computed) -> Outcome {
    let rows = [
        (4, 4u64, 2u64),
        (5, 24, 11),
        (6, 217, 191),
        (7, 2995, 2891),
        (8, 39_231, 38_891),
    ];
    for (n, total, used) in rows {
        let l = c.get(n);
        ensure(l.coefficients.total_digits() == total, || {
            format!(
                "N={n}: {} coefficient digits, want {total}",
                l.coefficients.total_digits()
            )
        })?;
        ensure(l.c10_digits_used == used, || {
            format!("N={n}: {} C10 digits, want {used}", l.c10_digits_used)
        })?;
    }
    Ok("totals 4/24/217/2995/39231 from 2/11/191/2891/38891 digits".into())
}

fn efficiency(c: &Computed) -> Outcome {
    let prefix = digits_up_to(Position(10), DigitBudget::default()).map_err(|e| e.to_string())?;
    let naive = naive_cfe(&prefix).map_err(|e| e.to_string())?;
    let naive_term = naive
        .terms
        .terms()
        .get(4)
        .cloned()
        .ok_or("naive list too short")?;
    ensure(naive_term == nat(148_921), || {
        format!("naive term {naive_term}")
    })?;
    let printed: [u64; 18] = [0, 8, 9, 1, 149_083, 1, 1, 1, 4, 1, 1, 1, 3, 4, 1, 1, 1, 15];
    let want = CoefficientList::from_u64s(&printed).map_err(|e| e.to_string())?;
    let got = &c.get(5).coefficients;
    ensure(*got == want, || {
        format!("convergent list {:?}", got.terms())
    })?;
    Ok(format!(
        "naive 148921 ({} trusted terms) vs convergent 149083, 18 terms ending 15",
        naive.trusted_terms
    ))
}

fn length_chain(c: &Computed) -> Outcome {
    let mut found = Vec::new();
    for (n, want) in [(5u32, 166u64), (6, 2504), (7, 33_102), (8, 411_100)] {
        let chain = chain_observation(c.get(n), c.get(n + 1)).map_err(|e| format!("N={n}: {e}"))?;
        let o = &chain.observation;
        ensure(
            chain.confirmed() && o.observed_length == want && o.index % 2 == 0,
            || format!("HWM #{n}: {chain:?}"),
        )?;
        ensure(
            hwm_length(h(n)).map_err(|e| e.to_string())? == nat(want),
            || format!("oracle length for #{n}"),
        )?;
        found.push(format!("{want}@{}", o.index));
    }
    Ok(found.join(" "))
}

fn children(c: &Computed) -> Outcome {
    let coeffs = &c.get(8).coefficients;
    let entries = classify(&coeffs.digit_lengths(), &ScanThresholds::published())
        .map_err(|e| e.to_string())?;
    let report = child_positions(&entries);
    ensure(report.consistent(), || {
        format!("child layout {:?}", report.violations)
    })?;
    let found: Vec<(usize, u64)> = entries
        .iter()
        .filter(|e| e.generation == Some(2))
        .map(|e| (e.coefficient_index, e.digit_length))
        .collect();
    ensure(found == [(101, 140), (357, 2468)], || {
        format!("gen-2 entries {found:?}")
    })?;

    let opts = VerifyOptions {
        guard_digits: GUARD_DIGITS,
        ..VerifyOptions::default()
    };
    for (index, err, n) in [(101usize, "-8.92E-5590", 6u32), (357, "-8.992E-74890", 7)] {
        let p = analyze_child(coeffs, index, &opts).map_err(|e| format!("child {index}: {e}"))?;
        ensure(p.status == Status::Confirmed, || {
            format!("child {index}: {:?}", p.mismatches)
        })?;
        ensure(p.error_observed.agrees_with(&sci(err)), || {
            format!("child {index}: {} vs {err}", p.error_observed)
        })?;
        let want = child_length(h(n - 1)).map_err(|e| e.to_string())?;
        ensure(p.coefficient_length.map(nat) == Some(want), || {
            format!("child {index}: length {:?}", p.coefficient_length)
        })?;
    }
    let loc = locate_position(Position(5589)).map_err(|e| e.to_string())?;
    ensure(loc.integer == 1674 && loc.digit_ordinal == 4, || {
        format!("5589 -> {loc:?}")
    })?;
    let p101 = analyze_child(coeffs, 101, &opts).map_err(|e| e.to_string())?;
    ensure(p101.ncd == 5589 && p101.failure.location == loc, || {
        format!(
            "child 101 fails at {} {:?}",
            p101.ncd, p101.failure.location
        )
    })?;
    Ok("gen-2 at 101 (140 digits) and 357 (2468 digits); errors match; position 5589 is 1674 digit 4".into())
}

fn shape(c: &Computed) -> Outcome {
    let coeffs = &c.get(8).coefficients;
    let r = convergent_from_coefficients(&coeffs.prefix(101).map_err(|e| e.to_string())?);
    let s = r.denominator().to_string();
    let preamble = "3384585496849525154";
    let penultimate = "664929355687517845";
    let mut want = String::from(preamble);
    want.push_str(&"9".repeat(2681));
    want.push_str(penultimate);
    want.push_str(&"0".repeat(7));
    ensure(s.len() == 2725, || format!("{} digits", s.len()))?;
    ensure(s == want, || {
        "denominator digits differ from the printed shape".into()
    })?;
    Ok("19 + 2681 nines + 18 + 7 zeroes = 2725 digits".into())
}

fn random_rational(rng: &mut StdRng) -> Rational {
    let d: u128 = rng.gen_range(2..u128::MAX);
    let n: u128 = rng.gen_range(0..d);
    Rational::new(BigUint::from(n), BigUint::from(d)).expect("nonzero denominator")
}

fn properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..RANDOM_RATIONALS {
        let r = random_rational(&mut rng);
        let list = cfe_extract(&r, None).map_err(|e| e.to_string())?;
        let back = convergent_from_coefficients(&list);
        ensure(back == r, || format!("round trip failed for {r:?}"))?;
        for k in 1..=list.len() {
            let c = convergent_from_coefficients(&list.prefix(k).map_err(|e| e.to_string())?);
            ensure(
                c.numerator().gcd(c.denominator()) == BigUint::from(1u32),
                || format!("convergent {k} of {r:?} not in lowest terms"),
            )?;
        }
    }

    for _ in 0..POSITION_ROUND_TRIPS {
        let n: u64 = rng.gen_range(1..10_000_000_000_000);
        let p = position_of_integer(n).map_err(|e| e.to_string())?;
        let width = n.ilog10() as u64 + 1;
        let ord = rng.gen_range(0..width);
        let loc = locate_position(Position(p.0 + ord)).map_err(|e| e.to_string())?;
        ensure(
            loc.integer == n && u64::from(loc.digit_ordinal) == ord + 1,
            || format!("position round trip for {n}"),
        )?;
    }

    let prefix = digits_up_to(Position(CONCATENATION_DIGITS), DigitBudget::default())
        .map_err(|e| e.to_string())?;
    let mut naive = String::from("0");
    let mut k = 1u64;
    while naive.len() as u64 <= CONCATENATION_DIGITS {
        naive.push_str(&k.to_string());
        k += 1;
    }
    naive.truncate(CONCATENATION_DIGITS as usize + 1);
    ensure(prefix.to_ascii() == naive, || {
        "prefix differs from concatenation".into()
    })?;

    for n in 4..=7 {
        let c = compute_hwm(h(n), DigitBudget::default()).map_err(|e| e.to_string())?;
        ensure(c.lowest_terms, || {
            format!("N={n} convergent not in lowest terms")
        })?;
        let exp = error_profile(h(n)).map_err(|e| e.to_string())?;
        let e = u64::try_from(exp.exponent().magnitude().clone()).map_err(|e| e.to_string())?;
        let coarse = digits_up_to(Position(e + 12 + GUARD_DIGITS), DigitBudget::default())
            .map_err(|e| e.to_string())?;
        let fine = digits_up_to(Position(e + 12 + 2 * GUARD_DIGITS), DigitBudget::default())
            .map_err(|e| e.to_string())?;
        let a =
            measure_error(&c.convergent, &coarse, 12, GUARD_DIGITS).map_err(|e| e.to_string())?;
        let b =
            measure_error(&c.convergent, &fine, 12, 2 * GUARD_DIGITS).map_err(|e| e.to_string())?;
        ensure(a == b, || {
            format!("N={n}: {a} vs {b} under more guard digits")
        })?;
    }
    Ok(format!(
        "{RANDOM_RATIONALS} rationals, {POSITION_ROUND_TRIPS} positions, {CONCATENATION_DIGITS} digits, guard stability N=4..7"
    ))
}

fn formula_only() -> Outcome {
    ensure(
        hwm_length(h(12)).map_err(|e| e.to_string())? == nat(7_311_111_092),
        || "HWM #12 length".into(),
    )?;
    ensure(
        ncd(h(11)).map_err(|e| e.to_string())? == nat(788_888_881),
        || "NCD(11)".into(),
    )?;
    ensure(
        error_profile(h(12)).map_err(|e| e.to_string())? == sci("9.00000001E-8888888890"),
        || "error(12)".into(),
    )?;
    ensure(
        denominator_sci(h(11))
            .map_err(|e| e.to_string())?
            .to_string()
            == "4.9999999000000005E+68888897",
        || "denominator(11)".into(),
    )?;
    let refused = verify_hwm(h(11), &VerifyOptions::default());
    ensure(
        matches!(refused, Err(c10_cfe::Error::BudgetExceeded { .. })),
        || "HWM #11 verification was not refused under the default digit budget".into(),
    )?;
    Ok("N>=11 values from formulas; verifying HWM #11 is refused by the digit budget".into())
}

fn main() -> ExitCode {
    let computed = match compute_all() {
        Ok(c) => Some(c),
        Err(e) => {
            println!("setup failed: {e}");
            None
        }
    };
    let needs = |f: fn(&Computed) -> Outcome| -> Outcome {
        match &computed {
            Some(c) => f(c),
            None => Err("convergents unavailable".into()),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 hwm summary N=4..8", needs(table1)),
        ("2 coefficient efficiency", needs(table2)),
        ("3 naive vs convergent", needs(efficiency)),
        ("4 hwm length chain", needs(length_chain)),
        ("5 second-generation children", needs(children)),
        ("6 child denominator shape", needs(shape)),
        ("7 property suites", properties()),
        ("8 formula-only levels", formula_only()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS [{name}] {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{name}] {reason}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
