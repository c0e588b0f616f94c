//! Rendering of predictions and check results as text, CSV and JSON.

use std::fmt::Write;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use c10_cfe::classify::{ChildReport, GenerationEntry};
use c10_cfe::oracles::{
    c10_digits_required, child_denominator_digits, child_denominator_shape, child_error_profile,
    child_length, denominator_sci, error_profile, failing_integer, failure_tail_pattern,
    hwm_length, ncd, DenominatorShape, HwmIndex,
};
use c10_cfe::sci::{SciDecimal, Sign};
use c10_cfe::verify::{ChainObservation, ChildProfile, ConvergentProfile, Mismatch, Status};
use c10_cfe::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Reference growth per HWM level, for comparison in `bench`.
const EXPECTED_MEMORY_RATIO: f64 = 12.0;
const EXPECTED_TIME_RATIO: f64 = 24.0;

/// JSON number when it fits in a u64, string otherwise.
fn number(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn mantissa_text(x: &SciDecimal) -> String {
    let (lead, rest) = x.mantissa().split_at(1);
    let rest = if rest.is_empty() { "0" } else { rest };
    let sign = if x.sign() == Sign::Minus { "-" } else { "" };
    format!("{sign}{lead}.{rest}")
}

fn exponent_value(x: &SciDecimal) -> Value {
    match i64::try_from(x.exponent()) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.exponent().to_string()),
    }
}

#[derive(Debug, Serialize)]
pub struct Prediction {
    pub schema_version: u32,
    pub hwm: u32,
    pub ncd: Value,
    pub error: String,
    pub error_mantissa: String,
    pub error_exponent: Value,
    pub denominator_sci: String,
    pub hwm_length: Value,
    pub failing_integer: Value,
    pub fails_as: Value,
    pub failure_pattern: String,
    pub c10_digits_required: Value,
    pub child_length: Option<Value>,
    pub child_error: Option<String>,
    pub child_error_mantissa: Option<String>,
    pub child_error_exponent: Option<Value>,
    pub child_shape: Option<DenominatorShape>,
    pub child_denominator_digits: Option<Value>,
}

pub fn prediction(n: HwmIndex, child: bool) -> Result<Prediction> {
    let error = error_profile(n)?;
    let denominator = if n.get() == 4 {
        "8.1E+1".to_string()
    } else {
        denominator_sci(n)?.to_string()
    };
    let (fails, fails_as) = failing_integer(n)?;
    let mut p = Prediction {
        schema_version: SCHEMA_VERSION,
        hwm: n.get(),
        ncd: number(&ncd(n)?),
        error: error.to_string(),
        error_mantissa: mantissa_text(&error),
        error_exponent: exponent_value(&error),
        denominator_sci: denominator,
        hwm_length: number(&hwm_length(n)?),
        failing_integer: number(&fails),
        fails_as: number(&fails_as),
        failure_pattern: failure_tail_pattern(n)?,
        c10_digits_required: number(&c10_digits_required(n)?),
        child_length: None,
        child_error: None,
        child_error_mantissa: None,
        child_error_exponent: None,
        child_shape: None,
        child_denominator_digits: None,
    };
    if child {
        let previous = HwmIndex::new(n.get() - 1)?;
        let e = child_error_profile(n)?;
        p.child_length = Some(number(&child_length(previous)?));
        p.child_error = Some(e.to_string());
        p.child_error_mantissa = Some(mantissa_text(&e));
        p.child_error_exponent = Some(exponent_value(&e));
        p.child_shape = Some(child_denominator_shape(n)?);
        p.child_denominator_digits = Some(number(&child_denominator_digits(n)?));
    }
    Ok(p)
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn prediction_rows(p: &Prediction) -> Vec<(&'static str, String)> {
    let mut rows = vec![
        ("hwm", p.hwm.to_string()),
        ("ncd", plain(&p.ncd)),
        ("error", p.error.clone()),
        ("denominator_sci", p.denominator_sci.clone()),
        ("hwm_length", plain(&p.hwm_length)),
        ("failing_integer", plain(&p.failing_integer)),
        ("fails_as", plain(&p.fails_as)),
        ("failure_pattern", p.failure_pattern.clone()),
        ("c10_digits_required", plain(&p.c10_digits_required)),
    ];
    if let Some(v) = &p.child_length {
        rows.push(("child_length", plain(v)));
    }
    if let Some(e) = &p.child_error {
        rows.push(("child_error", e.clone()));
    }
    if let Some(s) = &p.child_shape {
        rows.push(("child_preamble_digits", s.preamble.len().to_string()));
        rows.push(("child_nines", s.nines_count.to_string()));
        rows.push(("child_penultimate_digits", s.penultimate.len().to_string()));
        rows.push(("child_zeroes", s.zeroes_count.to_string()));
    }
    if let Some(v) = &p.child_denominator_digits {
        rows.push(("child_denominator_digits", plain(v)));
    }
    rows
}

pub fn prediction_text(p: &Prediction) -> String {
    let rows = prediction_rows(p);
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

pub fn prediction_csv(p: &Prediction) -> String {
    let mut out = String::from("field,value\n");
    for (k, v) in prediction_rows(p) {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Confirmed => "confirmed",
        Status::Violation => "VIOLATION",
    }
}

const PREDICTED: (&str, &str) = ("predicted", "observed");

fn mismatch_lines(out: &mut String, heading: &str, labels: (&str, &str), list: &[Mismatch]) {
    if list.is_empty() {
        return;
    }
    let _ = writeln!(out, "{heading}:");
    for m in list {
        let (expected, seen) = labels;
        let _ = writeln!(
            out,
            "  {}: {expected} {}, {seen} {}",
            m.field, m.predicted, m.observed
        );
    }
}

pub fn profile_text(p: &ConvergentProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "convergent before HWM #{}: {}",
        p.hwm,
        status_word(p.status)
    );
    let _ = writeln!(out, "  hwm index            {}", p.coefficient_count);
    let _ = writeln!(
        out,
        "  denominator          {} ({} digits)",
        p.denominator_observed, p.denominator_digits
    );
    let _ = writeln!(out, "  numerator digits     {}", p.numerator_digits);
    let _ = writeln!(
        out,
        "  coefficient digits   {} from {} C10 digits",
        p.total_coefficient_digits, p.c10_digits_used
    );
    if p.degenerate_split {
        let _ = writeln!(out, "  final term split to end on an odd index");
    }
    if let Some(prev) = &p.previous_hwm {
        let label = format!("HWM #{} length", prev.hwm);
        let _ = writeln!(
            out,
            "  {label:<20} {} at index {}",
            prev.observed_length, prev.index
        );
    }
    let _ = writeln!(
        out,
        "  fails at             {} (as {}), predicted NCD {}",
        p.failing_integer_predicted, p.fails_as_predicted, p.predicted_ncd
    );
    match (&p.measured, &p.local_failure) {
        (Some(m), _) => {
            let _ = writeln!(
                out,
                "  measured NCD         {} (integer {}, digit {})",
                m.ncd, m.failure.location.integer, m.failure.location.digit_ordinal
            );
            let _ = writeln!(
                out,
                "  error                {} (predicted {})",
                m.error.rounded(p.error_predicted.mantissa().len()),
                p.error_predicted
            );
        }
        (None, Some(l)) => {
            let _ = writeln!(
                out,
                "  digits at NCD        {} (C10 {})",
                l.failure.convergent_digits, l.failure.c10_digits
            );
            let _ = writeln!(out, "  error                not measured (pass --error)");
        }
        (None, None) => {}
    }
    mismatch_lines(&mut out, "mismatches", PREDICTED, &p.mismatches);
    mismatch_lines(
        &mut out,
        "differs from published figures",
        ("published", "computed"),
        &p.published_discrepancies,
    );
    out
}

pub fn chain_text(c: &ChainObservation) -> String {
    let o = &c.observation;
    format!(
        "HWM #{} itself: {} digits at index {} (predicted {}) {}\n",
        o.hwm,
        o.observed_length,
        o.index,
        o.predicted_length,
        if c.confirmed() {
            "confirmed"
        } else {
            "VIOLATION"
        }
    )
}

pub fn classification_csv(entries: &[GenerationEntry]) -> String {
    let mut out = String::from("index,length,generation\n");
    for e in entries {
        let g = e.generation.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{g}", e.coefficient_index, e.digit_length);
    }
    out
}

pub fn classification_text(entries: &[GenerationEntry], children: &ChildReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>8} {:>12} {:>10}", "index", "length", "generation");
    for e in entries {
        if let Some(g) = e.generation {
            let _ = writeln!(
                out,
                "{:>8} {:>12} {:>10}",
                e.coefficient_index, e.digit_length, g
            );
        }
    }
    for (hwm, count) in &children.per_interval {
        let _ = writeln!(
            out,
            "after HWM #{hwm}: {count} generation-2 entr{}",
            if *count == 1 { "y" } else { "ies" }
        );
    }
    for v in &children.violations {
        let _ = writeln!(out, "VIOLATION: {v}");
    }
    out
}

fn shape_line(s: &DenominatorShape) -> String {
    format!(
        "{} + {} nines + {} + {} zeroes",
        s.preamble, s.nines_count, s.penultimate, s.zeroes_count
    )
}

pub fn child_text(p: &ChildProfile) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "convergent before coefficient {} (after HWM #{}): {}",
        p.coefficient_index,
        p.after_hwm,
        status_word(p.status)
    );
    if let Some(len) = p.coefficient_length {
        let _ = writeln!(
            out,
            "  coefficient length   {len} (predicted {})",
            p.predicted_length
        );
    }
    let _ = writeln!(
        out,
        "  first wrong digit    position {} (integer {}, digit {}; written as {})",
        p.ncd, p.failure.location.integer, p.failure.location.digit_ordinal, p.failure.fails_as
    );
    let _ = writeln!(
        out,
        "  error                {} (predicted {})",
        p.error_observed.rounded(p.error_predicted.mantissa().len()),
        p.error_predicted
    );
    let _ = writeln!(out, "  denominator digits   {}", p.denominator_digits);
    let _ = writeln!(
        out,
        "  shape                {}",
        shape_line(&p.shape_observed)
    );
    let _ = writeln!(
        out,
        "  predicted shape      {}",
        shape_line(&p.shape_predicted)
    );
    mismatch_lines(&mut out, "mismatches", PREDICTED, &p.mismatches);
    out
}

pub struct BenchRow {
    pub hwm: u32,
    pub seconds: f64,
    pub c10_digits: u64,
    pub numerator_digits: u64,
    pub coefficients: usize,
}

fn ratio(a: f64, b: f64) -> String {
    if b > 0.0 {
        format!("{:.1}x", a / b)
    } else {
        "-".into()
    }
}

pub fn bench_text(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>12} {:>12} {:>12} {:>8} {:>10} {:>10}",
        "hwm", "seconds", "c10 digits", "numerator", "terms", "time", "digits"
    );
    let mut prev: Option<&BenchRow> = None;
    for r in rows {
        let (t, d) = match prev {
            Some(p) => (
                ratio(r.seconds, p.seconds),
                ratio(r.c10_digits as f64, p.c10_digits as f64),
            ),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{:>4} {:>12.4} {:>12} {:>12} {:>8} {:>10} {:>10}",
            r.hwm, r.seconds, r.c10_digits, r.numerator_digits, r.coefficients, t, d
        );
        prev = Some(r);
    }
    let _ = writeln!(
        out,
        "reference growth per level: about {EXPECTED_TIME_RATIO}x time, {EXPECTED_MEMORY_RATIO}x memory"
    );
    out
}
