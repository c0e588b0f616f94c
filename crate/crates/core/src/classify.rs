//! HWM generations over a coefficient-length sequence.
//!
//! 1st-generation HWMs are running maxima of the digit length. Between two
//! consecutive HWMs, coefficients longer than the interval threshold are
//! grouped into clusters by `log10(length)` and ranked by size; the cluster
//! holding the predicted 2nd-generation length is generation 2, the next
//! smaller cluster generation 3, and so on.
//!
//! A recursive "HWM of what remains" definition does not reproduce the
//! published table (a generation-4 entry of 63 digits follows one of 90), so
//! clustering is used instead.

use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::oracles::{child_length, hwm_parity_rule, Generation, HwmIndex, ParityCheck};
use crate::{Error, Result};

/// HWM number of the first digit-length record after index 0 in the C10
/// expansion (HWM #1..#3 are the one-digit value records 0, 8, 9).
pub const FIRST_LENGTH_RECORD_HWM: u32 = 4;

pub const DEFAULT_CLUSTER_GAP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenerationEntry {
    pub coefficient_index: usize,
    pub digit_length: u64,
    /// `None` when below the interval threshold (or before the first HWM).
    pub generation: Option<u32>,
}

/// A 1st-generation HWM with its number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HwmMark {
    pub number: u32,
    pub index: usize,
    pub length: u64,
}

/// Strict running maxima of `lengths` after index 0 (the integer part seeds
/// the running maximum but is not itself reported).
pub fn find_hwms(lengths: &[u64]) -> Vec<GenerationEntry> {
    let Some((&first, rest)) = lengths.split_first() else {
        return Vec::new();
    };
    let mut best = first;
    let mut out = Vec::new();
    for (i, &len) in rest.iter().enumerate() {
        if len > best {
            best = len;
            out.push(GenerationEntry {
                coefficient_index: i + 1,
                digit_length: len,
                generation: Some(1),
            });
        }
    }
    out
}

/// Numbers the running maxima, the first one being HWM #4.
pub fn number_hwms(entries: &[GenerationEntry]) -> Vec<HwmMark> {
    entries
        .iter()
        .filter(|e| e.generation == Some(1))
        .enumerate()
        .map(|(i, e)| HwmMark {
            number: FIRST_LENGTH_RECORD_HWM + i as u32,
            index: e.coefficient_index,
            length: e.digit_length,
        })
        .collect()
}

/// Minimum digit length (exclusive) for a coefficient to be classified,
/// keyed by the HWM that opens the interval. An interval uses the entry
/// with the largest key not above its HWM number, or the first entry when
/// every key is larger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanThresholds {
    entries: Vec<(u32, u64)>,
}

impl ScanThresholds {
    pub fn new(mut entries: Vec<(u32, u64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidThresholds("no entries".into()));
        }
        entries.sort_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidThresholds(format!(
                    "duplicate interval HWM #{}",
                    w[0].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidThresholds(format!(
                    "threshold decreases from {} to {} at HWM #{}",
                    w[0].1, w[1].1, w[1].0
                )));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.1 == 0) {
            return Err(Error::InvalidThresholds(format!(
                "threshold for HWM #{} must be positive",
                e.0
            )));
        }
        Ok(ScanThresholds { entries })
    }

    /// >50 digits from HWM #5 to #9, >300 to #10, >5000 to #11, >50000 to #12.
    pub fn published() -> Self {
        ScanThresholds {
            entries: vec![(5, 50), (9, 300), (10, 5000), (11, 50_000)],
        }
    }

    pub fn for_interval(&self, hwm: u32) -> u64 {
        self.entries
            .iter()
            .rev()
            .find(|e| e.0 <= hwm)
            .unwrap_or(&self.entries[0])
            .1
    }

    pub fn entries(&self) -> &[(u32, u64)] {
        &self.entries
    }

    /// One `hwm,min_length` pair per line; blank lines and `#` comments skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse {
                line: i + 1,
                reason: format!("expected `hwm,min_length`, got {line:?}"),
            };
            let (h, t) = line.split_once(',').ok_or_else(bad)?;
            let h = h.trim().trim_start_matches('#');
            entries.push((
                h.parse().map_err(|_| bad())?,
                t.trim().parse().map_err(|_| bad())?,
            ));
        }
        ScanThresholds::new(entries)
    }
}

impl Default for ScanThresholds {
    fn default() -> Self {
        Self::published()
    }
}

impl fmt::Display for ScanThresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (h, t) in &self.entries {
            writeln!(f, "{h},{t}")?;
        }
        Ok(())
    }
}

/// Half-open coefficient range after one HWM and up to the next (or to the
/// end of the data for the last HWM).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    hwm: u32,
    start: usize,
    end: usize,
}

fn intervals(marks: &[HwmMark], len: usize) -> Vec<Interval> {
    marks
        .iter()
        .enumerate()
        .map(|(i, m)| Interval {
            hwm: m.number,
            start: m.index + 1,
            end: marks.get(i + 1).map_or(len, |next| next.index),
        })
        .collect()
}

/// Predicted 2nd-generation length for the interval opened by HWM #h
/// (the child of HWM #(h-1)), when defined.
fn predicted_child(hwm: u32) -> Option<u64> {
    let n = HwmIndex::new(hwm.checked_sub(1)?).ok()?;
    child_length(n).ok()?.to_u64()
}

/// Groups indices into clusters of nearby `log10(length)`, largest first.
fn clusters(lengths: &[u64], indices: &[usize], gap: f64) -> Vec<Vec<usize>> {
    let mut sorted: Vec<usize> = indices.to_vec();
    sorted.sort_by_key(|&i| lengths[i]);
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut prev_log = f64::NEG_INFINITY;
    for i in sorted {
        let log = (lengths[i] as f64).log10();
        if out.is_empty() || log - prev_log > gap {
            out.push(Vec::new());
        }
        out.last_mut().expect("pushed").push(i);
        prev_log = log;
    }
    out.reverse();
    out
}

pub fn classify(lengths: &[u64], thresholds: &ScanThresholds) -> Result<Vec<GenerationEntry>> {
    classify_with_gap(lengths, thresholds, DEFAULT_CLUSTER_GAP)
}

/// Labels every coefficient; output order is input index order.
pub fn classify_with_gap(
    lengths: &[u64],
    thresholds: &ScanThresholds,
    gap: f64,
) -> Result<Vec<GenerationEntry>> {
    let mut out: Vec<GenerationEntry> = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| GenerationEntry {
            coefficient_index: i,
            digit_length: l,
            generation: None,
        })
        .collect();
    let hwms = find_hwms(lengths);
    for e in &hwms {
        out[e.coefficient_index].generation = Some(1);
    }
    let marks = number_hwms(&hwms);
    for iv in intervals(&marks, lengths.len()) {
        let threshold = thresholds.for_interval(iv.hwm);
        let qualifying: Vec<usize> = (iv.start..iv.end)
            .filter(|&i| lengths[i] > threshold)
            .collect();
        if qualifying.is_empty() {
            continue;
        }
        let groups = clusters(lengths, &qualifying, gap);
        if let Some(predicted) = predicted_child(iv.hwm) {
            let anchor = groups
                .iter()
                .position(|g| g.iter().any(|&i| lengths[i] == predicted));
            if anchor != Some(0) {
                return Err(Error::AnchorFailure {
                    hwm: iv.hwm,
                    predicted,
                });
            }
        }
        for (rank, group) in groups.iter().enumerate() {
            for &i in group {
                out[i].generation = Some(2 + rank as u32);
            }
        }
    }
    Ok(out)
}

/// Outcome of the one-child-per-interval and odd-index checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChildReport {
    /// Every generation-2 index, ascending.
    pub positions: Vec<usize>,
    /// `(hwm, count)` of generation-2 entries in each checked interval.
    pub per_interval: Vec<(u32, usize)>,
    pub violations: Vec<String>,
}

impl ChildReport {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Generation-2 positions, checking exactly one per interval opened by
/// HWM #6 or later and that each sits at an odd index.
pub fn child_positions(entries: &[GenerationEntry]) -> ChildReport {
    let hwms: Vec<GenerationEntry> = entries
        .iter()
        .copied()
        .filter(|e| e.generation == Some(1))
        .collect();
    let marks = number_hwms(&hwms);
    let len = entries.last().map_or(0, |e| e.coefficient_index + 1);
    let positions: Vec<usize> = entries
        .iter()
        .filter(|e| e.generation == Some(2))
        .map(|e| e.coefficient_index)
        .collect();
    let mut violations = Vec::new();
    let mut per_interval = Vec::new();
    for iv in intervals(&marks, len) {
        if iv.hwm < 6 {
            continue;
        }
        let inside: Vec<usize> = positions
            .iter()
            .copied()
            .filter(|&i| i >= iv.start && i < iv.end)
            .collect();
        per_interval.push((iv.hwm, inside.len()));
        if inside.len() != 1 {
            violations.push(format!(
                "{} generation-2 entries after HWM #{} (expected 1)",
                inside.len(),
                iv.hwm
            ));
        }
    }
    for &i in &positions {
        if hwm_parity_rule(i as u64, Generation::Child) == ParityCheck::Violation {
            violations.push(format!("generation-2 index {i} is even"));
        }
    }
    ChildReport {
        positions,
        per_interval,
        violations,
    }
}
