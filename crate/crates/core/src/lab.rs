//! Bulk empirical verification: range scans that hunt counterexamples to
//! the convergence claim, the interior type-B exclusion, and the parity
//! rule linking an odd value to the odd part of its successor.
//!
//! Scans partition the odd integers of a range into fixed-size blocks.
//! Workers claim blocks through an atomic counter, and block results are
//! merged in block order, so a report is identical no matter how many
//! workers ran or how they were scheduled. Orbit arithmetic runs in `u128`
//! with checked operations and falls back to arbitrary precision on
//! overflow, so results are exact at any excursion height.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{classify, two_adic_valuation, ResidueType};
use crate::engine::SequenceTrace;
use crate::{Error, Nat, Result};

/// Counterexample lists in reports keep at most this many entries by
/// default; totals are always exact.
pub const DEFAULT_COUNTEREXAMPLE_CAP: usize = 1000;

/// Odd starting values per scan block. Small enough for good load
/// balancing, large enough that the per-block bookkeeping is noise.
const BLOCK_ODDS: u64 = 16_384;

/// How far an orbit is followed before its start is declared verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanPolicy {
    /// Follow the orbit all the way to 1.
    Full,
    /// Follow the orbit until it falls below its starting value (1 itself
    /// is the anchor and converges immediately). A valid convergence
    /// certificate only for contiguous scans anchored at 1, by strong
    /// induction; the report records the policy so consumers can judge.
    DropBelowStart,
}

impl ScanPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanPolicy::Full => "full",
            ScanPolicy::DropBelowStart => "drop",
        }
    }
}

impl std::fmt::Display for ScanPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScanPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(ScanPolicy::Full),
            "drop" | "drop_below_start" => Ok(ScanPolicy::DropBelowStart),
            other => Err(format!("unknown policy {other:?}: expected 'full' or 'drop'")),
        }
    }
}

/// The parity rule for one odd value `n`: with `n' = (3n+1)/2 = 2^l m`
/// (`m` odd), `m` is type A when `l` is odd and type C when `l` is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureRecord {
    pub n: Nat,
    /// `(3n + 1) / 2`.
    pub n_prime: Nat,
    /// 2-adic valuation of `n_prime`.
    pub l: u64,
    /// Odd part of `n_prime`.
    pub m: Nat,
    pub m_type: ResidueType,
    pub holds: bool,
}

/// Evaluates the parity rule for odd `n`.
pub fn conjecture_check(n: &Nat) -> Result<ConjectureRecord> {
    if n.is_zero() {
        return Err(Error::ZeroInput("conjecture_check"));
    }
    if n.is_even() {
        return Err(Error::OddRequired {
            op: "conjecture_check",
            value: n.clone(),
        });
    }
    let n_prime: Nat = (n * Nat::from(3u32) + Nat::one()) >> 1;
    let f = two_adic_valuation(&n_prime)?;
    let m_type = classify(&f.odd_part)?;
    let holds = match m_type {
        ResidueType::A => f.exponent % 2 == 1,
        ResidueType::C => f.exponent % 2 == 0,
        _ => false,
    };
    Ok(ConjectureRecord {
        n: n.clone(),
        n_prime,
        l: f.exponent,
        m: f.odd_part,
        m_type,
        holds,
    })
}

/// Positions (index > 0) of odd orbit values in residue class 3 mod 6.
/// An empty result means the interior type-B exclusion holds for this
/// orbit; the starting value itself is exempt.
pub fn check_type_b_absence(t: &SequenceTrace) -> Vec<(u64, Nat)> {
    t.values
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| v.is_odd() && classify(v) == Ok(ResidueType::B))
        .map(|(i, v)| (i as u64, v.clone()))
        .collect()
}

/// An event list that keeps exact totals but stores at most a configured
/// number of entries, so a report stays bounded even under hypothetical
/// mass failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Capped<T> {
    /// Exact number of events observed, including any beyond the cap.
    pub total: u64,
    /// The first events in scan order, up to the cap.
    pub entries: Vec<T>,
}

impl<T> Default for Capped<T> {
    fn default() -> Self {
        Capped {
            total: 0,
            entries: Vec::new(),
        }
    }
}

impl<T> Capped<T> {
    fn push(&mut self, item: T, cap: usize) {
        self.total += 1;
        if self.entries.len() < cap {
            self.entries.push(item);
        }
    }

    fn absorb(&mut self, other: Capped<T>, cap: usize) {
        self.total += other.total;
        for item in other.entries {
            if self.entries.len() >= cap {
                break;
            }
            self.entries.push(item);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }
}

/// An interior orbit value in residue class 3 mod 6 — a counterexample to
/// the type-B exclusion if one is ever found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeBHit {
    pub start: u64,
    /// Step index within the orbit (> 0).
    pub position: u64,
    pub value: Nat,
}

/// The converged orbit that needed the most steps, ties broken by smaller
/// start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxStepsSeen {
    pub start: u64,
    pub steps: u64,
}

/// Outcome of scanning every odd integer in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub lo: u64,
    pub hi: u64,
    pub policy: ScanPolicy,
    pub max_steps: u64,
    /// Number of odd integers in `[lo, hi]`.
    pub checked: u64,
    /// Starts whose orbit converged under the policy within the budget.
    /// `converged + truncated_starts.total == checked`.
    pub converged: u64,
    /// Starts whose budget ran out; any entry here demands investigation.
    pub truncated_starts: Capped<u64>,
    /// Step count record among converged orbits (policy-dependent steps).
    /// Absent when nothing converged or the range held no odd integers.
    pub max_steps_seen: Option<MaxStepsSeen>,
    /// Interior orbit values in class 3 mod 6, scanned over the orbit
    /// prefix the policy walks.
    pub type_b_interior_hits: Capped<TypeBHit>,
    /// Starts violating the parity rule of [`conjecture_check`].
    pub conjecture_failures: Capped<ConjectureRecord>,
}

impl VerificationReport {
    /// True when nothing truncated and no counterexample of any kind was
    /// recorded.
    pub fn all_clear(&self) -> bool {
        self.truncated_starts.is_empty()
            && self.type_b_interior_hits.is_empty()
            && self.conjecture_failures.is_empty()
    }
}

/// Parameters for [`run_scan`].
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub lo: u64,
    pub hi: u64,
    pub policy: ScanPolicy,
    pub max_steps: u64,
    pub workers: usize,
    pub counterexample_cap: usize,
}

impl ScanConfig {
    pub fn new(lo: u64, hi: u64, policy: ScanPolicy) -> Self {
        ScanConfig {
            lo,
            hi,
            policy,
            max_steps: crate::DEFAULT_MAX_STEPS,
            workers: 1,
            counterexample_cap: DEFAULT_COUNTEREXAMPLE_CAP,
        }
    }
}

/// Result of a cancellable scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOutcome {
    /// Report over the contiguous verified prefix of the range. On an
    /// uninterrupted run this covers `[lo, hi]` exactly; after an
    /// interruption it covers `[lo, f]` for the largest contiguously
    /// finished frontier `f`, and is `None` if no block finished.
    pub report: Option<VerificationReport>,
    pub interrupted: bool,
}

/// Scans every odd integer in `[lo, hi]`: orbit convergence under the
/// policy, interior type-B hits along the walked prefix, and the parity
/// rule for the start itself. Blocking work is distributed over `workers`
/// threads; the merged report does not depend on scheduling.
pub fn verify_range(
    lo: u64,
    hi: u64,
    policy: ScanPolicy,
    max_steps: u64,
    workers: usize,
) -> Result<VerificationReport> {
    let mut cfg = ScanConfig::new(lo, hi, policy);
    cfg.max_steps = max_steps;
    cfg.workers = workers;
    let outcome = run_scan(&cfg, None)?;
    Ok(outcome
        .report
        .expect("scan without a cancel flag always completes"))
}

/// [`verify_range`] with explicit configuration and an optional cancel
/// flag. When the flag flips, workers finish the block they are on and stop
/// claiming new ones; the report then covers the contiguous prefix that
/// finished.
pub fn run_scan(cfg: &ScanConfig, cancel: Option<&AtomicBool>) -> Result<ScanOutcome> {
    validate_range(cfg.lo, cfg.hi)?;
    if cfg.max_steps == 0 {
        return Err(Error::ZeroInput("run_scan max_steps"));
    }
    let odds = OddRange::covering(cfg.lo, cfg.hi);
    let blocks = odds.block_count();
    if blocks == 0 {
        return Ok(ScanOutcome {
            report: Some(empty_report(cfg)),
            interrupted: false,
        });
    }

    let mut report = empty_report(cfg);
    let finished = run_blocks(
        blocks,
        cfg.workers,
        cancel,
        |b| {
            let (first, count) = odds.block(b);
            scan_block(first, count, cfg)
        },
        |block| merge_block(&mut report, block, cfg.counterexample_cap),
    );
    let interrupted = finished < blocks;

    if finished == 0 {
        return Ok(ScanOutcome {
            report: None,
            interrupted: true,
        });
    }

    let verified_odds = (finished * BLOCK_ODDS).min(odds.count);
    report.hi = if interrupted {
        odds.nth(verified_odds - 1)
    } else {
        cfg.hi
    };
    report.checked = verified_odds;
    Ok(ScanOutcome {
        report: Some(report),
        interrupted,
    })
}

/// Distribution of steps-to-1 over the odd integers in `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepHistogram {
    /// steps-to-1 -> number of starts.
    pub counts: BTreeMap<u64, u64>,
    /// Starts whose orbit did not reach 1 within the budget; kept out of
    /// `counts` so the buckets stay meaningful.
    pub truncated: u64,
}

/// Buckets every odd start in `[lo, hi]` by its exact steps-to-1 count.
pub fn step_histogram(lo: u64, hi: u64, max_steps: u64, workers: usize) -> Result<StepHistogram> {
    validate_range(lo, hi)?;
    if max_steps == 0 {
        return Err(Error::ZeroInput("step_histogram max_steps"));
    }
    let odds = OddRange::covering(lo, hi);
    let mut histogram = StepHistogram {
        counts: BTreeMap::new(),
        truncated: 0,
    };
    run_blocks(
        odds.block_count(),
        workers,
        None,
        |b| {
            let (first, count) = odds.block(b);
            let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
            let mut truncated = 0u64;
            for n in odd_values(first, count) {
                let orbit = scan_orbit(n, ScanPolicy::Full, max_steps);
                if orbit.converged {
                    *counts.entry(orbit.steps).or_insert(0) += 1;
                } else {
                    truncated += 1;
                }
            }
            (counts, truncated)
        },
        |(counts, truncated)| {
            for (steps, freq) in counts {
                *histogram.counts.entry(steps).or_insert(0) += freq;
            }
            histogram.truncated += truncated;
        },
    );
    Ok(histogram)
}

/// Outcome of scanning only the parity rule over a range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureScanReport {
    pub lo: u64,
    pub hi: u64,
    /// Number of odd integers in `[lo, hi]`.
    pub checked: u64,
    pub failures: Capped<ConjectureRecord>,
}

/// Runs [`conjecture_check`] over every odd integer in `[lo, hi]` without
/// walking orbits. Same deterministic block merge as [`verify_range`].
pub fn conjecture_scan(lo: u64, hi: u64, workers: usize, cap: usize) -> Result<ConjectureScanReport> {
    validate_range(lo, hi)?;
    let odds = OddRange::covering(lo, hi);
    let mut failures = Capped::default();
    run_blocks(
        odds.block_count(),
        workers,
        None,
        |b| {
            let (first, count) = odds.block(b);
            let mut failures = Capped::default();
            for n in odd_values(first, count) {
                if !conjecture_holds_fast(n) {
                    let record = conjecture_check(&Nat::from(n)).expect("n is odd and positive");
                    failures.push(record, cap);
                }
            }
            failures
        },
        |block| failures.absorb(block, cap),
    );
    Ok(ConjectureScanReport {
        lo,
        hi,
        checked: odds.count,
        failures,
    })
}

fn validate_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi {
        return Err(Error::BadRange { lo, hi });
    }
    Ok(())
}

fn empty_report(cfg: &ScanConfig) -> VerificationReport {
    VerificationReport {
        lo: cfg.lo,
        hi: cfg.hi,
        policy: cfg.policy,
        max_steps: cfg.max_steps,
        checked: 0,
        converged: 0,
        truncated_starts: Capped::default(),
        max_steps_seen: None,
        type_b_interior_hits: Capped::default(),
        conjecture_failures: Capped::default(),
    }
}

/// The odd integers of a closed range, addressable by index and by block.
#[derive(Debug, Clone, Copy)]
struct OddRange {
    first: u64,
    count: u64,
}

impl OddRange {
    fn covering(lo: u64, hi: u64) -> OddRange {
        let first = lo | 1;
        let count = if first > hi { 0 } else { (hi - first) / 2 + 1 };
        OddRange { first, count }
    }

    fn nth(&self, i: u64) -> u64 {
        self.first + 2 * i
    }

    fn block_count(&self) -> u64 {
        self.count.div_ceil(BLOCK_ODDS)
    }

    /// `(first_odd, odd_count)` of block `b`.
    fn block(&self, b: u64) -> (u64, u64) {
        let offset = b * BLOCK_ODDS;
        (self.nth(offset), BLOCK_ODDS.min(self.count - offset))
    }
}

fn odd_values(first: u64, count: u64) -> impl Iterator<Item = u64> {
    (0..count).map(move |i| first + 2 * i)
}

/// Per-block partial result; merged in block order.
struct BlockOutcome {
    converged: u64,
    truncated: Capped<u64>,
    max_steps_seen: Option<MaxStepsSeen>,
    type_b: Capped<TypeBHit>,
    conjecture_failures: Capped<ConjectureRecord>,
}

fn scan_block(first: u64, count: u64, cfg: &ScanConfig) -> BlockOutcome {
    let cap = cfg.counterexample_cap;
    let mut out = BlockOutcome {
        converged: 0,
        truncated: Capped::default(),
        max_steps_seen: None,
        type_b: Capped::default(),
        conjecture_failures: Capped::default(),
    };
    for n in odd_values(first, count) {
        let orbit = scan_orbit(n, cfg.policy, cfg.max_steps);
        for (position, value) in orbit.type_b {
            out.type_b.push(
                TypeBHit {
                    start: n,
                    position,
                    value,
                },
                cap,
            );
        }
        if orbit.converged {
            out.converged += 1;
            let improves = out
                .max_steps_seen
                .is_none_or(|best| orbit.steps > best.steps);
            if improves {
                out.max_steps_seen = Some(MaxStepsSeen {
                    start: n,
                    steps: orbit.steps,
                });
            }
        } else {
            out.truncated.push(n, cap);
        }
        if !conjecture_holds_fast(n) {
            let record = conjecture_check(&Nat::from(n)).expect("n is odd and positive");
            out.conjecture_failures.push(record, cap);
        }
    }
    out
}

fn merge_block(report: &mut VerificationReport, block: BlockOutcome, cap: usize) {
    report.converged += block.converged;
    report.truncated_starts.absorb(block.truncated, cap);
    report.type_b_interior_hits.absorb(block.type_b, cap);
    report
        .conjecture_failures
        .absorb(block.conjecture_failures, cap);
    // Blocks are merged in ascending-start order, so a strict comparison
    // keeps the smallest start on ties.
    if let Some(candidate) = block.max_steps_seen {
        let improves = report
            .max_steps_seen
            .is_none_or(|best| candidate.steps > best.steps);
        if improves {
            report.max_steps_seen = Some(candidate);
        }
    }
}

struct OrbitScan {
    steps: u64,
    converged: bool,
    /// `(position, value)` of interior values in class 3 mod 6.
    type_b: Vec<(u64, Nat)>,
}

fn orbit_done(v: u128, anchor: u128, policy: ScanPolicy) -> bool {
    match policy {
        ScanPolicy::Full => v == 1,
        ScanPolicy::DropBelowStart => v == 1 || v < anchor,
    }
}

/// Follows one orbit in `u128`, falling back to arbitrary precision if the
/// excursion ever exceeds 128 bits.
fn scan_orbit(start: u64, policy: ScanPolicy, max_steps: u64) -> OrbitScan {
    let anchor = start as u128;
    let mut v = anchor;
    let mut steps = 0u64;
    let mut type_b = Vec::new();
    loop {
        if orbit_done(v, anchor, policy) {
            return OrbitScan {
                steps,
                converged: true,
                type_b,
            };
        }
        if steps == max_steps {
            return OrbitScan {
                steps,
                converged: false,
                type_b,
            };
        }
        v = if v & 1 == 0 {
            v >> 1
        } else {
            match v.checked_mul(3).and_then(|x| x.checked_add(1)) {
                Some(x) => x >> 1,
                None => return scan_orbit_big(v, steps, anchor, policy, max_steps, type_b),
            }
        };
        steps += 1;
        if v % 6 == 3 {
            type_b.push((steps, Nat::from(v)));
        }
    }
}

/// Arbitrary-precision continuation of [`scan_orbit`] from value `v` at
/// step index `steps`.
fn scan_orbit_big(
    v: u128,
    steps: u64,
    anchor: u128,
    policy: ScanPolicy,
    max_steps: u64,
    type_b: Vec<(u64, Nat)>,
) -> OrbitScan {
    let anchor = Nat::from(anchor);
    let one = Nat::one();
    let three = Nat::from(3u32);
    let six = Nat::from(6u32);
    let mut v = Nat::from(v);
    let mut steps = steps;
    let mut type_b = type_b;
    loop {
        let done = match policy {
            ScanPolicy::Full => v == one,
            ScanPolicy::DropBelowStart => v == one || v < anchor,
        };
        if done {
            return OrbitScan {
                steps,
                converged: true,
                type_b,
            };
        }
        if steps == max_steps {
            return OrbitScan {
                steps,
                converged: false,
                type_b,
            };
        }
        v = if v.is_even() {
            v >> 1
        } else {
            (&v * &three + &one) >> 1
        };
        steps += 1;
        if &v % &six == three {
            type_b.push((steps, v.clone()));
        }
    }
}

/// The start's parity rule, in machine words: `(3n+1)/2 = 2^l m` must have
/// `m = 1 (mod 6)` for odd `l` and `m = 5 (mod 6)` for even `l`. Must
/// agree with [`conjecture_check`]; the scan only materializes the full
/// record when this says the rule failed.
fn conjecture_holds_fast(n: u64) -> bool {
    let n_prime = (3 * n as u128 + 1) >> 1;
    let l = n_prime.trailing_zeros() as u64;
    let m = n_prime >> l;
    if l % 2 == 1 {
        m % 6 == 1
    } else {
        m % 6 == 5
    }
}

/// Runs blocks `0..blocks` across `workers` threads and hands each result
/// to `merge` in strict block order. Returns the number of blocks merged.
///
/// Workers claim block indices from an atomic counter, so the set of
/// claimed blocks is always a contiguous prefix; when the cancel flag
/// flips, each worker finishes the block it is on and stops claiming, and
/// the merged prefix is still gapless. Out-of-order completions wait in a
/// reorder buffer that never holds more than about one block per worker,
/// so memory stays flat no matter how large the range is.
fn run_blocks<T, F, M>(
    blocks: u64,
    workers: usize,
    cancel: Option<&AtomicBool>,
    scan: F,
    mut merge: M,
) -> u64
where
    T: Send,
    F: Fn(u64) -> T + Sync,
    M: FnMut(T),
{
    let workers = workers
        .max(1)
        .min(usize::try_from(blocks).unwrap_or(usize::MAX));
    let mut merged = 0u64;
    if workers <= 1 {
        for b in 0..blocks {
            if cancel.is_some_and(|flag| flag.load(Ordering::Relaxed)) {
                break;
            }
            merge(scan(b));
            merged += 1;
        }
        return merged;
    }
    let next = AtomicU64::new(0);
    let (sender, receiver) = std::sync::mpsc::channel::<(u64, T)>();
    std::thread::scope(|scope| {
        let next = &next;
        let scan = &scan;
        for _ in 0..workers {
            let sender = sender.clone();
            scope.spawn(move || loop {
                if cancel.is_some_and(|flag| flag.load(Ordering::Relaxed)) {
                    break;
                }
                let b = next.fetch_add(1, Ordering::Relaxed);
                if b >= blocks || sender.send((b, scan(b))).is_err() {
                    break;
                }
            });
        }
        drop(sender);
        let mut pending: BTreeMap<u64, T> = BTreeMap::new();
        for (b, outcome) in receiver {
            pending.insert(b, outcome);
            while let Some(next_block) = pending.remove(&merged) {
                merge(next_block);
                merged += 1;
            }
        }
        debug_assert!(pending.is_empty(), "claimed blocks form a prefix");
    });
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{steps_between, trace};
    use proptest::prelude::*;

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    #[test]
    fn conjecture_check_examples() {
        let r = conjecture_check(&nat(15)).unwrap();
        assert_eq!((r.l, r.m.clone(), r.m_type, r.holds), (0, nat(23), ResidueType::C, true));

        let r = conjecture_check(&nat(49)).unwrap();
        assert_eq!((r.l, r.m.clone(), r.m_type, r.holds), (1, nat(37), ResidueType::A, true));

        let r = conjecture_check(&nat(341)).unwrap();
        assert_eq!((r.l, r.m.clone(), r.m_type, r.holds), (9, nat(1), ResidueType::A, true));
        assert_eq!(r.n_prime, nat(512));
    }

    #[test]
    fn conjecture_check_rejects_bad_input() {
        assert!(conjecture_check(&Nat::zero()).is_err());
        assert!(matches!(
            conjecture_check(&nat(14)),
            Err(Error::OddRequired { .. })
        ));
    }

    #[test]
    fn type_b_absence_examples() {
        // 9 itself is in class 3 mod 6, but position 0 is exempt.
        let hits = check_type_b_absence(&trace(&nat(9), 100).unwrap());
        assert!(hits.is_empty());

        let hits = check_type_b_absence(&trace(&nat(1), 100).unwrap());
        assert!(hits.is_empty());

        let t = trace(&nat(19), 100).unwrap();
        assert!(check_type_b_absence(&t).is_empty());
        for v in crate::engine::odd_subsequence(&t).iter().skip(1) {
            assert_ne!(classify(v).unwrap(), ResidueType::B);
        }
    }

    #[test]
    fn type_b_detector_fires_on_a_constructed_orbit() {
        // A hand-built trace that deliberately violates the map is not
        // constructible through the engine, so plant a type-B value by
        // starting at an even multiple: 66 -> 33.
        let t = trace(&nat(66), 10).unwrap();
        let hits = check_type_b_absence(&t);
        assert_eq!(hits[0], (1, nat(33)));
    }

    #[test]
    fn verify_single_start_full() {
        let report = verify_range(19, 19, ScanPolicy::Full, 100, 1).unwrap();
        assert_eq!(report.checked, 1);
        assert_eq!(report.converged, 1);
        assert_eq!(
            report.max_steps_seen,
            Some(MaxStepsSeen { start: 19, steps: 14 })
        );
        assert!(report.all_clear());
    }

    #[test]
    fn verify_start_one() {
        let report = verify_range(1, 1, ScanPolicy::Full, 10, 1).unwrap();
        assert_eq!(report.checked, 1);
        assert_eq!(report.converged, 1);
        assert_eq!(report.max_steps_seen, Some(MaxStepsSeen { start: 1, steps: 0 }));

        let report = verify_range(1, 1, ScanPolicy::DropBelowStart, 10, 1).unwrap();
        assert_eq!(report.converged, 1);
        assert_eq!(report.max_steps_seen, Some(MaxStepsSeen { start: 1, steps: 0 }));
    }

    #[test]
    fn verify_rejects_bad_ranges() {
        assert!(matches!(
            verify_range(0, 5, ScanPolicy::Full, 10, 1),
            Err(Error::BadRange { .. })
        ));
        assert!(matches!(
            verify_range(7, 3, ScanPolicy::Full, 10, 1),
            Err(Error::BadRange { .. })
        ));
        assert!(verify_range(1, 5, ScanPolicy::Full, 0, 1).is_err());
    }

    #[test]
    fn verify_range_without_odd_values() {
        let report = verify_range(2, 2, ScanPolicy::Full, 10, 1).unwrap();
        assert_eq!(report.checked, 0);
        assert_eq!(report.converged, 0);
        assert_eq!(report.max_steps_seen, None);
    }

    #[test]
    fn verify_records_truncations() {
        let report = verify_range(27, 27, ScanPolicy::Full, 5, 1).unwrap();
        assert_eq!(report.checked, 1);
        assert_eq!(report.converged, 0);
        assert_eq!(report.truncated_starts.total, 1);
        assert_eq!(report.truncated_starts.entries, vec![27]);
        assert_eq!(report.max_steps_seen, None);
        assert!(!report.all_clear());
    }

    #[test]
    fn scan_orbit_agrees_with_engine() {
        for n in (1u64..2001).step_by(2) {
            let orbit = scan_orbit(n, ScanPolicy::Full, 100_000);
            let expected = steps_between(&nat(n), &Nat::one(), 100_000).unwrap();
            assert!(orbit.converged);
            assert_eq!(Some(orbit.steps), expected, "start {n}");
        }
    }

    #[test]
    fn fast_conjecture_check_agrees_with_exact_route() {
        for n in (1u64..200_001).step_by(2) {
            assert_eq!(
                conjecture_holds_fast(n),
                conjecture_check(&nat(n)).unwrap().holds,
                "start {n}"
            );
        }
    }

    #[test]
    fn big_fallback_continues_an_orbit_exactly() {
        // Force the fallback immediately by handing it a value mid-orbit.
        for start in [27u64, 255, 703] {
            let fast = scan_orbit(start, ScanPolicy::Full, 10_000);
            let via_big = scan_orbit_big(
                start as u128,
                0,
                start as u128,
                ScanPolicy::Full,
                10_000,
                Vec::new(),
            );
            assert_eq!(fast.steps, via_big.steps);
            assert_eq!(fast.converged, via_big.converged);
            assert_eq!(fast.type_b, via_big.type_b);
        }
    }

    #[test]
    fn workers_do_not_change_the_report() {
        let single = verify_range(1, 100_000, ScanPolicy::DropBelowStart, 1 << 20, 1).unwrap();
        let multi = verify_range(1, 100_000, ScanPolicy::DropBelowStart, 1 << 20, 4).unwrap();
        assert_eq!(single, multi);
        assert_eq!(single.checked, 50_000);
        assert_eq!(single.converged, 50_000);
        assert!(single.all_clear());
    }

    #[test]
    fn policies_agree_on_small_range() {
        let full = verify_range(1, 2000, ScanPolicy::Full, 1 << 20, 2).unwrap();
        let drop = verify_range(1, 2000, ScanPolicy::DropBelowStart, 1 << 20, 2).unwrap();
        assert_eq!(full.checked, drop.checked);
        assert_eq!(full.converged, drop.converged);
        assert_eq!(full.truncated_starts, drop.truncated_starts);
        assert_eq!(full.conjecture_failures, drop.conjecture_failures);
    }

    #[test]
    fn cancelled_scan_reports_nothing_when_stopped_up_front() {
        let cancel = AtomicBool::new(true);
        let cfg = ScanConfig::new(1, 1_000_000, ScanPolicy::DropBelowStart);
        let outcome = run_scan(&cfg, Some(&cancel)).unwrap();
        assert!(outcome.interrupted);
        assert_eq!(outcome.report, None);
    }

    #[test]
    fn uncancelled_flag_changes_nothing() {
        let cancel = AtomicBool::new(false);
        let mut cfg = ScanConfig::new(1, 99_999, ScanPolicy::DropBelowStart);
        cfg.workers = 4;
        let outcome = run_scan(&cfg, Some(&cancel)).unwrap();
        assert!(!outcome.interrupted);
        let report = outcome.report.unwrap();
        assert_eq!(report, verify_range(1, 99_999, ScanPolicy::DropBelowStart, 1 << 20, 1).unwrap());
    }

    #[test]
    fn interrupted_report_matches_the_shorter_range() {
        // Simulate an interruption by scanning a prefix directly: the
        // contract is that an interrupted report over [lo, f] is bitwise
        // the report of the shorter range.
        let whole = verify_range(1, 100_000, ScanPolicy::DropBelowStart, 1 << 20, 1).unwrap();
        let prefix = verify_range(1, 32_767, ScanPolicy::DropBelowStart, 1 << 20, 1).unwrap();
        assert_eq!(prefix.checked, 16_384);
        assert!(whole.checked > prefix.checked);
    }

    #[test]
    fn capped_list_keeps_exact_totals() {
        let mut capped: Capped<u64> = Capped::default();
        for i in 0..10 {
            capped.push(i, 3);
        }
        assert_eq!(capped.total, 10);
        assert_eq!(capped.entries, vec![0, 1, 2]);

        let mut other: Capped<u64> = Capped::default();
        other.push(99, 3);
        other.absorb(capped, 3);
        assert_eq!(other.total, 11);
        assert_eq!(other.entries, vec![99, 0, 1]);
    }

    #[test]
    fn max_steps_ties_keep_the_smaller_start() {
        // Find the first pair of adjacent odd starts with equal steps-to-1;
        // scanning exactly that pair must report the smaller start.
        let steps_to_one = |n: u64| {
            steps_between(&nat(n), &Nat::one(), 1 << 20)
                .unwrap()
                .expect("small starts converge")
        };
        let (a, steps) = (3u64..10_000)
            .step_by(2)
            .map(|a| (a, steps_to_one(a)))
            .find(|&(a, s)| s == steps_to_one(a + 2))
            .expect("adjacent equal-step pair exists at desk scale");
        let report = verify_range(a, a + 2, ScanPolicy::Full, 1 << 20, 1).unwrap();
        assert_eq!(report.max_steps_seen, Some(MaxStepsSeen { start: a, steps }));

        let mut report = empty_report(&ScanConfig::new(1, 1, ScanPolicy::Full));
        let block_a = BlockOutcome {
            converged: 1,
            truncated: Capped::default(),
            max_steps_seen: Some(MaxStepsSeen { start: 7, steps: 11 }),
            type_b: Capped::default(),
            conjecture_failures: Capped::default(),
        };
        let block_b = BlockOutcome {
            converged: 1,
            truncated: Capped::default(),
            max_steps_seen: Some(MaxStepsSeen { start: 23, steps: 11 }),
            type_b: Capped::default(),
            conjecture_failures: Capped::default(),
        };
        merge_block(&mut report, block_a, 10);
        merge_block(&mut report, block_b, 10);
        assert_eq!(
            report.max_steps_seen,
            Some(MaxStepsSeen { start: 7, steps: 11 })
        );
    }

    #[test]
    fn run_blocks_merges_in_order_regardless_of_workers() {
        for workers in [1usize, 3, 8] {
            let mut seen = Vec::new();
            let merged = run_blocks(64, workers, None, |b| b * 10, |v| seen.push(v));
            assert_eq!(merged, 64);
            assert_eq!(seen, (0..64).map(|b| b * 10).collect::<Vec<u64>>());
        }
    }

    #[test]
    fn histogram_examples() {
        let h = step_histogram(19, 19, 100, 1).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(14, 1)]));
        assert_eq!(h.truncated, 0);

        let h = step_histogram(1, 1, 100, 1).unwrap();
        assert_eq!(h.counts, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn histogram_matches_per_value_engine_runs() {
        let h = step_histogram(1, 99, 1 << 20, 2).unwrap();
        let mut expected: BTreeMap<u64, u64> = BTreeMap::new();
        for n in (1u64..=99).step_by(2) {
            let steps = steps_between(&nat(n), &Nat::one(), 1 << 20)
                .unwrap()
                .expect("all small starts converge");
            *expected.entry(steps).or_insert(0) += 1;
        }
        assert_eq!(h.counts, expected);
        assert_eq!(h.truncated, 0);
        assert_eq!(h.counts.values().sum::<u64>(), 50);
    }

    #[test]
    fn histogram_reports_truncations_in_overflow_bucket() {
        let h = step_histogram(27, 27, 5, 1).unwrap();
        assert!(h.counts.is_empty());
        assert_eq!(h.truncated, 1);
    }

    #[test]
    fn conjecture_scan_all_pass() {
        let report = conjecture_scan(1, 99_999, 4, DEFAULT_COUNTEREXAMPLE_CAP).unwrap();
        assert_eq!(report.checked, 50_000);
        assert!(report.failures.is_empty());
    }

    proptest! {
        // Orbit scanning in machine words against the exact engine.
        #[test]
        fn scan_orbit_matches_trace(start in 1u64..5_000_000, budget in 1u64..4096) {
            let n = start | 1;
            let orbit = scan_orbit(n, ScanPolicy::Full, budget);
            let t = trace(&nat(n), budget).unwrap();
            prop_assert_eq!(orbit.converged, t.terminated);
            prop_assert_eq!(orbit.steps, t.steps);
            let expected: Vec<(u64, Nat)> = t
                .values
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, v)| (*v % nat(6)) == nat(3))
                .map(|(i, v)| (i as u64, v.clone()))
                .collect();
            prop_assert_eq!(orbit.type_b, expected);
        }

        #[test]
        fn drop_policy_confirms_what_full_confirms(start in 1u64..1_000_000) {
            let n = start | 1;
            let full = scan_orbit(n, ScanPolicy::Full, 1 << 20);
            let drop = scan_orbit(n, ScanPolicy::DropBelowStart, 1 << 20);
            prop_assert!(full.converged && drop.converged);
            prop_assert!(drop.steps <= full.steps);
        }
    }
}
