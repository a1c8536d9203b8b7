//! Rendering for every output the CLI emits: human text, canonical JSON,
//! and CSV.
//!
//! JSON reports are meant for lossless interchange: any field that can
//! exceed 64 bits (sequence values, odd parts) is emitted as a decimal
//! string, while counts and step indices stay native numbers. Field order
//! is fixed, so parsing an emitted document and re-emitting it reproduces
//! the bytes exactly. Integers are always full decimal, never scientific
//! notation.

use collatz_lab::arith::classify;
use collatz_lab::engine::SequenceTrace;
use collatz_lab::lab::{ConjectureRecord, ConjectureScanReport, VerificationReport};
use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// A full orbit as a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceDoc {
    pub start: String,
    pub steps: u64,
    pub terminated: bool,
    pub truncated: bool,
    pub values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residue_types: Option<Vec<String>>,
}

impl TraceDoc {
    pub fn from_trace(t: &SequenceTrace, annotate: bool) -> TraceDoc {
        TraceDoc {
            start: t.start.to_string(),
            steps: t.steps,
            terminated: t.terminated,
            truncated: t.truncated,
            values: t.values.iter().map(|v| v.to_string()).collect(),
            residue_types: annotate.then(|| {
                t.values
                    .iter()
                    .map(|v| classify(v).expect("orbit values are positive").to_string())
                    .collect()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxStepsDoc {
    pub start: u64,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeBHitDoc {
    pub start: u64,
    pub position: u64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureRecordDoc {
    pub n: String,
    pub n_prime: String,
    pub l: u64,
    pub m: String,
    pub m_type: String,
    pub holds: bool,
}

impl ConjectureRecordDoc {
    fn from_record(r: &ConjectureRecord) -> ConjectureRecordDoc {
        ConjectureRecordDoc {
            n: r.n.to_string(),
            n_prime: r.n_prime.to_string(),
            l: r.l,
            m: r.m.to_string(),
            m_type: r.m_type.to_string(),
            holds: r.holds,
        }
    }
}

/// A range-verification report as a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub format_version: u32,
    pub lo: u64,
    pub hi: u64,
    pub policy: String,
    pub max_steps: u64,
    pub checked: u64,
    pub converged: u64,
    pub truncated_total: u64,
    pub truncated_starts: Vec<u64>,
    pub max_steps_seen: Option<MaxStepsDoc>,
    pub type_b_interior_total: u64,
    pub type_b_interior_hits: Vec<TypeBHitDoc>,
    pub conjecture_failure_total: u64,
    pub conjecture_failures: Vec<ConjectureRecordDoc>,
}

impl VerifyDoc {
    pub fn from_report(r: &VerificationReport) -> VerifyDoc {
        VerifyDoc {
            format_version: REPORT_FORMAT_VERSION,
            lo: r.lo,
            hi: r.hi,
            policy: r.policy.to_string(),
            max_steps: r.max_steps,
            checked: r.checked,
            converged: r.converged,
            truncated_total: r.truncated_starts.total,
            truncated_starts: r.truncated_starts.entries.clone(),
            max_steps_seen: r.max_steps_seen.map(|m| MaxStepsDoc {
                start: m.start,
                steps: m.steps,
            }),
            type_b_interior_total: r.type_b_interior_hits.total,
            type_b_interior_hits: r
                .type_b_interior_hits
                .entries
                .iter()
                .map(|h| TypeBHitDoc {
                    start: h.start,
                    position: h.position,
                    value: h.value.to_string(),
                })
                .collect(),
            conjecture_failure_total: r.conjecture_failures.total,
            conjecture_failures: r
                .conjecture_failures
                .entries
                .iter()
                .map(ConjectureRecordDoc::from_record)
                .collect(),
        }
    }
}

/// A parity-rule scan report as a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureScanDoc {
    pub format_version: u32,
    pub lo: u64,
    pub hi: u64,
    pub checked: u64,
    pub failure_total: u64,
    pub failures: Vec<ConjectureRecordDoc>,
}

impl ConjectureScanDoc {
    pub fn from_report(r: &ConjectureScanReport) -> ConjectureScanDoc {
        ConjectureScanDoc {
            format_version: REPORT_FORMAT_VERSION,
            lo: r.lo,
            hi: r.hi,
            checked: r.checked,
            failure_total: r.failures.total,
            failures: r
                .failures
                .entries
                .iter()
                .map(ConjectureRecordDoc::from_record)
                .collect(),
        }
    }
}

/// Canonical JSON: two-space indentation, fixed field order, trailing
/// newline.
pub fn to_canonical_json<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}

/// `19 → 29 → 44 → … → 1 (14 steps)`, with odd values tagged `(A)`, `(B)`
/// or `(C)` when annotation is on.
pub fn trace_text(t: &SequenceTrace, annotate: bool) -> String {
    let rendered: Vec<String> = t
        .values
        .iter()
        .map(|v| {
            let tag = classify(v).expect("orbit values are positive");
            if annotate && tag != collatz_lab::arith::ResidueType::Even {
                format!("{v}({tag})")
            } else {
                v.to_string()
            }
        })
        .collect();
    let suffix = if t.truncated {
        format!(" ({} steps, truncated before reaching 1)", t.steps)
    } else {
        format!(" ({} steps)", t.steps)
    };
    rendered.join(" → ") + &suffix
}

/// `step_index,value,residue_type` rows.
pub fn trace_csv(t: &SequenceTrace) -> String {
    let mut out = String::from("step_index,value,residue_type\n");
    for (i, v) in t.values.iter().enumerate() {
        let tag = classify(v).expect("orbit values are positive");
        out.push_str(&format!("{i},{v},{tag}\n"));
    }
    out
}

/// Summary header block prefixed with `#`, then one row per counterexample.
pub fn verify_csv(r: &VerificationReport) -> String {
    let mut out = String::new();
    out.push_str("# collatz-lab verify report\n");
    out.push_str(&format!("# format_version={REPORT_FORMAT_VERSION}\n"));
    out.push_str(&format!("# lo={}\n", r.lo));
    out.push_str(&format!("# hi={}\n", r.hi));
    out.push_str(&format!("# policy={}\n", r.policy));
    out.push_str(&format!("# max_steps={}\n", r.max_steps));
    out.push_str(&format!("# checked={}\n", r.checked));
    out.push_str(&format!("# converged={}\n", r.converged));
    out.push_str(&format!("# truncated_total={}\n", r.truncated_starts.total));
    out.push_str(&format!(
        "# type_b_interior_total={}\n",
        r.type_b_interior_hits.total
    ));
    out.push_str(&format!(
        "# conjecture_failure_total={}\n",
        r.conjecture_failures.total
    ));
    match r.max_steps_seen {
        Some(m) => {
            out.push_str(&format!("# max_steps_seen_start={}\n", m.start));
            out.push_str(&format!("# max_steps_seen_steps={}\n", m.steps));
        }
        None => out.push_str("# max_steps_seen=none\n"),
    }
    out.push_str("kind,start,position,value,l,m,m_type\n");
    for start in &r.truncated_starts.entries {
        out.push_str(&format!("truncated,{start},,,,,\n"));
    }
    for hit in &r.type_b_interior_hits.entries {
        out.push_str(&format!(
            "type_b_interior,{},{},{},,,\n",
            hit.start, hit.position, hit.value
        ));
    }
    for f in &r.conjecture_failures.entries {
        out.push_str(&format!(
            "conjecture,{},,{},{},{},{}\n",
            f.n, f.n_prime, f.l, f.m, f.m_type
        ));
    }
    out
}

/// Summary header block prefixed with `#`, then one row per failure.
pub fn conjecture_csv(r: &ConjectureScanReport) -> String {
    let mut out = String::new();
    out.push_str("# collatz-lab conjecture report\n");
    out.push_str(&format!("# format_version={REPORT_FORMAT_VERSION}\n"));
    out.push_str(&format!("# lo={}\n", r.lo));
    out.push_str(&format!("# hi={}\n", r.hi));
    out.push_str(&format!("# checked={}\n", r.checked));
    out.push_str(&format!("# failure_total={}\n", r.failures.total));
    out.push_str("n,n_prime,l,m,m_type\n");
    for f in &r.failures.entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            f.n, f.n_prime, f.l, f.m, f.m_type
        ));
    }
    out
}
