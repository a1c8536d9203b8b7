//! Command-line front end: orbit traces, structured-start constructors
//! with engine cross-checks, the power congruence table, and bulk range
//! verification with checkpoint/resume.
//!
//! Exit codes are stable: 0 success / all-pass, 1 counterexample or
//! prediction mismatch or truncation, 2 invalid input or hypotheses unmet,
//! 74 I/O failure, 130 interrupted.

mod checkpoint;
mod output;

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use collatz_lab::engine::{self, return_steps};
use collatz_lab::lab::{self, ScanConfig, ScanPolicy, DEFAULT_COUNTEREXAMPLE_CAP};
use collatz_lab::predict::{
    construct_corollary2, construct_theorem2, construct_theorem3, corollary3_start,
    corollary4_start, StructuredStart,
};
use collatz_lab::{Nat, DEFAULT_MAX_STEPS};

use checkpoint::Checkpoint;
use output::{ConjectureScanDoc, TraceDoc, VerifyDoc};

const EXIT_COUNTEREXAMPLE: i32 = 1;
const EXIT_INVALID: i32 = 2;
const EXIT_IO: i32 = 74;
const EXIT_INTERRUPTED: i32 = 130;

const MAX_STEPS_ENV: &str = "COLLATZ_LAB_MAX_STEPS";

/// Limits on constructor exponents. The constructed values have on the
/// order of `l` bits, so these bound memory, not correctness; the library
/// itself imposes no cap.
const MAX_K: u64 = 64;
const MAX_L: u64 = 1 << 20;

#[derive(Parser)]
#[command(
    name = "collatz-lab",
    version,
    about = "Exact Collatz orbit tools: traces, starts with proven step counts, range verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the orbit of a starting value under the Terras map
    Trace {
        /// Starting value; any positive integer, any size
        n: String,
        /// Step budget (default 2^20, or COLLATZ_LAB_MAX_STEPS)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: Option<u64>,
        #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
        format: TraceFormat,
        /// Tag each odd value with its residue class A/B/C (1/3/5 mod 6)
        #[arg(long)]
        annotate_types: bool,
    },
    /// Build a starting value with a proven step count to its target
    Construct {
        /// Which constructor: t2 (k,l,m), c2 (k,l), t3 (k,r), c3 (q), c4 (r)
        #[arg(long, value_enum)]
        theorem: TheoremKind,
        #[arg(short = 'k')]
        k: Option<u64>,
        #[arg(short = 'l')]
        l: Option<u64>,
        /// Odd target value (t2 only; any size)
        #[arg(short = 'm')]
        m: Option<String>,
        #[arg(short = 'q')]
        q: Option<u64>,
        #[arg(short = 'r')]
        r: Option<u64>,
        /// Also run the engine and report MATCH or MISMATCH
        #[arg(long)]
        check: bool,
    },
    /// Tabulate the residue of 2^(3^(n-1)) mod 3^n for n = 1..max-n
    Lemma {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
    },
    /// Scan a range of odd starts for convergence and counterexamples
    Verify {
        /// First start to scan (defaults to checkpoint frontier + 1 with --resume)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        from: Option<u64>,
        /// Last start to scan
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        to: u64,
        /// full: follow each orbit to 1; drop: stop once it falls below its start
        #[arg(long, value_enum)]
        policy: Option<PolicyArg>,
        /// Worker threads (default: available parallelism; 1 is the reference path)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        workers: Option<u64>,
        /// Per-orbit step budget (default 2^20, or COLLATZ_LAB_MAX_STEPS)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_steps: Option<u64>,
        /// Track the contiguously verified frontier in this file
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from the checkpoint frontier instead of --from
        #[arg(long, requires = "checkpoint", conflicts_with = "from")]
        resume: bool,
        /// Write the full report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report format (default json); without --report, prints to stdout
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
    },
    /// Check the successor parity rule over a range of odd starts
    Conjecture {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        from: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        to: u64,
        /// Write the full report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report format (default json); without --report, prints to stdout
        #[arg(long, value_enum)]
        format: Option<ReportFormat>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Full,
    Drop,
}

impl From<PolicyArg> for ScanPolicy {
    fn from(p: PolicyArg) -> ScanPolicy {
        match p {
            PolicyArg::Full => ScanPolicy::Full,
            PolicyArg::Drop => ScanPolicy::DropBelowStart,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremKind {
    T2,
    C2,
    T3,
    C3,
    C4,
}

/// Command failure, carrying its exit status.
enum Failure {
    /// Bad input or unmet hypotheses: exit 2.
    Invalid(String),
    /// A mathematically guaranteed property failed inside the library;
    /// worth a bug report either way: exit 1.
    Defect(String),
    /// Filesystem trouble: exit 74.
    Io(String),
}

impl From<collatz_lab::Error> for Failure {
    fn from(e: collatz_lab::Error) -> Failure {
        match e {
            collatz_lab::Error::InvariantViolation(_) => Failure::Defect(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Defect(msg)) => {
            eprintln!("defect: {msg}");
            EXIT_COUNTEREXAMPLE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            EXIT_IO
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Trace {
            n,
            max_steps,
            format,
            annotate_types,
        } => cmd_trace(&n, max_steps, format, annotate_types),
        Command::Construct {
            theorem,
            k,
            l,
            m,
            q,
            r,
            check,
        } => cmd_construct(theorem, k, l, m.as_deref(), q, r, check),
        Command::Lemma { max_n } => cmd_lemma(max_n),
        Command::Verify {
            from,
            to,
            policy,
            workers,
            max_steps,
            checkpoint,
            resume,
            report,
            format,
        } => cmd_verify(VerifyArgs {
            from,
            to,
            policy,
            workers,
            max_steps,
            checkpoint,
            resume,
            report,
            format,
        }),
        Command::Conjecture {
            from,
            to,
            report,
            format,
        } => cmd_conjecture(from, to, report, format),
    }
}

fn parse_nat(text: &str) -> Result<Nat, Failure> {
    text.parse::<BigUint>()
        .map_err(|_| Failure::Invalid(format!("{text:?} is not a nonnegative integer")))
}

/// Budget precedence: explicit flag, then COLLATZ_LAB_MAX_STEPS, then 2^20.
fn resolve_max_steps(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(value) = flag {
        return Ok(value);
    }
    match std::env::var(MAX_STEPS_ENV) {
        Ok(text) => match text.parse::<u64>() {
            Ok(value) if value >= 1 => Ok(value),
            _ => Err(Failure::Invalid(format!(
                "{MAX_STEPS_ENV} must be a positive integer, got {text:?}"
            ))),
        },
        Err(_) => Ok(DEFAULT_MAX_STEPS),
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn cmd_trace(n: &str, max_steps: Option<u64>, format: TraceFormat, annotate: bool) -> CmdResult {
    let n = parse_nat(n)?;
    let budget = resolve_max_steps(max_steps)?;
    let trace = engine::trace(&n, budget)?;
    match format {
        TraceFormat::Text => println!("{}", output::trace_text(&trace, annotate)),
        TraceFormat::Json => print!(
            "{}",
            output::to_canonical_json(&TraceDoc::from_trace(&trace, annotate))
        ),
        TraceFormat::Csv => print!("{}", output::trace_csv(&trace)),
    }
    Ok(if trace.truncated { EXIT_COUNTEREXAMPLE } else { 0 })
}

struct ConstructParams {
    k: Option<u64>,
    l: Option<u64>,
    m: Option<Nat>,
    q: Option<u64>,
    r: Option<u64>,
}

impl ConstructParams {
    fn take(&mut self, name: char, theorem: &str) -> Result<u64, Failure> {
        let slot = match name {
            'k' => &mut self.k,
            'l' => &mut self.l,
            'q' => &mut self.q,
            'r' => &mut self.r,
            _ => unreachable!(),
        };
        slot.take()
            .ok_or_else(|| Failure::Invalid(format!("{theorem} requires -{name}")))
    }

    fn take_m(&mut self, theorem: &str) -> Result<Nat, Failure> {
        self.m
            .take()
            .ok_or_else(|| Failure::Invalid(format!("{theorem} requires -m")))
    }

    /// Everything not consumed by the chosen constructor is a mistake.
    fn reject_leftovers(&self, theorem: &str) -> Result<(), Failure> {
        let mut stray = Vec::new();
        if self.k.is_some() {
            stray.push("-k");
        }
        if self.l.is_some() {
            stray.push("-l");
        }
        if self.m.is_some() {
            stray.push("-m");
        }
        if self.q.is_some() {
            stray.push("-q");
        }
        if self.r.is_some() {
            stray.push("-r");
        }
        if stray.is_empty() {
            Ok(())
        } else {
            Err(Failure::Invalid(format!(
                "{theorem} does not take {}",
                stray.join(", ")
            )))
        }
    }
}

fn check_exponent_caps(k: u64, l: u64) -> Result<(), Failure> {
    if k > MAX_K {
        return Err(Failure::Invalid(format!("k = {k} exceeds the limit {MAX_K}")));
    }
    if l > MAX_L {
        return Err(Failure::Invalid(format!(
            "l = {l} exceeds the limit 2^20 = {MAX_L} (the start would have ~{l} bits)"
        )));
    }
    Ok(())
}

fn cmd_construct(
    theorem: TheoremKind,
    k: Option<u64>,
    l: Option<u64>,
    m: Option<&str>,
    q: Option<u64>,
    r: Option<u64>,
    check: bool,
) -> CmdResult {
    let m = m.map(parse_nat).transpose()?;
    let mut params = ConstructParams { k, l, m, q, r };

    let constructed: StructuredStart = match theorem {
        TheoremKind::T2 => {
            let k = params.take('k', "t2")?;
            let l = params.take('l', "t2")?;
            let m = params.take_m("t2")?;
            params.reject_leftovers("t2")?;
            check_exponent_caps(k, l)?;
            construct_theorem2(k, l, &m)?.ok_or_else(|| {
                Failure::Invalid(format!(
                    "hypotheses unmet: 3^{k} does not divide 2^{k}(2^{l}*{m} + 1)"
                ))
            })?
        }
        TheoremKind::C2 => {
            let k = params.take('k', "c2")?;
            let l = params.take('l', "c2")?;
            params.reject_leftovers("c2")?;
            check_exponent_caps(k, l)?;
            construct_corollary2(k, l)?.ok_or_else(|| {
                Failure::Invalid(format!(
                    "hypotheses unmet: 3^{k} does not divide 2^{k}(2^{l} + 1)"
                ))
            })?
        }
        TheoremKind::T3 => {
            let k = params.take('k', "t3")?;
            let r = params.take('r', "t3")?;
            params.reject_leftovers("t3")?;
            let l = u32::try_from(k.saturating_sub(1))
                .ok()
                .and_then(|e| 3u64.checked_pow(e))
                .and_then(|p| p.checked_mul(r))
                .ok_or_else(|| {
                    Failure::Invalid(format!("l = 3^{} * {r} does not fit in 64 bits", k - 1))
                })?;
            check_exponent_caps(k, l)?;
            construct_theorem3(k, r)?
        }
        TheoremKind::C3 => {
            let q = params.take('q', "c3")?;
            params.reject_leftovers("c3")?;
            let l = q
                .checked_mul(2)
                .and_then(|v| v.checked_sub(1))
                .ok_or_else(|| Failure::Invalid(format!("q = {q} is out of range")))?;
            check_exponent_caps(1, l)?;
            corollary3_start(q)?
        }
        TheoremKind::C4 => {
            let r = params.take('r', "c4")?;
            params.reject_leftovers("c4")?;
            let l = 3u64
                .checked_mul(r)
                .ok_or_else(|| Failure::Invalid(format!("r = {r} is out of range")))?;
            check_exponent_caps(2, l)?;
            corollary4_start(r)?
        }
    };

    println!(
        "parameters: k={} l={} m={}",
        constructed.k, constructed.l, constructed.m
    );
    println!("N = {}", constructed.start);
    println!("target = {}", constructed.target);
    println!("predicted steps = {}", constructed.predicted_steps);

    if !check {
        return Ok(0);
    }
    let budget = resolve_max_steps(None)?.max(constructed.predicted_steps + 16);
    // return_steps rather than steps_between: the one degenerate start,
    // N = 1 with target 1, claims the orbit RETURNS after the predicted
    // count.
    match return_steps(&constructed.start, &constructed.target, budget)? {
        Some(steps) if steps == constructed.predicted_steps => {
            println!("engine steps = {steps}");
            println!("MATCH");
            Ok(0)
        }
        Some(steps) => {
            println!("engine steps = {steps}");
            println!("MISMATCH");
            Ok(EXIT_COUNTEREXAMPLE)
        }
        None => {
            println!("engine steps = (target not reached within {budget} steps)");
            println!("MISMATCH");
            Ok(EXIT_COUNTEREXAMPLE)
        }
    }
}

fn cmd_lemma(max_n: u64) -> CmdResult {
    println!(
        "{:>4}  {:>16}  {:>16}  {:>16}  {:>16}  status",
        "n", "exponent", "modulus", "residue", "expected"
    );
    let three = Nat::from(3u32);
    let two = Nat::from(2u32);
    let one = Nat::from(1u32);
    let mut exponent = one.clone(); // 3^(n-1)
    let mut all_pass = true;
    for n in 1..=max_n {
        let modulus = &exponent * &three; // 3^n
        let residue = collatz_lab::arith::mod_pow(&two, &exponent, &modulus)?;
        let expected = &modulus - &one;
        let pass = residue == expected;
        all_pass &= pass;
        println!(
            "{n:>4}  {exponent:>16}  {modulus:>16}  {residue:>16}  {expected:>16}  {}",
            if pass { "PASS" } else { "FAIL" }
        );
        exponent = modulus;
    }
    Ok(if all_pass { 0 } else { EXIT_COUNTEREXAMPLE })
}

struct VerifyArgs {
    from: Option<u64>,
    to: u64,
    policy: Option<PolicyArg>,
    workers: Option<u64>,
    max_steps: Option<u64>,
    checkpoint: Option<PathBuf>,
    resume: bool,
    report: Option<PathBuf>,
    format: Option<ReportFormat>,
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    let max_steps = resolve_max_steps(args.max_steps)?;
    let workers = args
        .workers
        .map(|w| w as usize)
        .unwrap_or_else(default_workers);

    let existing = match &args.checkpoint {
        Some(path) if path.exists() => Some(Checkpoint::load(path).map_err(Failure::Invalid)?),
        _ => None,
    };

    let (from, policy) = if args.resume {
        let cp = existing.as_ref().ok_or_else(|| {
            Failure::Invalid(format!(
                "--resume needs an existing checkpoint, but {} was not found",
                args.checkpoint
                    .as_ref()
                    .expect("clap: resume requires checkpoint")
                    .display()
            ))
        })?;
        let policy = match args.policy.map(ScanPolicy::from) {
            None => cp.policy,
            Some(p) if p == cp.policy => p,
            Some(p) => {
                return Err(Failure::Invalid(format!(
                    "checkpoint was written with policy '{}'; refusing to resume with '{p}'",
                    cp.policy
                )))
            }
        };
        if cp.frontier >= args.to {
            println!(
                "checkpoint frontier {} already covers --to {}; nothing to verify",
                cp.frontier, args.to
            );
            return Ok(0);
        }
        (cp.frontier + 1, policy)
    } else {
        let from = args.from.ok_or_else(|| {
            Failure::Invalid("--from is required (or pass --resume with --checkpoint)".to_string())
        })?;
        let policy = args
            .policy
            .map(ScanPolicy::from)
            .unwrap_or(ScanPolicy::DropBelowStart);
        if args.checkpoint.is_some() {
            // A checkpoint certifies a contiguous range anchored at 1, so a
            // checkpointed run must start there or extend what is recorded.
            match &existing {
                None if from != 1 => {
                    return Err(Failure::Invalid(format!(
                        "a new checkpoint must be anchored at 1, got --from {from}"
                    )))
                }
                Some(cp) if cp.policy != policy => {
                    return Err(Failure::Invalid(format!(
                        "checkpoint was written with policy '{}'; refusing to extend it with '{policy}'",
                        cp.policy
                    )))
                }
                Some(cp) if from != 1 && from != cp.frontier + 1 => {
                    return Err(Failure::Invalid(format!(
                        "--from {from} is not contiguous with the checkpoint frontier {} (use --resume)",
                        cp.frontier
                    )))
                }
                _ => {}
            }
        }
        (from, policy)
    };

    // On SIGINT workers finish the block they are on; the report then covers
    // the contiguous prefix and the checkpoint is updated atomically.
    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = cancel.clone();
        ctrlc::set_handler(move || cancel.store(true, Ordering::SeqCst))
            .expect("SIGINT handler installs once per process");
    }

    let mut cfg = ScanConfig::new(from, args.to, policy);
    cfg.max_steps = max_steps;
    cfg.workers = workers;
    let outcome = lab::run_scan(&cfg, Some(&cancel))?;

    let Some(report) = outcome.report else {
        eprintln!("interrupted before any block completed; previous checkpoint left intact");
        return Ok(EXIT_INTERRUPTED);
    };

    if let Some(path) = &args.report {
        let text = match args.format.unwrap_or(ReportFormat::Json) {
            ReportFormat::Json => output::to_canonical_json(&VerifyDoc::from_report(&report)),
            ReportFormat::Csv => output::verify_csv(&report),
        };
        fs::write(path, text)?;
    } else if let Some(format) = args.format {
        let text = match format {
            ReportFormat::Json => output::to_canonical_json(&VerifyDoc::from_report(&report)),
            ReportFormat::Csv => output::verify_csv(&report),
        };
        print!("{text}");
    }

    print_verify_summary(&report, outcome.interrupted);

    if let Some(path) = &args.checkpoint {
        let frontier = report.hi;
        let should_write = existing.as_ref().is_none_or(|cp| frontier > cp.frontier);
        if should_write {
            Checkpoint::new(frontier, policy).save(path)?;
            eprintln!("checkpoint frontier advanced to {frontier}");
        }
    }

    if outcome.interrupted {
        return Ok(EXIT_INTERRUPTED);
    }
    Ok(if report.all_clear() {
        0
    } else {
        EXIT_COUNTEREXAMPLE
    })
}

fn print_verify_summary(report: &lab::VerificationReport, interrupted: bool) {
    eprintln!(
        "verified [{}, {}] policy={} max_steps={}",
        report.lo, report.hi, report.policy, report.max_steps
    );
    eprintln!("checked:              {}", report.checked);
    eprintln!("converged:            {}", report.converged);
    eprintln!("truncated:            {}", report.truncated_starts.total);
    eprintln!("type-B interior hits: {}", report.type_b_interior_hits.total);
    eprintln!("conjecture failures:  {}", report.conjecture_failures.total);
    match report.max_steps_seen {
        Some(m) => eprintln!("longest orbit: start {} took {} steps", m.start, m.steps),
        None => eprintln!("longest orbit: n/a"),
    }
    for start in report.truncated_starts.entries.iter().take(20) {
        eprintln!("TRUNCATED: start {start} did not converge within the budget");
    }
    for hit in report.type_b_interior_hits.entries.iter().take(20) {
        eprintln!(
            "TYPE-B HIT: start {} reached {} (3 mod 6) at position {}",
            hit.start, hit.value, hit.position
        );
    }
    for failure in report.conjecture_failures.entries.iter().take(20) {
        eprintln!(
            "CONJECTURE FAIL: n={} gives l={}, m={} ({})",
            failure.n, failure.l, failure.m, failure.m_type
        );
    }
    let status = if interrupted {
        "INTERRUPTED"
    } else if report.all_clear() {
        "PASS"
    } else {
        "FAIL"
    };
    eprintln!("status: {status}");
}

fn cmd_conjecture(
    from: u64,
    to: u64,
    report_path: Option<PathBuf>,
    format: Option<ReportFormat>,
) -> CmdResult {
    let report = lab::conjecture_scan(from, to, default_workers(), DEFAULT_COUNTEREXAMPLE_CAP)?;

    if let Some(path) = &report_path {
        let text = match format.unwrap_or(ReportFormat::Json) {
            ReportFormat::Json => {
                output::to_canonical_json(&ConjectureScanDoc::from_report(&report))
            }
            ReportFormat::Csv => output::conjecture_csv(&report),
        };
        fs::write(path, text)?;
    } else if let Some(format) = format {
        let text = match format {
            ReportFormat::Json => {
                output::to_canonical_json(&ConjectureScanDoc::from_report(&report))
            }
            ReportFormat::Csv => output::conjecture_csv(&report),
        };
        print!("{text}");
    }

    // Per-value detail for small scans.
    if report.checked > 0 && report.checked <= 32 {
        let mut n = from | 1;
        while n <= to {
            let record = lab::conjecture_check(&Nat::from(n))?;
            println!(
                "{n}: l={} ({}), m={} ({}), {}",
                record.l,
                if record.l % 2 == 0 { "even" } else { "odd" },
                record.m,
                record.m_type,
                if record.holds { "PASS" } else { "FAIL" }
            );
            n += 2;
        }
    }

    for failure in report.failures.entries.iter().take(20) {
        println!(
            "FAIL: n={} gives l={}, m={} ({})",
            failure.n, failure.l, failure.m, failure.m_type
        );
    }
    println!(
        "checked {} odd starts in [{}, {}]: {}",
        report.checked,
        report.lo,
        report.hi,
        if report.failures.is_empty() {
            "all hold".to_string()
        } else {
            format!("{} FAILURES", report.failures.total)
        }
    );
    Ok(if report.failures.is_empty() {
        0
    } else {
        EXIT_COUNTEREXAMPLE
    })
}
