//! Exact machinery for exploring Collatz sequences under the Terras map
//! (even `n` steps to `n/2`, odd `n` steps to `(3n+1)/2`, one step each).
//!
//! The crate is organized in four layers:
//!
//! * [`arith`] — unbounded-integer primitives: 2-adic valuation, odd part,
//!   square-and-multiply modular exponentiation, residue classification
//!   mod 6.
//! * [`engine`] — the brute-force oracle: iterates the map, records full
//!   orbits, and counts steps.
//! * [`predict`] — closed-form constructors that predict orbit structure
//!   and exact step counts without iterating, each checkable against the
//!   engine.
//! * [`lab`] — bulk empirical verification: parallel range scans with
//!   deterministic block-ordered merging and counterexample capture.
//!
//! All arithmetic is exact; values are arbitrary-precision naturals.

pub mod arith;
pub mod engine;
mod error;
pub mod lab;
pub mod predict;

pub use error::{Error, Result};

/// Unbounded nonnegative integer. Every sequence value, exponent base, and
/// modulus in the crate is one of these; arithmetic never overflows or
/// rounds.
pub type Nat = num_bigint::BigUint;

/// Default per-orbit step budget (2^20). The conjecture that every orbit
/// reaches 1 is unproven, so iteration is always bounded; callers that
/// exhaust the budget get an explicit truncation outcome, never a hang.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 20;
