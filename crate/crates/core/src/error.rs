use crate::Nat;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An operation that is undefined at zero was handed zero.
    #[error("{0} requires a positive integer, got 0")]
    ZeroInput(&'static str),

    /// Modular arithmetic needs a modulus of at least 2.
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(Nat),

    /// An operation defined only on odd integers was handed an even one.
    #[error("{op} requires an odd integer, got {value}")]
    OddRequired { op: &'static str, value: Nat },

    /// A scan range with `lo > hi` or `lo = 0`.
    #[error("invalid range [{lo}, {hi}]: need 1 <= lo <= hi")]
    BadRange { lo: u64, hi: u64 },

    /// A requested exponent is too large to materialize as an integer.
    #[error("exponent {0} exceeds the practical limit for exact arithmetic")]
    ExponentTooLarge(String),

    /// A divisibility that is mathematically guaranteed failed to hold.
    /// This is a defect in the implementation, not bad input.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
