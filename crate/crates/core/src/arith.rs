//! Unbounded-integer primitives the rest of the crate builds on: 2-adic
//! valuation and odd part, square-and-multiply modular exponentiation, and
//! residue classification mod 6.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Nat, Result};

/// A positive integer split as `2^exponent * odd_part`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization2 {
    /// The 2-adic valuation: the largest `e` with `2^e` dividing the input.
    pub exponent: u64,
    /// The odd cofactor left after all factors of 2 are removed.
    pub odd_part: Nat,
}

/// Residue class of an integer, following the odd taxonomy mod 6.
///
/// Odd integers fall into exactly one of `A` (1 mod 6), `B` (3 mod 6) or
/// `C` (5 mod 6); even integers get their own tag so that whole orbits can
/// be classified without a separate parity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResidueType {
    A,
    B,
    C,
    Even,
}

impl ResidueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ResidueType::A => "A",
            ResidueType::B => "B",
            ResidueType::C => "C",
            ResidueType::Even => "even",
        }
    }
}

impl std::fmt::Display for ResidueType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Splits `n >= 1` into `2^e * m` with `m` odd and `e` maximal.
///
/// Zero is rejected rather than mapped to a sentinel: the valuation of 0 is
/// undefined and callers feed these exponents straight into step-count
/// arithmetic.
pub fn two_adic_valuation(n: &Nat) -> Result<Factorization2> {
    let exponent = n
        .trailing_zeros()
        .ok_or(Error::ZeroInput("two_adic_valuation"))?;
    Ok(Factorization2 {
        exponent,
        odd_part: n >> exponent,
    })
}

/// Computes `base^exponent mod modulus` by square-and-multiply, so the cost
/// is logarithmic in the exponent. Requires `modulus >= 2`.
pub fn mod_pow(base: &Nat, exponent: &Nat, modulus: &Nat) -> Result<Nat> {
    if *modulus < Nat::from(2u32) {
        return Err(Error::BadModulus(modulus.clone()));
    }
    let mut result = Nat::one();
    let mut base = base % modulus;
    let bits = exponent.bits();
    for i in 0..bits {
        if exponent.bit(i) {
            result = &result * &base % modulus;
        }
        if i + 1 < bits {
            base = &base * &base % modulus;
        }
    }
    Ok(result)
}

/// Tags `n >= 1` with its residue class: even integers get [`ResidueType::Even`],
/// odd integers get A/B/C for 1/3/5 mod 6.
pub fn classify(n: &Nat) -> Result<ResidueType> {
    if n.is_zero() {
        return Err(Error::ZeroInput("classify"));
    }
    if n.is_even() {
        return Ok(ResidueType::Even);
    }
    let residue = (n % Nat::from(6u32)).to_u64_digits();
    Ok(match residue.first().copied().unwrap_or(0) {
        1 => ResidueType::A,
        3 => ResidueType::B,
        5 => ResidueType::C,
        other => unreachable!("odd n mod 6 must be 1, 3 or 5, got {other}"),
    })
}

/// `2^e` as a [`Nat`].
pub(crate) fn pow2(e: u64) -> Nat {
    Nat::one() << e
}

/// `3^e` as a [`Nat`].
pub(crate) fn pow3(e: u64) -> Nat {
    num_traits::Pow::pow(Nat::from(3u32), e)
}
