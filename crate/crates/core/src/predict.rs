//! Closed-form predictions of orbit structure: where the odd chain after an
//! odd value lands, which starting values reach a chosen target in an exact
//! number of steps, and the power-of-two congruence that guarantees those
//! starting values exist. Everything here is computed by formula, never by
//! iterating the map, so each function can be checked against the engine.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{mod_pow, pow2, pow3, two_adic_valuation};
use crate::{Error, Nat, Result};

/// The odd chain after an odd start `n`, predicted from `e = n + 1` alone.
///
/// With `k` the 2-adic valuation of `e`, the orbit runs through `k - 1`
/// odd values `3^m (e / 2^m) - 1` and then hits its first even value
/// `3^k (e / 2^k) - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddChainPrediction {
    pub start: Nat,
    /// `start + 1`.
    pub e_value: Nat,
    /// 2-adic valuation of `e_value`; the odd chain has `k - 1` interior
    /// values.
    pub k: u64,
    /// The `k - 1` odd values following `start`, in orbit order.
    pub interior_odds: Vec<Nat>,
    /// The first even value after `start`.
    pub first_even: Nat,
}

/// A starting value constructed so its orbit provably reaches `target` in
/// exactly `predicted_steps` map applications.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredStart {
    pub k: u64,
    pub l: u64,
    /// The odd target factor; the orbit passes through `2^l * m` and then
    /// halves down to `m`.
    pub m: Nat,
    /// The constructed odd starting value.
    pub start: Nat,
    /// The value reached (equals `m`).
    pub target: Nat,
    /// Exactly `l + k`.
    pub predicted_steps: u64,
}

fn require_odd(op: &'static str, n: &Nat) -> Result<()> {
    if n.is_zero() {
        return Err(Error::ZeroInput(op));
    }
    if n.is_even() {
        return Err(Error::OddRequired {
            op,
            value: n.clone(),
        });
    }
    Ok(())
}

fn step_total(l: u64, k: u64) -> Result<u64> {
    l.checked_add(k)
        .ok_or_else(|| Error::ExponentTooLarge(format!("{l} + {k}")))
}

/// Predicts, without iterating, every odd value between odd `n` and its
/// first even successor, plus that even value itself.
pub fn predict_odd_chain(n: &Nat) -> Result<OddChainPrediction> {
    require_odd("predict_odd_chain", n)?;
    let e_value = n + Nat::one();
    let k = two_adic_valuation(&e_value)?.exponent;
    let mut quotient = e_value.clone();
    let mut coefficient = Nat::one();
    let three = Nat::from(3u32);
    let mut interior_odds = Vec::with_capacity((k - 1) as usize);
    let mut first_even = Nat::zero();
    for m in 1..=k {
        quotient >>= 1; // e / 2^m, exact while m <= k
        coefficient *= &three;
        let value = &coefficient * &quotient - Nat::one();
        if m < k {
            interior_odds.push(value);
        } else {
            first_even = value;
        }
    }
    Ok(OddChainPrediction {
        start: n.clone(),
        e_value,
        k,
        interior_odds,
        first_even,
    })
}

/// The next odd value in the orbit after odd `n`, by closed form: with
/// `u = v2(n + 1)`, the first even value is `m = 3^u ((n + 1) / 2^u) - 1`,
/// and the next odd value is `m / 2^v2(m)`.
pub fn predict_next_odd(n: &Nat) -> Result<Nat> {
    require_odd("predict_next_odd", n)?;
    let e = n + Nat::one();
    let u = two_adic_valuation(&e)?.exponent;
    let landing = pow3(u) * (e >> u) - Nat::one();
    let f = two_adic_valuation(&landing)?;
    Ok(f.odd_part)
}

/// For `k >= 1`, the start `10^k - 1` has `15^k - 1` as the first even
/// value in its orbit. Returns `(start, next_even)`.
pub fn corollary1_next_even(k: u64) -> Result<(Nat, Nat)> {
    if k == 0 {
        return Err(Error::ZeroInput("corollary1_next_even"));
    }
    let ten_k = num_traits::Pow::pow(Nat::from(10u32), k);
    let fifteen_k = num_traits::Pow::pow(Nat::from(15u32), k);
    Ok((ten_k - Nat::one(), fifteen_k - Nat::one()))
}

/// Attempts the structured start `n = (2/3)^k (2^l m + 1) - 1` for odd `m`.
///
/// Returns `None` when the hypotheses fail, i.e. `3^k` does not divide
/// `2^k (2^l m + 1)` or the quotient minus 1 is not an odd positive
/// integer; such triples are expected inputs, not errors. On success the
/// orbit of `start` reaches `m` in exactly `l + k` steps.
pub fn construct_theorem2(k: u64, l: u64, m: &Nat) -> Result<Option<StructuredStart>> {
    if k == 0 || l == 0 {
        return Err(Error::ZeroInput("construct_theorem2"));
    }
    require_odd("construct_theorem2", m)?;
    let inner = (m << l) + Nat::one();
    let scaled = inner << k;
    let three_k = pow3(k);
    let (quotient, remainder) = scaled.div_rem(&three_k);
    if !remainder.is_zero() {
        return Ok(None);
    }
    if quotient <= Nat::one() {
        return Ok(None);
    }
    let start = quotient - Nat::one();
    if start.is_even() {
        return Ok(None);
    }
    Ok(Some(StructuredStart {
        k,
        l,
        m: m.clone(),
        start,
        target: m.clone(),
        predicted_steps: step_total(l, k)?,
    }))
}

/// The `m = 1` specialization: a start whose orbit reaches 1 in `l + k`
/// steps, when the hypotheses hold.
pub fn construct_corollary2(k: u64, l: u64) -> Result<Option<StructuredStart>> {
    construct_theorem2(k, l, &Nat::one())
}

/// Whether `2^(3^(n-1)) = -1 (mod 3^n)`, checked with [`mod_pow`]. This
/// holds for every `n >= 1` and is what makes [`construct_theorem3`] total.
pub fn lemma1_check(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroInput("lemma1_check"));
    }
    let modulus = pow3(n);
    let exponent = pow3(n - 1);
    let residue = mod_pow(&Nat::from(2u32), &exponent, &modulus)?;
    Ok(residue == modulus - Nat::one())
}

/// Builds the start for `l = 3^(k-1) r` with `r` odd; the congruence
/// checked by [`lemma1_check`] guarantees the divisibility, so this always
/// succeeds. A failure is a defect and surfaces as
/// [`Error::InvariantViolation`].
pub fn construct_theorem3(k: u64, r: u64) -> Result<StructuredStart> {
    if k == 0 || r == 0 {
        return Err(Error::ZeroInput("construct_theorem3"));
    }
    if r.is_multiple_of(2) {
        return Err(Error::OddRequired {
            op: "construct_theorem3",
            value: Nat::from(r),
        });
    }
    let factor = 3u64
        .checked_pow(u32::try_from(k - 1).map_err(|_| Error::ExponentTooLarge(format!("3^{}", k - 1)))?)
        .ok_or_else(|| Error::ExponentTooLarge(format!("3^{}", k - 1)))?;
    let l = factor
        .checked_mul(r)
        .ok_or_else(|| Error::ExponentTooLarge(format!("{factor} * {r}")))?;
    construct_corollary2(k, l)?.ok_or_else(|| {
        Error::InvariantViolation(format!(
            "3^{k} must divide 2^{k}(2^{l} + 1) when l = 3^(k-1) * odd r, but did not for k={k}, r={r}"
        ))
    })
}

/// The `k = 1` family in closed form: start `(4^q - 1) / 3`, which reaches
/// 1 in exactly `2q` steps. Equal to the `(k, l, m) = (1, 2q - 1, 1)`
/// structured start.
pub fn corollary3_start(q: u64) -> Result<StructuredStart> {
    if q == 0 {
        return Err(Error::ZeroInput("corollary3_start"));
    }
    let l = 2 * q - 1;
    let (start, remainder) = (pow2(2 * q) - Nat::one()).div_rem(&Nat::from(3u32));
    if !remainder.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "4^{q} - 1 must be divisible by 3"
        )));
    }
    Ok(StructuredStart {
        k: 1,
        l,
        m: Nat::one(),
        start,
        target: Nat::one(),
        predicted_steps: step_total(l, 1)?,
    })
}

/// The `k = 2` family in closed form: for odd `r`, start
/// `(2^(3r+2) - 5) / 9`, which reaches 1 in exactly `3r + 2` steps. Even
/// `r` breaks the divisibility and is rejected.
pub fn corollary4_start(r: u64) -> Result<StructuredStart> {
    if r == 0 {
        return Err(Error::ZeroInput("corollary4_start"));
    }
    if r.is_multiple_of(2) {
        return Err(Error::OddRequired {
            op: "corollary4_start",
            value: Nat::from(r),
        });
    }
    let exponent = 3u64
        .checked_mul(r)
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| Error::ExponentTooLarge(format!("3 * {r} + 2")))?;
    let (start, remainder) = (pow2(exponent) - Nat::from(5u32)).div_rem(&Nat::from(9u32));
    if !remainder.is_zero() {
        return Err(Error::InvariantViolation(format!(
            "2^(3r+2) - 5 must be divisible by 9 for odd r, but was not for r={r}"
        )));
    }
    Ok(StructuredStart {
        k: 2,
        l: 3 * r,
        m: Nat::one(),
        start,
        target: Nat::one(),
        predicted_steps: exponent,
    })
}
