//! The brute-force oracle: iterates the Terras map, records orbits, and
//! counts steps. One step is one map application; the odd case `(3n+1)/2`
//! counts as a single step. Orbits stop at the first occurrence of 1 and do
//! not continue into the 1 -> 2 -> 1 cycle.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::two_adic_valuation;
use crate::{Error, Nat, Result};

/// A recorded orbit. `values[0]` is the start; every adjacent pair obeys
/// the Terras map; `steps == values.len() - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTrace {
    pub start: Nat,
    pub values: Vec<Nat>,
    /// Number of map applications performed.
    pub steps: u64,
    /// The orbit reached 1.
    pub terminated: bool,
    /// The step budget ran out before reaching 1.
    pub truncated: bool,
}

/// Memory-lean orbit record: instead of the full orbit it keeps every
/// `stride`-th value plus both endpoints, for long orbits where only the
/// shape and the step count matter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeanTrace {
    pub start: Nat,
    /// `(step_index, value)` samples; always contains step 0 and the final
    /// step, in increasing step order.
    pub checkpoints: Vec<(u64, Nat)>,
    pub steps: u64,
    pub terminated: bool,
    pub truncated: bool,
}

/// The passage from an odd value to the next odd value in its orbit: `u`
/// steps up to the first even value `M`, then `d` halvings down to the next
/// odd value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddJump {
    pub from_odd: Nat,
    /// Steps from `from_odd` to the first even value. Equals the 2-adic
    /// valuation of `from_odd + 1`.
    pub u: u64,
    /// The first even value reached.
    pub even_landing: Nat,
    /// Steps from `even_landing` to the next odd value. Equals the 2-adic
    /// valuation of `even_landing`.
    pub d: u64,
    /// The next odd value: `even_landing / 2^d`.
    pub to_odd: Nat,
}

/// One application of the Terras map: even `n` -> `n/2`, odd `n` -> `(3n+1)/2`.
pub fn terras_step(n: &Nat) -> Result<Nat> {
    if n.is_zero() {
        return Err(Error::ZeroInput("terras_step"));
    }
    if n.is_even() {
        Ok(n >> 1)
    } else {
        Ok((n * Nat::from(3u32) + Nat::one()) >> 1)
    }
}

/// Iterates the map from `start` until the value 1 appears or `max_steps`
/// applications have been made, recording the full orbit. A start of 1
/// yields the zero-step terminated trace `[1]`. Truncation is a reported
/// state, not an error.
pub fn trace(start: &Nat, max_steps: u64) -> Result<SequenceTrace> {
    if start.is_zero() {
        return Err(Error::ZeroInput("trace"));
    }
    let one = Nat::one();
    let mut values = Vec::new();
    let mut current = start.clone();
    values.push(current.clone());
    let mut steps = 0u64;
    while current != one && steps < max_steps {
        current = terras_step(&current)?;
        values.push(current.clone());
        steps += 1;
    }
    let terminated = current == one;
    Ok(SequenceTrace {
        start: start.clone(),
        values,
        steps,
        terminated,
        truncated: !terminated,
    })
}

/// Like [`trace`], but stores only every `stride`-th value plus both
/// endpoints. `stride = 1` keeps everything.
pub fn trace_lean(start: &Nat, max_steps: u64, stride: u64) -> Result<LeanTrace> {
    if start.is_zero() {
        return Err(Error::ZeroInput("trace_lean"));
    }
    let stride = stride.max(1);
    let one = Nat::one();
    let mut checkpoints = vec![(0u64, start.clone())];
    let mut current = start.clone();
    let mut steps = 0u64;
    while current != one && steps < max_steps {
        current = terras_step(&current)?;
        steps += 1;
        if steps.is_multiple_of(stride) {
            checkpoints.push((steps, current.clone()));
        }
    }
    if checkpoints.last().map(|(s, _)| *s) != Some(steps) {
        checkpoints.push((steps, current.clone()));
    }
    let terminated = current == one;
    Ok(LeanTrace {
        start: start.clone(),
        checkpoints,
        steps,
        terminated,
        truncated: !terminated,
    })
}

/// Number of map applications from `start` until the first occurrence of
/// `target`; zero when they are equal. `None` when `target` is not reached
/// within `max_steps` applications.
pub fn steps_between(start: &Nat, target: &Nat, max_steps: u64) -> Result<Option<u64>> {
    if start.is_zero() || target.is_zero() {
        return Err(Error::ZeroInput("steps_between"));
    }
    let one = Nat::one();
    let two = Nat::from(2u32);
    let past_one_unreachable = *target != one && *target != two;
    let mut current = start.clone();
    let mut steps = 0u64;
    loop {
        if current == *target {
            return Ok(Some(steps));
        }
        // After 1 the orbit cycles 2, 1, 2, 1, ...; anything else is gone.
        if past_one_unreachable && current == one {
            return Ok(None);
        }
        if steps == max_steps {
            return Ok(None);
        }
        current = terras_step(&current)?;
        steps += 1;
    }
}

/// Steps from an odd `start` until the orbit comes back to `target`,
/// counting at least one map application. For distinct values this agrees
/// with [`steps_between`]; it exists for the degenerate constructed starts
/// where `start == target` and the claim is about the orbit returning.
pub fn return_steps(start: &Nat, target: &Nat, max_steps: u64) -> Result<Option<u64>> {
    if *start == *target {
        let next = terras_step(start)?;
        Ok(steps_between(&next, target, max_steps.saturating_sub(1))?.map(|s| s + 1))
    } else {
        steps_between(start, target, max_steps)
    }
}

/// Decomposes the passage from odd `n` to the next odd value in its orbit
/// by iterating the map: `u` steps to the first even value, `d` halvings to
/// the next odd one.
pub fn odd_jump(n: &Nat) -> Result<OddJump> {
    if n.is_zero() {
        return Err(Error::ZeroInput("odd_jump"));
    }
    if n.is_even() {
        return Err(Error::OddRequired {
            op: "odd_jump",
            value: n.clone(),
        });
    }
    let mut current = terras_step(n)?;
    let mut u = 1u64;
    while current.is_odd() {
        current = terras_step(&current)?;
        u += 1;
    }
    let even_landing = current.clone();
    let mut d = 0u64;
    while current.is_even() {
        current = &current >> 1;
        d += 1;
    }
    debug_assert_eq!(two_adic_valuation(&(n + Nat::one()))?.exponent, u);
    debug_assert_eq!(two_adic_valuation(&even_landing)?.exponent, d);
    Ok(OddJump {
        from_odd: n.clone(),
        u,
        even_landing,
        d,
        to_odd: current,
    })
}

/// The odd elements of the orbit, in order.
pub fn odd_subsequence(t: &SequenceTrace) -> Vec<Nat> {
    t.values.iter().filter(|v| v.is_odd()).cloned().collect()
}
