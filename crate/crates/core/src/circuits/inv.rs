use super::{Evaluator, TrackedValue};
use crate::error::Result;

/// Approximate reciprocal of `x ∈ (0, 2)` by Goldschmidt iteration.
///
/// Starting from `a = 2 - x` and `b = 1 - x`, each of the `d` rounds sets
/// `b ← b²` and `a ← a·(1 + b)`, so that
/// `a = (1 - (1 - x)^(2^(d+1))) / x`. The result always underestimates
/// `1/x` and consumes `d + 1` levels for `d ≥ 1`.
pub fn inv(ev: &mut Evaluator, x: TrackedValue, d: u32) -> Result<TrackedValue> {
    let v = x.value();
    ev.check_domain("inv", v, v > 0.0 && v < 2.0, "(0, 2)")?;
    let mut a = ev.const_sub(2.0, x);
    let mut b = ev.const_sub(1.0, x);
    for _ in 0..d {
        b = ev.square(b);
        let factor = ev.add_const(b, 1.0);
        a = ev.mul(a, factor);
    }
    Ok(a)
}
