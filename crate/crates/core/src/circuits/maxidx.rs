use serde::{Deserialize, Serialize};

use super::{inv, CircuitParams, Evaluator, LowParams, TrackedValue};
use crate::error::{Error, Result};

/// How [`maxidx`] produces its last coordinate after each normalisation.
///
/// `Complement` sets it to `1 - Σ others`, which keeps the outputs summing
/// to 1 but moves the whole error of the approximate reciprocal onto that
/// one coordinate. With `d` well below `log(α+t+2) + (m-1)·log n - 1` the
/// reciprocal of `Σ b^m ≈ 1/n` is a few percent low, the last coordinate
/// gains that mass, and it can overtake the true maximum. `Normalized`
/// treats it like every other coordinate (`b^m · I`), at the same depth;
/// a uniform error in `I` then leaves the ordering intact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LastEntry {
    #[default]
    Normalized,
    Complement,
}

/// Approximate indicator of the largest coordinate of `v`.
///
/// Inputs must lie in `[1/2, 3/2)` and be pairwise distinct. The first pass
/// normalises `v` by its sum; each of the `t` rounds raises every entry to
/// the `m`-th power and renormalises, driving the maximum towards 1 and the
/// rest towards 0. See [`LastEntry`] for the last coordinate.
pub fn maxidx(
    ev: &mut Evaluator,
    v: &[TrackedValue],
    params: &CircuitParams,
) -> Result<Vec<TrackedValue>> {
    params.validate()?;
    let n = v.len();
    if n == 0 {
        return Err(Error::InvalidParams("maxidx of an empty vector".into()));
    }
    if ev.config().check_domains {
        for x in v {
            let x = x.value();
            ev.check_domain("maxidx", x, (0.5..1.5).contains(&x), "[1/2, 3/2)")?;
        }
        let mut sorted: Vec<f64> = v.iter().map(TrackedValue::value).collect();
        sorted.sort_by(f64::total_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Domain {
                op: "maxidx",
                value: w[0],
                domain: "pairwise distinct entries",
            });
        }
    }

    let inv_n = 1.0 / n as f64;
    let total = ev.sum(v);
    let mean = ev.mul_const(total, inv_n);
    let scale = inv(ev, mean, params.d_prime)?;
    let scaled: Vec<TrackedValue> = v.iter().map(|&x| ev.mul_const(x, inv_n)).collect();
    let mut b = normalize(ev, &scaled, scale);

    for _ in 0..params.t {
        let powers: Vec<TrackedValue> = b.iter().map(|&x| ev.pow2k(x, params.log_m())).collect();
        let norm = ev.sum(&powers);
        let scale = inv(ev, norm, params.d)?;
        b = normalize(ev, &powers, scale);
    }
    debug_assert!(
        !ev.config().check_domains
            || b.iter()
                .all(|x| (-1e-12..=1.0 + 1e-12).contains(&x.value())),
        "maxidx output left [0, 1]"
    );
    Ok(b)
}

/// `x · scale` for every coordinate but the last, which follows
/// [`EvalConfig::last_entry`](super::EvalConfig::last_entry).
fn normalize(ev: &mut Evaluator, xs: &[TrackedValue], scale: TrackedValue) -> Vec<TrackedValue> {
    let n = xs.len();
    let mut b: Vec<TrackedValue> = xs[..n - 1].iter().map(|&x| ev.mul(x, scale)).collect();
    let last = match ev.config().last_entry {
        LastEntry::Normalized => ev.mul(xs[n - 1], scale),
        LastEntry::Complement => {
            let s = ev.sum(&b);
            ev.const_sub(1.0, s)
        }
    };
    b.push(last);
    b
}

/// Approximate `low` of an approximately binary vector.
///
/// Shifts coordinate `i` by `i/n` so the lowest one becomes the unique
/// maximum, maps the result into `[1/2, 3/2)`, takes the max-index indicator,
/// and dots it with `[0, 1, ..., n-1]`. The zero vector maps to about `n - 1`.
pub fn low_circuit(
    ev: &mut Evaluator,
    v: &[TrackedValue],
    params: &LowParams,
) -> Result<TrackedValue> {
    let n = v.len();
    let x: Vec<TrackedValue> = v
        .iter()
        .enumerate()
        .map(|(i, &vi)| {
            let shifted = ev.add_const(vi, i as f64 / n as f64);
            let lifted = ev.add_const(shifted, 1.0);
            ev.mul_const(lifted, 0.5)
        })
        .collect();
    let b = maxidx(ev, &x, params)?;
    let terms: Vec<TrackedValue> = b
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &bi)| ev.mul_const(bi, i as f64))
        .collect();
    Ok(ev.sum(&terms))
}
