//! Checks of the accuracy guarantees, shared by the property tests and the
//! acceptance run. Each returns a description of the first violation.

use hetda::circuits::{
    low_circuit, lowcomp, transform_s, transform_tc, transform_tl, CircuitParams, Evaluator,
};
use hetda::exact::low_exact;
use hetda::params::{
    low_params, lowcomp_params, lowcomp_ratio_bound, maxidx_ratio_bound, phi_optimal,
};
use proptest::prelude::*;

pub const DELTA: f64 = 0.2;
pub const EPSILON: f64 = 0.5;
pub const ETA: f64 = 0.05;

pub type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn argmax(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    best
}

fn bits(v: &[bool]) -> Vec<f64> {
    v.iter().map(|&b| f64::from(u8::from(b))).collect()
}

fn low_value(v: &[f64], p: &CircuitParams) -> f64 {
    let mut ev = Evaluator::default();
    let x = ev.fresh_vec(v);
    low_circuit(&mut ev, &x, p).unwrap().value()
}

/// `(v, v')` with `v` binary and `|v' - v| ≤ scale/(2n)`, `v'` kept in `[0, 1]`.
pub fn near_binary(max_n: usize, scale: f64) -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(move |n| {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(0.0..1.0f64, n),
        )
            .prop_map(move |(v, u)| {
                let r = scale / (2.0 * n as f64);
                let vp = v
                    .iter()
                    .zip(&u)
                    .map(|(&b, &e)| if b { 1.0 - e * r } else { e * r })
                    .collect();
                (v, vp)
            })
    })
}

/// Two near-binary vectors whose lows agree about half the time.
#[derive(Clone, Debug)]
pub struct LowPair {
    pub n: usize,
    pub x: Vec<bool>,
    pub y: Vec<bool>,
    pub xp: Vec<f64>,
    pub yp: Vec<f64>,
}

pub fn low_pair(max_n: usize) -> impl Strategy<Value = LowPair> {
    (
        3..=max_n,
        (0..max_n, 0..max_n, any::<bool>()),
        proptest::collection::vec(any::<bool>(), 2 * max_n),
        proptest::collection::vec(0.0..1.0f64, 2 * max_n),
    )
        .prop_map(|(n, (a, b, same), fill, noise)| {
            // low index l-1, or the zero vector for l = 0
            let with_low = |l: usize, fill: &[bool]| -> Vec<bool> {
                (0..n)
                    .map(|i| i + 1 == l || (i + 1 < l && fill[i]))
                    .collect()
            };
            let (la, lb) = (a % n, if same { a % n } else { b % n });
            let x = with_low(la, &fill[..n]);
            let y = with_low(lb, &fill[n..2 * n]);
            let r = EPSILON / (2.0 * n as f64);
            let jitter = |v: &[bool], e: &[f64]| -> Vec<f64> {
                v.iter()
                    .zip(e)
                    .map(|(&b, &e)| if b { 1.0 - e * r } else { e * r })
                    .collect()
            };
            let xp = jitter(&x, &noise[..n]);
            let yp = jitter(&y, &noise[n..2 * n]);
            LowPair { n, x, y, xp, yp }
        })
}

/// The lowest one of a binary vector is the largest entry after the shift.
pub fn shift_exposes_low_exhaustive(max_n: usize) -> Check {
    for n in 1..=max_n {
        for mask in 0u32..1 << n {
            let v: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let got = argmax(&transform_s(&bits(&v)));
            ensure(got == low_exact(&v), || format!("{v:?}: argmax {got}"))?;
        }
    }
    Ok(())
}

/// Perturbations below `1/(2n)` do not move the argmax.
pub fn perturbation_keeps_low(v: &[bool], vp: &[f64]) -> Check {
    let want = low_exact(v);
    let a = argmax(&transform_s(vp));
    let b = argmax(&transform_tl(&transform_s(vp)));
    ensure(a == want && b == want, || {
        format!("{vp:?}: {a}/{b}, want {want}")
    })
}

/// Derived `Low` parameters meet `delta` and the `3/2·n(n-1)·2^-α` bound.
pub fn low_within_delta(v: &[bool], vp: &[f64]) -> Check {
    let n = v.len();
    let choice = low_params(n, DELTA, EPSILON, 2).map_err(|e| e.to_string())?;
    let err = (low_value(vp, &choice.params) - low_exact(v) as f64).abs();
    let bound = 1.5 * (n * (n - 1)) as f64 * 2f64.powi(-(choice.alpha as i32));
    ensure(err < DELTA && err <= bound, || {
        format!("{vp:?}: error {err}, delta {DELTA}, bound {bound}")
    })
}

/// The top two entries fed to the max-index circuit are at least `c` apart.
pub fn maxidx_ratio_above_bound(vp: &[f64]) -> Check {
    let mut x = transform_tl(&transform_s(vp));
    x.sort_by(|a, b| b.total_cmp(a));
    let (ratio, c) = (x[0] / x[1], maxidx_ratio_bound(vp.len(), EPSILON));
    ensure(ratio >= c * (1.0 - 1e-12), || {
        format!("{vp:?}: ratio {ratio} < {c}")
    })
}

/// `|Lx - Ly| ≤ phi` iff the lows agree; the comparison inputs are at least
/// `c` apart; derived `LowComp` parameters meet `eta`.
pub fn lowcomp_separates(p: &LowPair) -> Check {
    let n = p.n;
    let pl = low_params(n, DELTA, EPSILON, 2)
        .map_err(|e| e.to_string())?
        .params;
    let pc = lowcomp_params(n, DELTA, ETA, 2)
        .map_err(|e| e.to_string())?
        .params;
    let mut ev = Evaluator::default();
    let (xv, yv) = (ev.fresh_vec(&p.xp), ev.fresh_vec(&p.yp));
    let a = low_circuit(&mut ev, &xv, &pl).unwrap();
    let b = low_circuit(&mut ev, &yv, &pl).unwrap();
    let same = low_exact(&p.x) == low_exact(&p.y);
    let gap = (a.value() - b.value()).abs();
    ensure((gap <= pc.phi) == same, || {
        format!("{p:?}: gap {gap}, phi {}", pc.phi)
    })?;

    let (t_phi, t_gap) = (transform_tc(pc.phi * pc.phi, n), transform_tc(gap * gap, n));
    let ratio = t_phi.max(t_gap) / t_phi.min(t_gap);
    let c = lowcomp_ratio_bound(n, DELTA);
    ensure(ratio > c * (1.0 - 1e-12), || {
        format!("{p:?}: ratio {ratio} <= {c}")
    })?;

    let omega = lowcomp(&mut ev, a, b, &pc, n).unwrap().value();
    let target = if same { 1.0 } else { 0.0 };
    ensure((omega - target).abs() < ETA, || {
        format!("{p:?}: omega {omega}, same {same}")
    })
}

/// The closed-form threshold is at least as good as every point of a
/// 10^4-point grid over `(2δ, 1-2δ)`.
pub fn phi_beats_grid(n: usize, delta: f64) -> Check {
    let (lo, hi) = (2.0 * delta, 1.0 - 2.0 * delta);
    let margin = |phi: f64| {
        let t = transform_tc(phi * phi, n);
        (t / transform_tc(lo * lo, n)).min(transform_tc(hi * hi, n) / t)
    };
    let best = margin(phi_optimal(n, delta));
    for k in 1..=10_000 {
        let phi = lo + (hi - lo) * f64::from(k) / 10_001.0;
        ensure(best >= margin(phi) - 1e-15, || {
            format!("n={n} delta={delta}: grid phi {phi} beats the optimum")
        })?;
    }
    Ok(())
}
