use super::{inv, CircuitParams, CompParams, Evaluator, TrackedValue};
use crate::error::{Error, Result};

/// Approximates `comp(a, b)`: 1 if `a > b`, 0 if `a < b`.
///
/// Evaluates `a^(m^t) / (a^(m^t) + b^(m^t))` by `t` rounds of powering and
/// renormalising, keeping `a_k + b_k = 1` throughout. Inputs must be distinct
/// and lie in `[1/2, 3/2)`.
pub fn comp(
    ev: &mut Evaluator,
    a: TrackedValue,
    b: TrackedValue,
    params: &CircuitParams,
) -> Result<TrackedValue> {
    params.validate()?;
    for x in [a.value(), b.value()] {
        ev.check_domain("comp", x, (0.5..1.5).contains(&x), "[1/2, 3/2)")?;
    }
    if ev.config().check_domains && a.value() == b.value() {
        return Err(Error::Domain {
            op: "comp",
            value: a.value(),
            domain: "distinct inputs",
        });
    }

    let sum = ev.add(a, b);
    let mean = ev.mul_const(sum, 0.5);
    let scale = inv(ev, mean, params.d_prime)?;
    let half_a = ev.mul_const(a, 0.5);
    let mut ak = ev.mul(half_a, scale);
    let mut bk = ev.const_sub(1.0, ak);
    for _ in 0..params.t {
        let am = ev.pow2k(ak, params.log_m());
        let bm = ev.pow2k(bk, params.log_m());
        let norm = ev.add(am, bm);
        let scale = inv(ev, norm, params.d)?;
        ak = ev.mul(am, scale);
        bk = ev.const_sub(1.0, ak);
    }
    Ok(ak)
}

/// Approximate equality indicator of two `Low` outputs over `n`-vectors.
///
/// Compares `T_C(phi²)` against `T_C((lx - ly)²)` with [`comp`], so the
/// result is near 1 when `|lx - ly| < phi` and near 0 otherwise. The
/// comparison circuit needs `|lx - ly| < n`.
pub fn lowcomp(
    ev: &mut Evaluator,
    lx: TrackedValue,
    ly: TrackedValue,
    params: &CompParams,
    n: usize,
) -> Result<TrackedValue> {
    params.validate()?;
    let n2 = (n * n) as f64;
    let gap = ev.sub(lx, ly);
    let sq = ev.square(gap);
    let scaled = ev.mul_const(sq, 1.0 / n2);
    let tc = ev.add_const(scaled, 0.5);
    let threshold = ev.constant(0.5 + params.phi * params.phi / n2);
    comp(ev, threshold, tc, &params.circuit)
}

#[cfg(test)]
mod tests {
    use super::super::EvalConfig;
    use super::*;

    fn p(d: u32, dp: u32, m: u32, t: u32) -> CircuitParams {
        CircuitParams::new(d, dp, m, t).unwrap()
    }

    fn run(a: f64, b: f64, params: CircuitParams) -> f64 {
        let mut ev = Evaluator::default();
        let (a, b) = (ev.fresh(a), ev.fresh(b));
        comp(&mut ev, a, b, &params).unwrap().value()
    }

    #[test]
    fn separates_well_spaced_inputs() {
        let params = p(5, 5, 2, 5);
        assert!(run(1.4, 0.6, params) > 0.999);
        assert!(run(0.6, 1.4, params) < 0.001);
    }

    #[test]
    fn nearly_complementary() {
        let params = p(5, 5, 2, 5);
        for (a, b) in [(1.4, 0.6), (0.9, 1.1), (0.51, 0.55), (1.2, 1.25)] {
            let s = run(a, b, params) + run(b, a, params);
            assert!((s - 1.0).abs() < 1e-3, "{a} {b} -> {s}");
        }
    }

    #[test]
    fn stays_in_unit_interval() {
        let params = p(2, 2, 2, 8);
        for (a, b) in [(0.5, 1.49), (1.49, 0.5), (1.0, 1.0001)] {
            let r = run(a, b, params);
            assert!((0.0..=1.0).contains(&r), "{a} {b} -> {r}");
        }
    }

    #[test]
    fn domain() {
        let mut ev = Evaluator::default();
        let params = p(3, 3, 2, 3);
        for (a, b) in [(0.4, 1.0), (1.0, 1.5), (1.0, 1.0)] {
            let (a, b) = (ev.fresh(a), ev.fresh(b));
            assert!(comp(&mut ev, a, b, &params).is_err());
        }
    }

    #[test]
    fn depth_closed_forms() {
        let params = p(3, 2, 4, 5);
        let mut ev = Evaluator::default();
        let (a, b) = (ev.fresh(1.2), ev.fresh(0.7));
        // 0.5·(a+b), inv d'+1, 0.5·a then ·inv, then t(d + log m + 2)
        assert_eq!(
            comp(&mut ev, a, b, &params).unwrap().depth(),
            2 + 3 + 5 * (3 + 2 + 2)
        );

        let cp = CompParams::new(params, 0.5).unwrap();
        let mut ev = Evaluator::new(EvalConfig {
            charge_constant_mult: false,
            ..EvalConfig::default()
        });
        let (x, y) = (ev.fresh(3.1), ev.fresh(2.0));
        let r = lowcomp(&mut ev, x, y, &cp, 6).unwrap();
        assert_eq!(r.depth(), 2 + 2 + 5 * (3 + 2 + 2));
    }

    #[test]
    fn lowcomp_equal_and_distinct() {
        let cp = CompParams::new(p(3, 3, 2, 12), 0.6).unwrap();
        let mut ev = Evaluator::default();
        let x = ev.fresh(4.0);
        let y = ev.fresh(4.0);
        let z = ev.fresh(5.0);
        assert!(lowcomp(&mut ev, x, y, &cp, 10).unwrap().value() > 0.99);
        assert!(lowcomp(&mut ev, x, z, &cp, 10).unwrap().value() < 0.01);
        let far = ev.fresh(10.5);
        let zero = ev.fresh(0.0);
        assert!(lowcomp(&mut ev, far, zero, &cp, 10).is_err());
    }
}
