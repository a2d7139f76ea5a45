//! Parameter selection from error budgets, and depth / cost estimates.
//!
//! All logarithms are base 2. Every bound of the form `x ≥ bound` or
//! `x > bound` is met by the smallest integer satisfying it.
//!
//! Error budget vocabulary:
//! - `delta`: accuracy of `Low`, `|Low(v') - low(v)| < delta`, in `(0, 1/4)`
//! - `eta`: accuracy of `LowComp`, in `(0, 1)`
//! - `epsilon`: how far inputs may drift from binary, `|v' - v| ≤ epsilon/(2n)`,
//!   in `[0, 1)`
//! - `alpha`: the max-index / comparison circuits are accurate to `2^-alpha`

use serde::Serialize;

use crate::circuits::{
    low_circuit, lowcomp, CircuitParams, CompParams, EvalConfig, Evaluator, LastEntry, LowParams,
    OpCounts,
};
use crate::error::{Error, Infeasibility, Result};

/// Lower bound on the ratio of the largest to the second largest entry of
/// `T_L(S(v'))` when `v'` is within `epsilon/(2n)` of a binary vector.
pub fn maxidx_ratio_bound(n: usize, epsilon: f64) -> f64 {
    let n = n as f64;
    1.0 + (2.0 - 2.0 * epsilon) / (6.0 * n - 4.0 + epsilon)
}

/// Lower bound on `max/min` of the two `LowComp` comparison inputs when the
/// threshold is [`phi_optimal`].
pub fn lowcomp_ratio_bound(n: usize, delta: f64) -> f64 {
    let n2 = (n * n) as f64;
    let hi = 1.0 - 2.0 * delta;
    let lo = 2.0 * delta;
    ((n2 + 2.0 * hi * hi) / (n2 + 2.0 * lo * lo)).sqrt()
}

/// The threshold maximising the worst-case comparison ratio.
///
/// `T_C(phi²)` is the geometric mean of `T_C((2δ)²)` and `T_C((1-2δ)²)`.
pub fn phi_optimal(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    let lo = 2.0 * delta / nf;
    let hi = (1.0 - 2.0 * delta) / nf;
    nf * (((0.5 + lo * lo) * (0.5 + hi * hi)).sqrt() - 0.5).sqrt()
}

/// The `Low` accuracy assumed when `phi` is not given explicitly.
pub const DEFAULT_PHI_DELTA: f64 = 0.2;

/// [`phi_optimal`] at [`DEFAULT_PHI_DELTA`]; about 0.51 for `n = 10`.
pub fn default_phi(n: usize) -> f64 {
    phi_optimal(n, DEFAULT_PHI_DELTA)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::InvalidParams(format!(
            "delta = {delta} must lie in (0, 1/4)"
        )));
    }
    Ok(())
}

fn check_m(m: u32) -> Result<()> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::InvalidParams(format!(
            "m = {m} must be a power of two >= 2"
        )));
    }
    Ok(())
}

/// Smallest integer `>= x`, at least `floor`.
fn ceil_at_least(x: f64, floor: u32, bound: &'static str) -> Result<u32> {
    if !x.is_finite() || x > f64::from(u32::MAX) {
        return Err(Error::Infeasible(Infeasibility {
            bound,
            detail: format!("requires {x}"),
        }));
    }
    Ok((x.ceil().max(f64::from(floor))) as u32)
}

/// Smallest integer strictly greater than `x`.
fn strictly_above(x: f64) -> u32 {
    (x.floor() + 1.0).max(1.0) as u32
}

fn ratio_loglog(c: f64, bound: &'static str) -> Result<f64> {
    let ll = c.log2().log2();
    if c.is_nan() || c <= 1.0 || !ll.is_finite() {
        return Err(Error::Infeasible(Infeasibility {
            bound,
            detail: format!("ratio bound c = {c} is not above 1"),
        }));
    }
    Ok(ll)
}

/// Max-index parameters for accuracy `2^-alpha` on `n` entries whose top two
/// values have ratio at least `c`.
pub fn maxidx_theorem_params(n: usize, c: f64, alpha: u32, m: u32) -> Result<CircuitParams> {
    check_m(m)?;
    let a = f64::from(alpha);
    let log_n = (n as f64).log2();
    let log_m = f64::from(m).log2();
    let ll = ratio_loglog(c, "maxidx ratio c")?;
    let t = ceil_at_least(
        ((a + log_n + 1.0).log2() - ll) / log_m,
        1,
        "maxidx rounds t",
    )?;
    let d = ceil_at_least(
        (a + f64::from(t) + 2.0).log2() + f64::from(m - 1) * log_n - 1.0,
        1,
        "maxidx inverse iterations d",
    )?;
    CircuitParams::new(d, d, m, t)
}

/// Comparison parameters for accuracy `2^-alpha` on inputs whose ratio is at
/// least `c`.
///
/// Besides the usual bounds on `t`, `d` and `d'`, both inverses must be
/// accurate to `(c - 1)/(8c)`. The comparison puts the whole error of its
/// reciprocal on `b = 1 - a`, so a reciprocal that is off by more than the
/// gap between the inputs swaps their order; for `LowComp` that gap shrinks
/// like `1/n²`. Within this accuracy the first step still leaves a ratio of
/// `(7c + 1)/(c + 7)`, and `t` is sized for that.
pub fn comp_theorem_params(c: f64, alpha: u32, m: u32) -> Result<CircuitParams> {
    comp_params_for(c, alpha, m, 1.0, "comp ratio c")
}

fn comp_params_for(
    c: f64,
    alpha: u32,
    m: u32,
    t_offset: f64,
    ratio_name: &'static str,
) -> Result<CircuitParams> {
    check_m(m)?;
    let a = f64::from(alpha);
    let log_m = f64::from(m).log2();
    ratio_loglog(c, ratio_name)?;
    let c_eff = (7.0 * c + 1.0) / (c + 7.0);
    let ll = ratio_loglog(c_eff, "comparison ratio after the first step")?;
    let t = ceil_at_least(
        ((a + t_offset).log2() - ll) / log_m,
        1,
        "comparison rounds t",
    )?;

    // iterations k with gap^(2^(k+1)) <= (c-1)/(8c), for |1 - x| <= gap
    let target = -((c - 1.0) / (8.0 * c)).ln();
    let floor = |gap: f64| (target / -gap.ln()).log2() - 1.0;
    let later_gap = 1.0 - 2f64.powi(1 - m as i32);

    let d = ceil_at_least(
        ((a + f64::from(t) + 2.0).log2() + f64::from(m) - 2.0).max(floor(later_gap)),
        1,
        "comparison inverse iterations d",
    )?;
    let d_prime = ceil_at_least(
        ((a + 2.0).log2() - 1.0).max(floor(0.5)),
        1,
        "comparison initial inverse d'",
    )?;
    CircuitParams::new(d, d_prime, m, t)
}

/// Parameters chosen for `Low`, with the intermediate quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowChoice {
    pub params: LowParams,
    pub alpha: u32,
    pub ratio_bound: f64,
}

/// Parameters chosen for `LowComp`, with the intermediate quantities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LowCompChoice {
    pub params: CompParams,
    pub alpha: u32,
    pub ratio_bound: f64,
}

/// `Low` parameters with `delta`-error for inputs within `epsilon/(2n)` of
/// binary. Uses `d = d'`.
pub fn low_params(n: usize, delta: f64, epsilon: f64, m: u32) -> Result<LowChoice> {
    check_delta(delta)?;
    if !(0.0..1.0).contains(&epsilon) {
        if epsilon >= 1.0 {
            return Err(Error::Infeasible(Infeasibility {
                bound: "maxidx ratio c",
                detail: format!(
                    "epsilon = {epsilon} lets the top two entries get arbitrarily close"
                ),
            }));
        }
        return Err(Error::InvalidParams(format!(
            "epsilon = {epsilon} must lie in [0, 1)"
        )));
    }
    let nf = n as f64;
    let alpha = strictly_above(3f64.log2() + 2.0 * nf.log2() - delta.log2() - 1.0);
    let ratio_bound = maxidx_ratio_bound(n, epsilon);
    let params = maxidx_theorem_params(n, ratio_bound, alpha, m)?;
    Ok(LowChoice {
        params,
        alpha,
        ratio_bound,
    })
}

/// `LowComp` parameters with `eta`-error given a `delta`-accurate `Low`, with
/// `phi` set to [`phi_optimal`].
pub fn lowcomp_params(n: usize, delta: f64, eta: f64, m: u32) -> Result<LowCompChoice> {
    check_delta(delta)?;
    check_m(m)?;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParams(format!(
            "eta = {eta} must lie in (0, 1)"
        )));
    }
    let alpha = strictly_above(-eta.log2());
    let ratio_bound = lowcomp_ratio_bound(n, delta);
    let circuit = comp_params_for(ratio_bound, alpha, m, 2.0, "lowcomp ratio c")?;
    Ok(LowCompChoice {
        params: CompParams::new(circuit, phi_optimal(n, delta))?,
        alpha,
        ratio_bound,
    })
}

/// Depth of `Low` (and of `LowComp`) in the convention where constant
/// products are free: `d' + 2 + t(d + log m + 2)`.
pub fn circuit_depth(p: &CircuitParams) -> u64 {
    u64::from(p.d_prime) + 2 + u64::from(p.t) * (u64::from(p.d) + u64::from(p.log_m()) + 2)
}

/// `d + 1 + t(d' + log m + 2)`: [`circuit_depth`] with `d` and `d'` swapped
/// and the additive constant lowered by one. Some statements of the
/// reduction's depth use this form; it is reported for comparison only and
/// does not match what the circuits consume.
pub fn transposed_depth(p: &CircuitParams) -> u64 {
    u64::from(p.d) + 1 + u64::from(p.t) * (u64::from(p.d_prime) + u64::from(p.log_m()) + 2)
}

/// Cost with unit constants:
/// `n³[1 + d'_C + t_C(d_C + log m_C)] + n²[d'_L + t_L(d_L + log m_L + 1)]`.
pub fn unit_complexity(n: usize, pl: &LowParams, pc: &CircuitParams) -> u64 {
    let n = n as u64;
    let comp =
        1 + u64::from(pc.d_prime) + u64::from(pc.t) * (u64::from(pc.d) + u64::from(pc.log_m()));
    let low =
        u64::from(pl.d_prime) + u64::from(pl.t) * (u64::from(pl.d) + u64::from(pl.log_m()) + 1);
    n * n * n * comp + n * n * low
}

/// Exact operation counts of one `Low` evaluation on an `n`-vector.
pub fn low_counts(n: usize, p: &LowParams, last: LastEntry) -> OpCounts {
    let n = n as u64;
    let (d, dp, t, lm) = (
        u64::from(p.d),
        u64::from(p.d_prime),
        u64::from(p.t),
        u64::from(p.log_m()),
    );
    // products and additions spent producing the n outputs of one normalisation
    let (norm_mults, norm_adds) = match last {
        LastEntry::Normalized => (n, 0),
        LastEntry::Complement => (n - 1, n - 1),
    };
    let maxidx_mults = 2 * dp + norm_mults + t * (n * lm + 2 * d + norm_mults);
    let maxidx_adds = (n - 1) + (2 + dp) + norm_adds + t * ((n - 1) + (2 + d) + norm_adds);
    OpCounts {
        mults: maxidx_mults,
        // T_L halving, the 1/n mean, the 1/n scaling, the index dot product
        const_mults: n + 1 + n + (n - 1),
        adds: 2 * n + maxidx_adds + (n - 2),
        bootstrap_events: 0,
    }
}

/// Exact operation counts of one `LowComp` evaluation.
pub fn lowcomp_counts(p: &CircuitParams) -> OpCounts {
    let (d, dp, t, lm) = (
        u64::from(p.d),
        u64::from(p.d_prime),
        u64::from(p.t),
        u64::from(p.log_m()),
    );
    OpCounts {
        mults: 1 + 2 * dp + t * (2 * lm + 2 * d + 1),
        const_mults: 3,
        adds: 6 + dp + t * (d + 4),
        bootstrap_events: 0,
    }
}

fn scaled(c: OpCounts, k: u64) -> OpCounts {
    OpCounts {
        mults: c.mults * k,
        const_mults: c.const_mults * k,
        adds: c.adds * k,
        bootstrap_events: 0,
    }
}

/// Exact operation counts of the optimized reduction of an `n×n` matrix.
///
/// `Low` runs `n + n(n-1)/2` times and `LowComp` runs `Σ j²` times. Each
/// `k`-step of column `j` also spends `2nj + n` products and
/// `(j-1) + nj + n(j-1) + 1 + n` additions on the cumulative update.
pub fn reduction_counts(n: usize, pl: &LowParams, pc: &CircuitParams, last: LastEntry) -> OpCounts {
    let nn = n as u64;
    let mut total = scaled(low_counts(n, pl, last), nn + nn * (nn - 1) / 2);
    for j in 1..nn {
        total += scaled(lowcomp_counts(pc), j * j);
        let step = OpCounts {
            mults: 2 * nn * j + nn,
            const_mults: 0,
            adds: (j - 1) + nn * j + nn * (j - 1) + 1 + nn,
            bootstrap_events: 0,
        };
        total += scaled(step, j);
    }
    total
}

/// Depth figures for `Low`, `LowComp`, and the whole reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthReport {
    pub n: usize,
    /// `D_L`, constant products free.
    pub d_low: u64,
    /// `D_C`, constant products free.
    pub d_comp: u64,
    /// `D_L + D_C + 1`, the depth added by each update of a column.
    pub cofactor: u64,
    /// `n(n-1)/2 · (D_L + D_C + 1)`.
    pub total_depth: u64,
    /// The same figures using [`transposed_depth`] per circuit.
    pub transposed: TransposedDepth,
    /// [`unit_complexity`].
    pub complexity_estimate: u64,
    /// Exact operation counts of our circuits ([`reduction_counts`] with the
    /// default [`LastEntry`]).
    pub counts: OpCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransposedDepth {
    pub d_low: u64,
    pub d_comp: u64,
    pub cofactor: u64,
    pub total_depth: u64,
}

impl DepthReport {
    pub fn mult_count(&self) -> u64 {
        self.counts.mults + self.counts.const_mults
    }

    pub fn add_count(&self) -> u64 {
        self.counts.adds
    }

    /// Bootstraps needed if every `budget` levels must be refreshed.
    pub fn bootstraps_for_budget(&self, budget: u32) -> u64 {
        if budget == 0 {
            return u64::MAX;
        }
        self.total_depth.saturating_sub(1) / u64::from(budget)
    }
}

fn pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

pub fn depth_estimate(n: usize, pl: &LowParams, pc: &CircuitParams) -> DepthReport {
    let d_low = circuit_depth(pl);
    let d_comp = circuit_depth(pc);
    let cofactor = d_low + d_comp + 1;
    let p_low = transposed_depth(pl);
    let p_comp = transposed_depth(pc);
    DepthReport {
        n,
        d_low,
        d_comp,
        cofactor,
        total_depth: pairs(n) * cofactor,
        transposed: TransposedDepth {
            d_low: p_low,
            d_comp: p_comp,
            cofactor: p_low + p_comp + 1,
            total_depth: pairs(n) * (p_low + p_comp + 1),
        },
        complexity_estimate: unit_complexity(n, pl, pc),
        counts: reduction_counts(n, pl, pc, LastEntry::default()),
    }
}

/// Depths of `Low` and `LowComp` measured by running them on fresh inputs.
/// The depth of both circuits depends only on `n` and the parameters.
pub fn measured_depths(
    n: usize,
    pl: &LowParams,
    pc: &CompParams,
    config: EvalConfig,
) -> Result<(u64, u64)> {
    let mut ev = Evaluator::new(EvalConfig {
        check_domains: false,
        level_budget: None,
        ..config
    });
    let v = ev.fresh_vec(&vec![0.0; n]);
    let low = low_circuit(&mut ev, &v, pl)?;
    let (x, y) = (ev.fresh(0.0), ev.fresh(1.0));
    let omega = lowcomp(&mut ev, x, y, pc, n)?;
    Ok((u64::from(low.depth()), u64::from(omega.depth())))
}
