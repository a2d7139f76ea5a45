//! Boundary matrix reduction built only from additions and multiplications.
//!
//! The data-dependent `while` loop of the textbook reduction becomes a fixed
//! double loop: column `j` is compared against every earlier column `j` times,
//! and each comparison gates a mod-2 column addition with an approximately
//! binary `Ω`. Nothing here branches on the (notionally encrypted) values.
//!
//! Two variants are provided. [`he_reduce`] recomputes `Low` after every
//! gated update. [`he_reduce_optimized`] folds the `j` gated updates of one
//! pass into a single cumulative update, so `Low` runs once per pass and the
//! depth grows quadratically in `n` instead of cubically.

use serde::Serialize;

use crate::circuits::{
    gated_update, low_circuit, lowcomp, CompParams, EvalConfig, Evaluator, LowParams, OpCounts,
    TrackedValue,
};
use crate::error::{Error, Result};
use crate::exact::{self, low_exact};
use crate::matrix::BinaryMatrix;

/// Entries outside this interval are counted as range escapes.
pub const RANGE: (f64, f64) = (-0.5, 1.5);

/// An approximately binary matrix together with the last `Low` estimate of
/// each column.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMatrix {
    columns: Vec<Vec<TrackedValue>>,
    low_cache: Vec<TrackedValue>,
}

impl ApproxMatrix {
    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[TrackedValue] {
        &self.columns[j]
    }

    pub fn low_estimates(&self) -> &[TrackedValue] {
        &self.low_cache
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i].value()
    }

    /// Row-major plaintext values.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.value(i, j)).collect())
            .collect()
    }

    /// Deepest entry.
    pub fn depth(&self) -> u32 {
        self.columns
            .iter()
            .flatten()
            .map(TrackedValue::depth)
            .max()
            .unwrap_or(0)
    }

    /// Rounds every entry to the nearest of 0 and 1 (ties and anything
    /// above go to 1).
    pub fn round(&self) -> BinaryMatrix {
        let cols = self
            .columns
            .iter()
            .map(|c| c.iter().map(|x| x.value() >= 0.5).collect())
            .collect();
        BinaryMatrix::from_columns(cols).expect("square by construction")
    }
}

/// Which loop body to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `Low` after every gated update.
    Plain,
    /// One cumulative update and one `Low` per pass.
    Optimized,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReduceOptions {
    /// Evaluator settings. Domain checks are always switched off inside a
    /// reduction: out-of-range values are reported, never rejected.
    pub eval: EvalConfig,
    /// Run the exact reduction alongside and snapshot per-step errors.
    pub verify: bool,
}

/// Errors after one pass (`k`) over column `j`, against the exact run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepSnapshot {
    pub j: usize,
    pub k: usize,
    /// `max_i |Δ'_j[i] - R_j[i]|`
    pub column_error: f64,
    /// `|L_j - low(R_j)|`
    pub low_error: f64,
    /// Largest `|Ω - [low(R_j0) = low(R_j)]|` in the pass.
    pub omega_error: f64,
}

/// Everything observed during one reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunStats {
    pub variant: Variant,
    pub counts: OpCounts,
    /// Deepest entry of the output.
    pub depth: u32,
    /// Number of `Ω` evaluated.
    pub omega_count: usize,
    /// Largest `min(Ω, 1 - Ω)`; small means every gate was nearly binary.
    pub omega_max_ambiguity: f64,
    /// Passes in which more than one `Ω` exceeded 1/2.
    pub multi_match_passes: usize,
    /// Of those, passes in which the current column was not near zero. Zero
    /// for a correct optimized run; the plain variant recomputes `L_j` after
    /// each update and can match several columns in one pass.
    pub multi_match_nonzero_passes: usize,
    /// Entry updates that left [`RANGE`] (or were not finite).
    pub range_escapes: usize,
    /// First `(j, k)` at which an entry escaped.
    pub first_escape: Option<(usize, usize)>,
    /// Present only when verifying.
    pub snapshots: Option<Vec<StepSnapshot>>,
}

impl RunStats {
    fn new(variant: Variant, verify: bool) -> Self {
        Self {
            variant,
            counts: OpCounts::default(),
            depth: 0,
            omega_count: 0,
            omega_max_ambiguity: 0.0,
            multi_match_passes: 0,
            multi_match_nonzero_passes: 0,
            range_escapes: 0,
            first_escape: None,
            snapshots: verify.then(Vec::new),
        }
    }

    fn record_omegas(&mut self, omegas: &[f64], column: &[TrackedValue]) {
        self.omega_count += omegas.len();
        for &w in omegas {
            self.omega_max_ambiguity = self.omega_max_ambiguity.max(w.min(1.0 - w));
        }
        if omegas.iter().filter(|&&w| w > 0.5).count() > 1 {
            self.multi_match_passes += 1;
            if column.iter().any(|x| x.value() >= 0.5) {
                self.multi_match_nonzero_passes += 1;
            }
        }
    }

    fn record_column(&mut self, column: &[TrackedValue], j: usize, k: usize) {
        let escapes = column
            .iter()
            .filter(|x| !(RANGE.0..=RANGE.1).contains(&x.value()))
            .count();
        if escapes > 0 {
            self.range_escapes += escapes;
            self.first_escape.get_or_insert((j, k));
        }
    }
}

/// The output matrix and run statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct HeRun {
    pub matrix: ApproxMatrix,
    pub stats: RunStats,
}

/// Exact counterpart that mirrors the approximate loop structure.
struct Lockstep {
    cols: Vec<Vec<bool>>,
}

impl Lockstep {
    fn low(&self, j: usize) -> usize {
        low_exact(&self.cols[j])
    }

    fn indicator(&self, j0: usize, j: usize) -> bool {
        self.low(j0) == self.low(j)
    }

    /// `Σ Ω (x - y)² + (1 - Σ Ω) x` over the integers with exact `Ω`.
    fn cumulative(&mut self, j: usize) {
        let matches: Vec<usize> = (0..j).filter(|&j0| self.indicator(j0, j)).collect();
        let n = self.cols[j].len();
        let new: Vec<bool> = (0..n)
            .map(|i| {
                let x = i64::from(self.cols[j][i]);
                let left: i64 = matches
                    .iter()
                    .map(|&j0| (x - i64::from(self.cols[j0][i])).pow(2))
                    .sum();
                let v = left + (1 - matches.len() as i64) * x;
                debug_assert!(v == 0 || v == 1, "exact cumulative update left {{0, 1}}");
                v == 1
            })
            .collect();
        self.cols[j] = new;
    }

    fn gated(&mut self, j0: usize, j: usize) {
        if self.indicator(j0, j) {
            for i in 0..self.cols[j].len() {
                let b = self.cols[j0][i];
                self.cols[j][i] ^= b;
            }
        }
    }

    fn snapshot(
        &self,
        column: &[TrackedValue],
        low: f64,
        j: usize,
        k: usize,
        omega_error: f64,
    ) -> StepSnapshot {
        let column_error = column
            .iter()
            .zip(&self.cols[j])
            .map(|(x, &b)| (x.value() - f64::from(u8::from(b))).abs())
            .fold(0.0, f64::max);
        StepSnapshot {
            j,
            k,
            column_error,
            low_error: (low - self.low(j) as f64).abs(),
            omega_error,
        }
    }
}

fn check_input(delta: &BinaryMatrix, pl: &LowParams, pc: &CompParams) -> Result<()> {
    pl.validate()?;
    pc.validate()?;
    if !delta.is_strictly_upper() {
        return Err(Error::Matrix(
            "boundary matrix must be strictly upper triangular".into(),
        ));
    }
    if delta.n() < 2 {
        return Err(Error::Matrix("matrix must be at least 2x2".into()));
    }
    Ok(())
}

/// Reduces `delta` with `Low` recomputed after every gated update.
pub fn he_reduce(
    delta: &BinaryMatrix,
    pl: &LowParams,
    pc: &CompParams,
    opts: &ReduceOptions,
) -> Result<HeRun> {
    run(delta, pl, pc, opts, Variant::Plain)
}

/// Reduces `delta` with one cumulative update and one `Low` per pass.
pub fn he_reduce_optimized(
    delta: &BinaryMatrix,
    pl: &LowParams,
    pc: &CompParams,
    opts: &ReduceOptions,
) -> Result<HeRun> {
    run(delta, pl, pc, opts, Variant::Optimized)
}

fn run(
    delta: &BinaryMatrix,
    pl: &LowParams,
    pc: &CompParams,
    opts: &ReduceOptions,
    variant: Variant,
) -> Result<HeRun> {
    check_input(delta, pl, pc)?;
    let n = delta.n();
    let mut ev = Evaluator::new(EvalConfig {
        check_domains: false,
        ..opts.eval
    });
    let mut stats = RunStats::new(variant, opts.verify);
    let mut oracle = opts.verify.then(|| Lockstep {
        cols: delta.columns().to_vec(),
    });

    let mut cols: Vec<Vec<TrackedValue>> = delta
        .columns()
        .iter()
        .map(|c| {
            c.iter()
                .map(|&b| ev.fresh(f64::from(u8::from(b))))
                .collect()
        })
        .collect();
    let mut lows = Vec::with_capacity(n);
    lows.push(low_circuit(&mut ev, &cols[0], pl)?);

    for j in 1..n {
        lows.push(low_circuit(&mut ev, &cols[j], pl)?);
        for k in 0..j {
            let mut omegas = Vec::with_capacity(j);
            let mut omega_error: f64 = 0.0;
            match variant {
                Variant::Plain => {
                    for j0 in 0..j {
                        let omega = lowcomp(&mut ev, lows[j0], lows[j], pc, n)?;
                        if let Some(o) = oracle.as_mut() {
                            let truth = f64::from(u8::from(o.indicator(j0, j)));
                            omega_error = omega_error.max((omega.value() - truth).abs());
                            o.gated(j0, j);
                        }
                        omegas.push(omega.value());
                        cols[j] = gated_update(&mut ev, &cols[j], &cols[j0], omega);
                        stats.record_column(&cols[j], j, k);
                        lows[j] = low_circuit(&mut ev, &cols[j], pl)?;
                    }
                }
                Variant::Optimized => {
                    let mut cum_omega: Option<TrackedValue> = None;
                    let mut cum_left: Option<Vec<TrackedValue>> = None;
                    for j0 in 0..j {
                        let omega = lowcomp(&mut ev, lows[j0], lows[j], pc, n)?;
                        if let Some(o) = oracle.as_ref() {
                            let truth = f64::from(u8::from(o.indicator(j0, j)));
                            omega_error = omega_error.max((omega.value() - truth).abs());
                        }
                        omegas.push(omega.value());
                        let term: Vec<TrackedValue> = cols[j]
                            .iter()
                            .zip(&cols[j0])
                            .map(|(&x, &y)| {
                                let diff = ev.sub(x, y);
                                let sq = ev.square(diff);
                                ev.mul(omega, sq)
                            })
                            .collect();
                        cum_omega = Some(match cum_omega {
                            None => omega,
                            Some(c) => ev.add(c, omega),
                        });
                        cum_left = Some(match cum_left {
                            None => term,
                            Some(acc) => {
                                acc.iter().zip(&term).map(|(&a, &b)| ev.add(a, b)).collect()
                            }
                        });
                    }
                    let keep = ev.const_sub(1.0, cum_omega.expect("j >= 1"));
                    let left = cum_left.expect("j >= 1");
                    cols[j] = cols[j]
                        .iter()
                        .zip(&left)
                        .map(|(&x, &l)| {
                            let stay = ev.mul(keep, x);
                            ev.add(l, stay)
                        })
                        .collect();
                    stats.record_column(&cols[j], j, k);
                    lows[j] = low_circuit(&mut ev, &cols[j], pl)?;
                    if let Some(o) = oracle.as_mut() {
                        o.cumulative(j);
                    }
                }
            }
            stats.record_omegas(&omegas, &cols[j]);
            if let (Some(o), Some(snaps)) = (oracle.as_ref(), stats.snapshots.as_mut()) {
                snaps.push(o.snapshot(&cols[j], lows[j].value(), j, k, omega_error));
            }
        }
    }

    stats.counts = ev.take_counts();
    let matrix = ApproxMatrix {
        columns: cols,
        low_cache: lows,
    };
    stats.depth = matrix.depth();
    Ok(HeRun { matrix, stats })
}

/// Comparison of an approximate result against the exact reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    /// `max |R' - R|` over all entries (infinite if any entry is not finite).
    pub max_error: f64,
    /// `max_error < 1/(2n)`
    pub within_half_n: bool,
    /// `max_error < 1/2`
    pub within_half: bool,
    /// `Round(R') = R`
    pub rounded_equals_exact: bool,
    /// No two nonzero columns of `Round(R')` share a low.
    pub rounded_is_reduced: bool,
    /// The first duplicate low found in `Round(R')`, as `(col, col, row)`.
    pub duplicate_low: Option<(usize, usize, usize)>,
    /// `Round(R')` yields the same `(low, column)` pairs as `R`, even if
    /// other entries differ.
    pub pairs_match: bool,
    pub entries_above_one: usize,
    pub entries_below_zero: usize,
    /// Entries with `|R' - R| ≥ 1/2`.
    pub entries_wrong: usize,
}

impl VerifyReport {
    pub fn escaped_unit_interval(&self) -> bool {
        self.entries_above_one > 0 || self.entries_below_zero > 0
    }
}

/// Rounds `approx` and compares it with `reduce_exact(delta)`.
pub fn round_and_verify(approx: &ApproxMatrix, delta: &BinaryMatrix) -> VerifyReport {
    let exact = exact::reduce_exact(delta);
    let n = delta.n();
    let mut max_error: f64 = 0.0;
    let (mut above, mut below, mut wrong) = (0, 0, 0);
    for j in 0..n {
        for i in 0..n {
            let v = approx.value(i, j);
            let e = (v - f64::from(u8::from(exact.get(i, j)))).abs();
            let e = if e.is_nan() { f64::INFINITY } else { e };
            max_error = max_error.max(e);
            above += usize::from(v > 1.0);
            below += usize::from(v < 0.0);
            wrong += usize::from(e >= 0.5);
        }
    }
    let rounded = approx.round();
    let duplicate_low = exact::duplicate_low(&rounded);
    VerifyReport {
        n,
        max_error,
        within_half_n: max_error < 1.0 / (2 * n) as f64,
        within_half: max_error < 0.5,
        rounded_equals_exact: rounded == exact,
        rounded_is_reduced: duplicate_low.is_none(),
        duplicate_low,
        pairs_match: exact::pairs(&rounded) == exact::pairs(&exact),
        entries_above_one: above,
        entries_below_zero: below,
        entries_wrong: wrong,
    }
}
