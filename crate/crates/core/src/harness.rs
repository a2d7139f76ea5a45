//! Batch experiments: built-in filtrations, random matrix sweeps, and
//! per-entry error dumps.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitParams, CompParams, EvalConfig};
use crate::error::{Error, Result};
use crate::exact::reduce_exact;
use crate::he_reduce::{he_reduce_optimized, round_and_verify, ReduceOptions, VerifyReport};
use crate::matrix::BinaryMatrix;
use crate::params::{self, depth_estimate};
use crate::simplicial::Filtration;

/// Names accepted by [`builtin_example`].
pub const EXAMPLES: &[&str] = &["square"];

/// A built-in filtration.
///
/// `"square"`: four points `a, b, c, d` (ids 0 to 3), five edges and two
/// triangles, inserted as `∅, a, b, c, ab, ac, bc, d, cd, bd, bcd, abc` at
/// scales `0, 0, 1, 2, ..., 10` (every simplex after `∅` at its index minus
/// one). Its finite diagrams are H0 = {(1, 3), (2, 4), (6, 7)} and
/// H1 = {(5, 10), (8, 9)}, and `a` is the essential H0 class.
pub fn builtin_example(name: &str) -> Result<Filtration> {
    match name {
        "square" => {
            let lists: [&[u32]; 12] = [
                &[],
                &[0],
                &[1],
                &[2],
                &[0, 1],
                &[0, 2],
                &[1, 2],
                &[3],
                &[2, 3],
                &[1, 3],
                &[1, 2, 3],
                &[0, 1, 2],
            ];
            let f = Filtration::from_vertex_lists(&lists)?;
            let scales = (0..lists.len())
                .map(|i| i.saturating_sub(1) as f64)
                .collect();
            Ok(Filtration::new(f.simplices().to_vec(), scales))
        }
        other => Err(Error::UnknownExample(other.to_string())),
    }
}

/// A random strictly upper triangular matrix.
///
/// Entry `(i, j)`, `i < j`, is 1 with probability `density`. Entries are
/// drawn column by column, top to bottom, from ChaCha8 seeded with `seed`
/// on stream `index`, so each `(seed, index)` names one matrix on every
/// platform.
pub fn sample_matrix(n: usize, density: f64, seed: u64, index: u64) -> BinaryMatrix {
    assert!(
        (0.0..=1.0).contains(&density),
        "density {density} outside [0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut m = BinaryMatrix::zeros(n);
    for j in 0..n {
        for i in 0..j {
            m.set(i, j, rng.gen_bool(density));
        }
    }
    m
}

/// `"(d, d', m, t)"` strings in files.
mod tuple_str {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::circuits::CircuitParams;

    pub fn serialize<S: Serializer>(p: &CircuitParams, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CircuitParams, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// One grid point: `Low` and `Comp` tuples and an optional threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    #[serde(with = "tuple_str")]
    pub pl: CircuitParams,
    #[serde(with = "tuple_str")]
    pub pc: CircuitParams,
    /// Defaults to [`params::default_phi`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
}

impl ParamPair {
    pub fn new(pl: CircuitParams, pc: CircuitParams) -> Self {
        Self { pl, pc, phi: None }
    }

    pub fn comp_params(&self, n: usize) -> Result<CompParams> {
        CompParams::new(self.pc, self.phi.unwrap_or_else(|| params::default_phi(n)))
    }
}

/// The three parameter pairs of the standard accuracy experiment: a
/// relaxed `Comp`, a relaxed `Comp` with a stronger `Low`, and the cheapest
/// pair that reduced every sample.
pub fn reference_grid() -> Vec<ParamPair> {
    let p = |s: &str| s.parse::<CircuitParams>().expect("valid tuple");
    vec![
        ParamPair::new(p("3,3,2,6"), p("3,3,2,11")),
        ParamPair::new(p("3,3,2,7"), p("3,3,2,11")),
        ParamPair::new(p("3,3,2,6"), p("3,3,2,12")),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_density")]
    pub density: f64,
    pub grid: Vec<ParamPair>,
    #[serde(default)]
    pub eval: EvalConfig,
}

fn default_density() -> f64 {
    0.5
}

impl SweepConfig {
    pub fn new(n: usize, trials: u64, seed: u64, grid: Vec<ParamPair>) -> Self {
        Self {
            n,
            trials,
            seed,
            density: default_density(),
            grid,
            eval: EvalConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "n = {} must be at least 2",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::InvalidParams(format!(
                "density = {} must lie in [0, 1]",
                self.density
            )));
        }
        for pair in &self.grid {
            pair.pl.validate()?;
            pair.comp_params(self.n)?;
        }
        Ok(())
    }
}

/// Aggregates for one parameter pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(with = "tuple_str")]
    pub pl: CircuitParams,
    #[serde(with = "tuple_str")]
    pub pc: CircuitParams,
    pub phi: f64,
    pub trials: u64,
    pub within_half_n: u64,
    pub within_half: u64,
    pub within_half_n_rate: f64,
    pub within_half_rate: f64,
    pub rounded_equal: u64,
    pub pairs_match: u64,
    pub duplicate_low_trials: u64,
    pub escaped_trials: u64,
    /// Mean of the per-trial maximum error over trials where it is finite.
    pub mean_max_error: f64,
    pub worst_max_error: f64,
    pub nonfinite_trials: u64,
    /// Trials whose run returned an error instead of a matrix.
    pub errored_trials: u64,
    /// Sample indices that missed the `1/(2n)` bound.
    pub failing_indices: Vec<u64>,
    /// `n(n-1)/2 · (D_L + D_C + 1)` with constant products free.
    pub depth: u64,
    /// Deepest output entry seen by the tracker.
    pub depth_measured: u32,
    pub mult_count: u64,
    pub add_count: u64,
    pub bootstrap_events: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

struct Trial {
    index: u64,
    report: Option<VerifyReport>,
    depth: u32,
    counts: crate::circuits::OpCounts,
}

fn run_pair(cfg: &SweepConfig, pair: &ParamPair) -> Result<SweepRow> {
    let pc = pair.comp_params(cfg.n)?;
    let opts = ReduceOptions {
        eval: cfg.eval,
        verify: false,
    };
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|index| {
            let delta = sample_matrix(cfg.n, cfg.density, cfg.seed, index);
            match he_reduce_optimized(&delta, &pair.pl, &pc, &opts) {
                Ok(run) => Trial {
                    index,
                    report: Some(round_and_verify(&run.matrix, &delta)),
                    depth: run.stats.depth,
                    counts: run.stats.counts,
                },
                Err(_) => Trial {
                    index,
                    report: None,
                    depth: 0,
                    counts: Default::default(),
                },
            }
        })
        .collect();

    let est = depth_estimate(cfg.n, &pair.pl, &pair.pc);
    let mut row = SweepRow {
        pl: pair.pl,
        pc: pair.pc,
        phi: pc.phi,
        trials: cfg.trials,
        within_half_n: 0,
        within_half: 0,
        within_half_n_rate: 0.0,
        within_half_rate: 0.0,
        rounded_equal: 0,
        pairs_match: 0,
        duplicate_low_trials: 0,
        escaped_trials: 0,
        mean_max_error: 0.0,
        worst_max_error: 0.0,
        nonfinite_trials: 0,
        errored_trials: 0,
        failing_indices: Vec::new(),
        depth: est.total_depth,
        depth_measured: 0,
        mult_count: 0,
        add_count: 0,
        bootstrap_events: 0,
    };
    let mut finite_sum = 0.0;
    for t in &trials {
        let Some(r) = &t.report else {
            row.errored_trials += 1;
            row.failing_indices.push(t.index);
            continue;
        };
        row.within_half_n += u64::from(r.within_half_n);
        row.within_half += u64::from(r.within_half);
        row.rounded_equal += u64::from(r.rounded_equals_exact);
        row.pairs_match += u64::from(r.pairs_match);
        row.duplicate_low_trials += u64::from(!r.rounded_is_reduced);
        row.escaped_trials += u64::from(r.escaped_unit_interval());
        if r.max_error.is_finite() {
            finite_sum += r.max_error;
            row.worst_max_error = row.worst_max_error.max(r.max_error);
        } else {
            row.nonfinite_trials += 1;
        }
        if !r.within_half_n {
            row.failing_indices.push(t.index);
        }
        row.depth_measured = row.depth_measured.max(t.depth);
        row.mult_count = row.mult_count.max(t.counts.mults + t.counts.const_mults);
        row.add_count = row.add_count.max(t.counts.adds);
        row.bootstrap_events = row.bootstrap_events.max(t.counts.bootstrap_events);
    }
    let finite = cfg.trials - row.errored_trials - row.nonfinite_trials;
    row.mean_max_error = if finite > 0 {
        finite_sum / finite as f64
    } else {
        f64::NAN
    };
    row.within_half_n_rate = row.within_half_n as f64 / cfg.trials as f64;
    row.within_half_rate = row.within_half as f64 / cfg.trials as f64;
    Ok(row)
}

/// Runs every grid pair on the same `trials` sampled matrices.
///
/// Trials run in parallel; results are gathered in index order, so the
/// report does not depend on scheduling. A failing trial is counted, never
/// fatal.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let rows = cfg
        .grid
        .iter()
        .map(|pair| run_pair(cfg, pair))
        .collect::<Result<_>>()?;
    Ok(SweepReport {
        config: cfg.clone(),
        rows,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    pl: String,
    pc: String,
    phi: f64,
    trials: u64,
    within_half_n_rate: f64,
    within_half_rate: f64,
    mean_max_error: f64,
    worst_max_error: f64,
    duplicate_low_trials: u64,
    escaped_trials: u64,
    errored_trials: u64,
    depth: u64,
    depth_measured: u32,
    mult_count: u64,
    add_count: u64,
    failing_indices: &'a str,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            let failing: Vec<String> = r.failing_indices.iter().map(u64::to_string).collect();
            let failing = failing.join(" ");
            w.serialize(CsvRow {
                pl: r.pl.to_string(),
                pc: r.pc.to_string(),
                phi: r.phi,
                trials: r.trials,
                within_half_n_rate: r.within_half_n_rate,
                within_half_rate: r.within_half_rate,
                mean_max_error: r.mean_max_error,
                worst_max_error: r.worst_max_error,
                duplicate_low_trials: r.duplicate_low_trials,
                escaped_trials: r.escaped_trials,
                errored_trials: r.errored_trials,
                depth: r.depth,
                depth_measured: r.depth_measured,
                mult_count: r.mult_count,
                add_count: r.add_count,
                failing_indices: &failing,
            })?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Writes `sweep.json` and `sweep.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("sweep.json"), self.to_json())?;
        fs::write(dir.join("sweep.csv"), self.to_csv()?)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct ErrorCell {
    row: usize,
    col: usize,
    approx: f64,
    exact: u8,
    abs_error: f64,
    error_ge_half: bool,
    above_one: bool,
}

/// Reduces `delta`, writes one CSV line per entry of `|R' - R|` with flags
/// for errors of at least 1/2 and values above 1, and returns the summary.
pub fn emit_error_matrix(
    delta: &BinaryMatrix,
    pl: &CircuitParams,
    pc: &CompParams,
    opts: &ReduceOptions,
    out: &Path,
) -> Result<VerifyReport> {
    let run = he_reduce_optimized(delta, pl, pc, opts)?;
    let exact = reduce_exact(delta);
    let mut w = csv::Writer::from_path(out)?;
    let n = delta.n();
    for i in 0..n {
        for j in 0..n {
            let approx = run.matrix.value(i, j);
            let e = u8::from(exact.get(i, j));
            let abs_error = (approx - f64::from(e)).abs();
            w.serialize(ErrorCell {
                row: i,
                col: j,
                approx,
                exact: e,
                abs_error,
                error_ge_half: abs_error.is_nan() || abs_error >= 0.5,
                above_one: approx > 1.0,
            })?;
        }
    }
    w.flush()?;
    Ok(round_and_verify(&run.matrix, delta))
}
