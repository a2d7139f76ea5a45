use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use hetda::circuits::{CircuitParams, CompParams, EvalConfig, LastEntry};
use hetda::error::{Error, Result};
use hetda::exact::{self, reduce_exact};
use hetda::harness::{self, ParamPair, SweepConfig};
use hetda::he_reduce::{self, ReduceOptions};
use hetda::matrix::BinaryMatrix;
use hetda::params;
use hetda::simplicial::{build_boundary_matrix, extract_diagrams, Filtration};

/// Persistent homology boundary-matrix reduction, exact and with
/// HE-compatible arithmetic circuits.
#[derive(Parser)]
#[command(name = "hetda", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in filtration as JSON.
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce a filtration or matrix exactly.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce with the approximate circuits and report depth and accuracy.
    HeReduce {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Run the exact reduction alongside and report errors.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = VariantArg::Optimized)]
        variant: VariantArg,
        /// Also write the approximate matrix (row-major JSON) here.
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy sweep over random strictly upper triangular matrices.
    Sweep {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// JSON list of {"pl": "3,3,2,6", "pc": "3,3,2,12", "phi"?: 0.5}.
        /// Defaults to the three reference pairs.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[command(flatten)]
        eval: EvalArgs,
        /// Directory for sweep.json and sweep.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Parameters and depth from error budgets.
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 2)]
        m: u32,
    },
    /// Per-entry error CSV of an approximate reduction.
    ErrorMatrix {
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Optimized,
}

#[derive(Clone, Copy, ValueEnum)]
enum LastEntryArg {
    Normalized,
    Complement,
}

#[derive(Args)]
struct EvalArgs {
    /// Do not charge a level for ciphertext × constant products.
    #[arg(long)]
    free_constant_mult: bool,
    /// Record a bootstrap whenever a value exceeds this many levels.
    #[arg(long)]
    level_budget: Option<u32>,
    /// How the max-index circuit forms its last coordinate.
    #[arg(long, value_enum, default_value_t = LastEntryArg::Normalized)]
    last_entry: LastEntryArg,
}

impl EvalArgs {
    fn config(&self) -> EvalConfig {
        EvalConfig {
            charge_constant_mult: !self.free_constant_mult,
            level_budget: self.level_budget,
            last_entry: match self.last_entry {
                LastEntryArg::Normalized => LastEntry::Normalized,
                LastEntryArg::Complement => LastEntry::Complement,
            },
            ..EvalConfig::default()
        }
    }
}

#[derive(Args)]
struct ParamArgs {
    /// Low tuple d,d',m,t.
    #[arg(long, requires = "pc")]
    pl: Option<CircuitParams>,
    /// Comp tuple d,d',m,t.
    #[arg(long, requires = "pl")]
    pc: Option<CircuitParams>,
    /// LowComp threshold; defaults to the optimum for delta (or 0.2).
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long, conflicts_with_all = ["pl", "pc"], requires_all = ["eta", "epsilon"])]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 2)]
    m: u32,
    /// JSON file holding either explicit tuples or error budgets.
    #[arg(long, conflicts_with_all = ["pl", "pc", "delta"])]
    params_from: Option<PathBuf>,
}

/// Contents of a `--params-from` file.
#[derive(Deserialize)]
#[serde(untagged)]
enum ParamsFile {
    Explicit(ParamPair),
    Budget {
        delta: f64,
        eta: f64,
        epsilon: f64,
        #[serde(default = "two")]
        m: u32,
    },
}

fn two() -> u32 {
    2
}

impl ParamArgs {
    fn resolve(&self, n: usize) -> Result<(CircuitParams, CompParams)> {
        let from_budget = |delta: f64, eta: f64, epsilon: f64, m: u32, phi: Option<f64>| {
            let low = params::low_params(n, delta, epsilon, m)?;
            let mut comp = params::lowcomp_params(n, delta, eta, m)?.params;
            if let Some(phi) = phi {
                comp = CompParams::new(comp.circuit, phi)?;
            }
            Ok((low.params, comp))
        };
        if let Some(path) = &self.params_from {
            return match serde_json::from_str::<ParamsFile>(&read_file(path)?)? {
                ParamsFile::Explicit(mut pair) => {
                    pair.phi = self.phi.or(pair.phi);
                    Ok((pair.pl, pair.comp_params(n)?))
                }
                ParamsFile::Budget {
                    delta,
                    eta,
                    epsilon,
                    m,
                } => from_budget(delta, eta, epsilon, m, self.phi),
            };
        }
        match (self.pl, self.pc, self.delta, self.eta, self.epsilon) {
            (Some(pl), Some(pc), ..) => {
                let pair = ParamPair {
                    pl,
                    pc,
                    phi: self.phi,
                };
                Ok((pl, pair.comp_params(n)?))
            }
            (_, _, Some(delta), Some(eta), Some(epsilon)) => {
                from_budget(delta, eta, epsilon, self.m, self.phi)
            }
            _ => Err(Error::InvalidParams(
                "give --pl and --pc, or --delta, --eta and --epsilon, or --params-from".into(),
            )),
        }
    }
}

/// A filtration (with scales) or a bare matrix.
enum Input {
    Filtration(Filtration),
    Matrix(BinaryMatrix),
}

impl Input {
    fn read(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        if text.trim_start().starts_with('{') {
            Ok(Input::Filtration(Filtration::from_json(&text)?))
        } else {
            Ok(Input::Matrix(BinaryMatrix::parse(&text)?))
        }
    }

    fn matrix(&self) -> Result<BinaryMatrix> {
        match self {
            Input::Filtration(f) => Ok(build_boundary_matrix(f)?.matrix),
            Input::Matrix(m) => Ok(m.clone()),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => stdout(&format!("{text}\n")),
    }
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn with_path(path: &Path, e: io::Error) -> Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display())).into()
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| with_path(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| with_path(path, e))
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Example { name, out } => {
            let f = harness::builtin_example(&name)?;
            emit(out.as_deref(), &f.to_json())
        }
        Command::Reduce { input, out } => {
            let input = Input::read(&input)?;
            let delta = input.matrix()?;
            let r = reduce_exact(&delta);
            let mut report = json!({
                "reduced": r.to_rows(),
                "pairs": exact::pairs(&r),
                "zero_columns": (0..r.n()).filter(|&j| r.is_zero_column(j)).collect::<Vec<_>>(),
            });
            if let Input::Filtration(f) = &input {
                let b = build_boundary_matrix(f)?;
                report["diagrams"] = extract_diagrams(&r, &b.dims, &b.scales)?.to_json();
            }
            emit(out.as_deref(), &pretty(&report))
        }
        Command::HeReduce {
            input,
            params,
            eval,
            verify,
            variant,
            matrix_out,
            out,
        } => {
            let delta = Input::read(&input)?.matrix()?;
            let n = delta.n();
            let (pl, pc) = params.resolve(n)?;
            let opts = ReduceOptions {
                eval: eval.config(),
                verify,
            };
            let run = match variant {
                VariantArg::Plain => he_reduce::he_reduce(&delta, &pl, &pc, &opts)?,
                VariantArg::Optimized => he_reduce::he_reduce_optimized(&delta, &pl, &pc, &opts)?,
            };
            let est = params::depth_estimate(n, &pl, &pc.circuit);
            let (d_low, d_comp) = params::measured_depths(n, &pl, &pc, opts.eval)?;
            let pairs = (n * (n - 1) / 2) as u64;
            let mut report = json!({
                "max_error": null,
                "within_half_n": null,
                "within_half": null,
                "pairs_match": null,
                "depth_measured": run.stats.depth,
                "depth_formula": est.total_depth,
                "depth_bound_measured_circuits": pairs * (d_low + d_comp + 1),
                "mults": run.stats.counts.mults + run.stats.counts.const_mults,
                "adds": run.stats.counts.adds,
                "bootstrap_events": run.stats.counts.bootstrap_events,
                "params": {"pl": pl.to_string(), "pc": pc.circuit.to_string(), "phi": pc.phi},
                "range_escapes": run.stats.range_escapes,
            });
            if verify {
                let v = he_reduce::round_and_verify(&run.matrix, &delta);
                report["max_error"] = json!(v.max_error);
                report["within_half_n"] = json!(v.within_half_n);
                report["within_half"] = json!(v.within_half);
                report["pairs_match"] = json!(v.pairs_match);
                report["verify"] = serde_json::to_value(&v)?;
                report["snapshots"] = serde_json::to_value(&run.stats.snapshots)?;
            }
            if let Some(path) = matrix_out {
                write_file(&path, &pretty(&run.matrix.to_rows()))?;
            }
            emit(out.as_deref(), &pretty(&report))
        }
        Command::Sweep {
            n,
            trials,
            seed,
            density,
            grid,
            eval,
            out,
        } => {
            let grid = match grid {
                Some(path) => serde_json::from_str(&read_file(&path)?)?,
                None => harness::reference_grid(),
            };
            let cfg = SweepConfig {
                density,
                eval: eval.config(),
                ..SweepConfig::new(n, trials, seed, grid)
            };
            let report = harness::run_sweep(&cfg)?;
            report.write(&out)?;
            stdout(&report.to_csv()?)
        }
        Command::Params {
            n,
            delta,
            eta,
            epsilon,
            m,
        } => {
            let low = params::low_params(n, delta, epsilon, m)?;
            let comp = params::lowcomp_params(n, delta, eta, m)?;
            let depth = params::depth_estimate(n, &low.params, &comp.params.circuit);
            let report = json!({
                "low": {
                    "params": low.params.to_string(),
                    "alpha": low.alpha,
                    "ratio_bound": low.ratio_bound,
                },
                "lowcomp": {
                    "params": comp.params.circuit.to_string(),
                    "phi": comp.params.phi,
                    "alpha": comp.alpha,
                    "ratio_bound": comp.ratio_bound,
                },
                "depth": depth,
            });
            emit(None, &pretty(&report))
        }
        Command::ErrorMatrix {
            input,
            params,
            eval,
            out,
        } => {
            let delta = Input::read(&input)?.matrix()?;
            let (pl, pc) = params.resolve(delta.n())?;
            let opts = ReduceOptions {
                eval: eval.config(),
                verify: false,
            };
            let report = harness::emit_error_matrix(&delta, &pl, &pc, &opts, &out)?;
            emit(None, &pretty(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}
