//! HE-compatible approximate primitives evaluated over [`TrackedValue`]s.
//!
//! Everything here is built from additions and multiplications only, so the
//! same circuits could run on ciphertexts of a leveled scheme. The
//! [`Evaluator`] records the multiplicative depth and the operation counts.

mod comp;
mod inv;
mod maxidx;
mod tracked;
mod transforms;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use comp::{comp, lowcomp};
pub use inv::inv;
pub use maxidx::{low_circuit, maxidx, LastEntry};
pub use tracked::{EvalConfig, Evaluator, OpCounts, TrackedValue};
pub use transforms::{transform_s, transform_tc, transform_tl};

/// `(d, d', m, t)`: inner inverse iterations, initial inverse iterations,
/// power per round, and number of rounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CircuitParams {
    pub d: u32,
    pub d_prime: u32,
    pub m: u32,
    pub t: u32,
}

/// Parameters of the `Low` circuit.
pub type LowParams = CircuitParams;

impl CircuitParams {
    pub fn new(d: u32, d_prime: u32, m: u32, t: u32) -> Result<Self> {
        let p = Self { d, d_prime, m, t };
        p.validate()?;
        Ok(p)
    }

    /// All fields at least 1; `m` a power of two no smaller than 2.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d_prime == 0 || self.t == 0 {
            return Err(Error::InvalidParams(format!(
                "{self}: d, d' and t must be at least 1"
            )));
        }
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "{self}: m must be a power of two >= 2"
            )));
        }
        Ok(())
    }

    pub fn log_m(&self) -> u32 {
        self.m.trailing_zeros()
    }
}

impl fmt::Display for CircuitParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.d, self.d_prime, self.m, self.t)
    }
}

/// Parses `"3,3,2,6"` (parentheses and spaces allowed).
impl FromStr for CircuitParams {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<u32> = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParams(format!("cannot parse {s:?}: {e}")))?;
        match fields[..] {
            [d, d_prime, m, t] => Self::new(d, d_prime, m, t),
            _ => Err(Error::InvalidParams(format!(
                "expected 4 comma-separated integers, got {s:?}"
            ))),
        }
    }
}

/// Parameters of the `LowComp` circuit: the `Comp` tuple plus the threshold
/// `phi` separating "lows equal" from "lows differ".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompParams {
    pub circuit: CircuitParams,
    pub phi: f64,
}

impl CompParams {
    pub fn new(circuit: CircuitParams, phi: f64) -> Result<Self> {
        let p = Self { circuit, phi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        if !(self.phi > 0.0 && self.phi < 1.0) {
            return Err(Error::InvalidParams(format!(
                "phi = {} must lie in (0, 1)",
                self.phi
            )));
        }
        Ok(())
    }

    /// Whether `phi` lies in `(2δ, 1 - 2δ)`, the window in which a `Low`
    /// accurate to `delta` separates equal from unequal lows.
    pub fn phi_separates(&self, delta: f64) -> bool {
        self.phi > 2.0 * delta && self.phi < 1.0 - 2.0 * delta
    }
}

/// `Ω·(x - y)² + (1 - Ω)·x`, componentwise.
///
/// For binary `x`, `y` and `Ω ∈ {0, 1}` this is `x + y mod 2` when `Ω = 1` and
/// `x` when `Ω = 0`, since `(a - b)² = a + b mod 2` on bits.
pub fn gated_update(
    ev: &mut Evaluator,
    x: &[TrackedValue],
    y: &[TrackedValue],
    omega: TrackedValue,
) -> Vec<TrackedValue> {
    assert_eq!(x.len(), y.len(), "column length mismatch");
    let keep = ev.const_sub(1.0, omega);
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let diff = ev.sub(xi, yi);
            let sq = ev.square(diff);
            let flip = ev.mul(omega, sq);
            let stay = ev.mul(keep, xi);
            ev.add(flip, stay)
        })
        .collect()
}
