//! Persistent homology over approximately encrypted data.
//!
//! The standard boundary matrix reduction branches on the data: it looks for
//! an earlier column with the same lowest 1 and adds it, until none is left.
//! A server holding only ciphertexts cannot branch. This crate rewrites the
//! reduction as a fixed circuit of additions and multiplications, built from
//! approximate max-index and comparison circuits, and evaluates it on
//! plaintext values that track the multiplicative depth a leveled HE scheme
//! would consume.
//!
//! - [`simplicial`]: filtrations, boundary matrices, persistence diagrams
//! - [`exact`]: the GF(2) reduction used as the reference
//! - [`circuits`]: `Inv`, `MaxIdx`, `Comp`, `Low`, `LowComp` over tracked values
//! - [`params`]: circuit parameters from error budgets, depth and cost figures
//! - [`he_reduce`]: the branch-free reductions and their verification
//! - [`harness`]: built-in examples, random sweeps, error dumps
//!
//! ```
//! use hetda::circuits::{CompParams, LowParams};
//! use hetda::harness::builtin_example;
//! use hetda::he_reduce::{he_reduce_optimized, round_and_verify, ReduceOptions};
//! use hetda::params::default_phi;
//! use hetda::simplicial::build_boundary_matrix;
//!
//! let f = builtin_example("square")?;
//! let delta = build_boundary_matrix(&f)?.matrix;
//! let pl: LowParams = "3,3,2,6".parse()?;
//! let pc = CompParams::new("3,3,2,12".parse()?, default_phi(delta.n()))?;
//! let run = he_reduce_optimized(&delta, &pl, &pc, &ReduceOptions::default())?;
//! let report = round_and_verify(&run.matrix, &delta);
//! assert!(report.rounded_equals_exact);
//! assert!(report.max_error < 1e-2);
//! # Ok::<(), hetda::error::Error>(())
//! ```

pub mod circuits;
pub mod error;
pub mod exact;
pub mod harness;
pub mod he_reduce;
pub mod matrix;
pub mod params;
pub mod simplicial;

pub use error::{Error, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/filtrations.md")]
    mod filtrations {}
    #[doc = include_str!("../../../book/src/exact-reduction.md")]
    mod exact_reduction {}
    #[doc = include_str!("../../../book/src/circuits.md")]
    mod circuits {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/he-reduction.md")]
    mod he_reduction {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
