//! Plaintext stand-ins for leveled ciphertexts.
//!
//! A [`TrackedValue`] is a real number tagged with the multiplicative depth
//! of the circuit that produced it. All arithmetic goes through an
//! [`Evaluator`], which applies the depth rules and tallies operations, in the
//! same way a server key mediates ciphertext arithmetic.
//!
//! Depth rules:
//! - addition and subtraction: `max` of the operand depths
//! - ciphertext × ciphertext: `max + 1`
//! - ciphertext × plaintext constant: `+1` when
//!   [`EvalConfig::charge_constant_mult`] is set (CKKS rescaling), else `+0`
//! - anything involving only plaintext constants is free and uncounted

use serde::{Deserialize, Serialize};

use super::LastEntry;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackedValue {
    value: f64,
    depth: u32,
    level: u32,
    plain: bool,
}

impl TrackedValue {
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Multiplicative depth of the circuit computing this value.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Depth consumed since the last simulated bootstrap.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_plain(&self) -> bool {
        self.plain
    }
}

/// Operation tallies. Merge per-thread tallies with `+=`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// Ciphertext × ciphertext products.
    pub mults: u64,
    /// Ciphertext × plaintext products.
    pub const_mults: u64,
    /// Additions and subtractions with at least one ciphertext operand.
    pub adds: u64,
    /// Times a result exceeded the level budget and was refreshed.
    pub bootstrap_events: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.mults += rhs.mults;
        self.const_mults += rhs.const_mults;
        self.adds += rhs.adds;
        self.bootstrap_events += rhs.bootstrap_events;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub charge_constant_mult: bool,
    /// Maximum level before a bootstrap event is recorded. `None` = unlimited.
    pub level_budget: Option<u32>,
    /// Reject out-of-domain circuit inputs. A blind server cannot do this, so
    /// the reduction turns it off and reports range escapes instead.
    pub check_domains: bool,
    /// How the max-index circuit computes its last coordinate.
    pub last_entry: LastEntry,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            charge_constant_mult: true,
            level_budget: None,
            check_domains: true,
            last_entry: LastEntry::default(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Evaluator {
    config: EvalConfig,
    counts: OpCounts,
}

impl Evaluator {
    pub fn new(config: EvalConfig) -> Self {
        Self {
            config,
            counts: OpCounts::default(),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    pub fn counts(&self) -> OpCounts {
        self.counts
    }

    pub fn take_counts(&mut self) -> OpCounts {
        std::mem::take(&mut self.counts)
    }

    /// A freshly encrypted value.
    pub fn fresh(&self, value: f64) -> TrackedValue {
        TrackedValue {
            value,
            depth: 0,
            level: 0,
            plain: false,
        }
    }

    pub fn fresh_vec(&self, values: &[f64]) -> Vec<TrackedValue> {
        values.iter().map(|&v| self.fresh(v)).collect()
    }

    /// A public plaintext constant.
    pub fn constant(&self, value: f64) -> TrackedValue {
        TrackedValue {
            value,
            depth: 0,
            level: 0,
            plain: true,
        }
    }

    pub(crate) fn check_domain(
        &self,
        op: &'static str,
        value: f64,
        ok: bool,
        domain: &'static str,
    ) -> Result<()> {
        if self.config.check_domains && !ok {
            return Err(Error::Domain { op, value, domain });
        }
        Ok(())
    }

    fn linear(&mut self, a: TrackedValue, b: TrackedValue, value: f64) -> TrackedValue {
        let plain = a.plain && b.plain;
        if !plain {
            self.counts.adds += 1;
        }
        TrackedValue {
            value,
            depth: a.depth.max(b.depth),
            level: a.level.max(b.level),
            plain,
        }
    }

    fn leveled(&mut self, depth: u32, level: u32, value: f64) -> TrackedValue {
        let level = match self.config.level_budget {
            Some(budget) if level > budget => {
                self.counts.bootstrap_events += 1;
                1
            }
            _ => level,
        };
        TrackedValue {
            value,
            depth,
            level,
            plain: false,
        }
    }

    pub fn add(&mut self, a: TrackedValue, b: TrackedValue) -> TrackedValue {
        self.linear(a, b, a.value + b.value)
    }

    pub fn sub(&mut self, a: TrackedValue, b: TrackedValue) -> TrackedValue {
        self.linear(a, b, a.value - b.value)
    }

    pub fn add_const(&mut self, a: TrackedValue, c: f64) -> TrackedValue {
        let c = self.constant(c);
        self.add(a, c)
    }

    /// `c - a`
    pub fn const_sub(&mut self, c: f64, a: TrackedValue) -> TrackedValue {
        let c = self.constant(c);
        self.sub(c, a)
    }

    pub fn mul(&mut self, a: TrackedValue, b: TrackedValue) -> TrackedValue {
        match (a.plain, b.plain) {
            (true, true) => self.constant(a.value * b.value),
            (true, false) => self.mul_const(b, a.value),
            (false, true) => self.mul_const(a, b.value),
            (false, false) => {
                self.counts.mults += 1;
                let depth = a.depth.max(b.depth) + 1;
                let level = a.level.max(b.level) + 1;
                self.leveled(depth, level, a.value * b.value)
            }
        }
    }

    pub fn mul_const(&mut self, a: TrackedValue, c: f64) -> TrackedValue {
        if a.plain {
            return self.constant(a.value * c);
        }
        self.counts.const_mults += 1;
        let cost = u32::from(self.config.charge_constant_mult);
        self.leveled(a.depth + cost, a.level + cost, a.value * c)
    }

    pub fn square(&mut self, a: TrackedValue) -> TrackedValue {
        self.mul(a, a)
    }

    /// `a^(2^k)` by repeated squaring.
    pub fn pow2k(&mut self, a: TrackedValue, k: u32) -> TrackedValue {
        (0..k).fold(a, |acc, _| self.square(acc))
    }

    /// Left-to-right sum. An empty slice sums to the plaintext zero.
    pub fn sum(&mut self, values: &[TrackedValue]) -> TrackedValue {
        match values.split_first() {
            None => self.constant(0.0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &v| self.add(acc, v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_rules() {
        let mut ev = Evaluator::default();
        let a = ev.fresh(2.0);
        let b = ev.fresh(3.0);
        let p = ev.mul(a, b);
        assert_eq!((p.value(), p.depth()), (6.0, 1));
        let s = ev.add(p, a);
        assert_eq!((s.value(), s.depth()), (8.0, 1));
        let c = ev.add_const(s, 1.0);
        assert_eq!(c.depth(), 1);
        let k = ev.mul_const(c, 0.5);
        assert_eq!((k.value(), k.depth()), (4.5, 2));
        assert_eq!(
            ev.counts(),
            OpCounts {
                mults: 1,
                const_mults: 1,
                adds: 2,
                bootstrap_events: 0
            }
        );
    }

    #[test]
    fn uncharged_constant_mult_is_free() {
        let mut ev = Evaluator::new(EvalConfig {
            charge_constant_mult: false,
            ..EvalConfig::default()
        });
        let a = ev.fresh(2.0);
        let k = ev.mul_const(a, 3.0);
        assert_eq!(k.depth(), 0);
        assert_eq!(ev.counts().const_mults, 1);
    }

    #[test]
    fn plaintext_arithmetic_is_free() {
        let mut ev = Evaluator::default();
        let c = ev.constant(0.25);
        let d = ev.mul(c, c);
        let e = ev.add_const(d, 1.0);
        assert!(e.is_plain());
        assert_eq!(ev.counts(), OpCounts::default());
        let x = ev.fresh(2.0);
        let y = ev.mul(x, e);
        assert!(!y.is_plain());
        assert_eq!(ev.counts().const_mults, 1);
    }

    #[test]
    fn pow_and_sum() {
        let mut ev = Evaluator::default();
        let a = ev.fresh(1.5);
        let p = ev.pow2k(a, 3);
        assert!((p.value() - 1.5f64.powi(8)).abs() < 1e-12);
        assert_eq!(p.depth(), 3);
        let v = ev.fresh_vec(&[1.0, 2.0, 3.0]);
        let s = ev.sum(&v);
        assert_eq!(s.value(), 6.0);
        assert_eq!(ev.counts().adds, 2);
    }

    #[test]
    fn level_budget_records_bootstraps() {
        let mut ev = Evaluator::new(EvalConfig {
            level_budget: Some(2),
            ..EvalConfig::default()
        });
        let mut x = ev.fresh(1.0);
        for _ in 0..5 {
            x = ev.square(x);
        }
        // levels 1, 2, (3 -> 1), 2, (3 -> 1)
        assert_eq!(x.depth(), 5);
        assert_eq!(x.level(), 1);
        assert_eq!(ev.counts().bootstrap_events, 2);
    }
}
