//! Size of the modular-exponentiation workload.
//!
//! The gate count is modeled as `round(kappa * L^3)` split over NOT, CNOT and
//! CCNOT by a configurable mix. The per-gate error target spreads the
//! whole-run failure budget evenly over all gates.

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::error::{Error, Result};
use crate::scalar::{round_count, Real};

/// Bit length of the number being factored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct KeyLength(u64);

impl KeyLength {
    pub fn new(bits: u64) -> Result<Self> {
        if bits == 0 {
            return Err(Error::InvalidInput("key length must be at least 1 bit".into()));
        }
        Ok(Self(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for KeyLength {
    type Error = Error;
    fn try_from(bits: u64) -> Result<Self> {
        Self::new(bits)
    }
}

impl From<KeyLength> for u64 {
    fn from(l: KeyLength) -> u64 {
        l.0
    }
}

/// Purified magic states a workload consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Demand {
    pub a8: u64,
    pub a4: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateBudget<T> {
    pub key_length: KeyLength,
    pub n_total: u64,
    pub n_not: u64,
    pub n_cnot: u64,
    pub n_ccnot: u64,
    /// Error probability allowed per gate.
    pub eps_gate: T,
    pub demand_a4: u64,
    pub demand_a8: u64,
}

impl<T> GateBudget<T> {
    pub fn demand(&self) -> Demand {
        Demand { a8: self.demand_a8, a4: self.demand_a4 }
    }
}

pub fn gate_counts<T: Real>(l: KeyLength, cfg: &ModelConfig) -> GateBudget<T> {
    let bits = l.bits() as f64;
    // f64 here regardless of T: n_total must be an exact integer count
    let n_total = round_count(cfg.kappa * bits * bits * bits).max(1);
    let n_not = round_count(cfg.f_not * n_total as f64).min(n_total);
    let n_cnot = round_count(cfg.f_cnot * n_total as f64).min(n_total - n_not);
    let n_ccnot = n_total - n_not - n_cnot;
    GateBudget {
        key_length: l,
        n_total,
        n_not,
        n_cnot,
        n_ccnot,
        eps_gate: T::lit(cfg.delta_total / n_total as f64),
        demand_a4: cfg.k_a4_per_ccnot * n_ccnot,
        demand_a8: n_cnot + cfg.k_cnot_per_ccnot * n_ccnot,
    }
}

/// Logical qubits of the Fibonacci register.
pub fn fib_qubits(l: KeyLength) -> u64 {
    2 * l.bits() + 3
}

/// `(qubits, anyons)` for the Fibonacci circuit; three anyons per qubit.
pub fn circuit_width_fib(l: KeyLength) -> (u64, u64) {
    let q = fib_qubits(l);
    (q, 3 * q)
}

/// Four Ising anyons encode one qubit.
pub fn ising_anyons(qubits: u64) -> u64 {
    4 * qubits
}
