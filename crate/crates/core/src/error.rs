use thiserror::Error;

use crate::distillation::ProtocolName;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input error at or above the protocol's admissibility cap.
    #[error("{protocol} input error {eps} is not below the distillation threshold {cap}")]
    AboveThreshold {
        protocol: ProtocolName,
        eps: f64,
        cap: f64,
    },

    /// A single purified state needs at least the whole qubit budget (regime C).
    #[error(
        "regime C: one purified state needs {needed:.6e} qubits but the budget is {budget}; \
         total qubits and distillation time diverge"
    )]
    InfeasibleBudget { needed: f64, budget: u64 },

    /// The Solovay-Kitaev error map does not contract for this braid model.
    #[error("Solovay-Kitaev map is not contracting: c * eps0^(1/2) = {factor} >= 1")]
    NonConvergent { factor: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for the model-infeasibility family (threshold and budget).
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::AboveThreshold { .. } | Error::InfeasibleBudget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
