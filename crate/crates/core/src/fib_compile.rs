//! Braid-length cost model for Fibonacci anyons.
//!
//! Brute-force braids reach error `A * exp(-alpha * l)` at length `l` up to
//! `l_max`. Tighter targets stack Solovay-Kitaev iterations on the longest
//! base braid, each one mapping `eps -> c * eps^(3/2)` and multiplying the
//! length by `sk_len_factor`.

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::distillation::ErrorProb;
use crate::error::{Error, Result};
use crate::gate_budget::{circuit_width_fib, gate_counts, GateBudget, KeyLength};
use crate::scalar::Real;

const MAX_SK: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidModel<T> {
    pub alpha: T,
    pub amp: T,
    pub l_max: u32,
    pub sk_c: T,
    pub sk_len_factor: T,
}

impl<T: Real> BraidModel<T> {
    /// Error of the best brute-force braid of length `len`.
    pub fn error_at(&self, len: u32) -> T {
        self.amp * (-self.alpha * T::lit(f64::from(len))).exp()
    }
}

impl<T: Real> Default for BraidModel<T> {
    fn default() -> Self {
        ModelConfig::default().braid_model()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseBraid<T> {
    Found { length: u32, eps_achieved: T },
    NeedsSk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BraidPlan<T> {
    pub eps_required: T,
    pub base_length: u32,
    pub n_sk: u32,
    pub total_length: u64,
    pub eps_achieved: T,
}

fn check_eps<T: Real>(eps: ErrorProb<T>) -> Result<T> {
    let e = eps.value();
    if e > T::zero() && e < T::one() {
        Ok(e)
    } else {
        Err(Error::InvalidInput(format!("braid target {e} must lie in (0, 1)")))
    }
}

/// Shortest brute-force braid meeting `eps`.
pub fn base_braid<T: Real>(eps: ErrorProb<T>, model: &BraidModel<T>) -> Result<BaseBraid<T>> {
    let e = check_eps(eps)?;
    // closed form, then nudged so rounding in ln/exp cannot cost one step
    let guess = ((model.amp / e).ln() / model.alpha - T::lit(1e-9)).ceil();
    let start = guess.to_f64().unwrap_or(f64::INFINITY).clamp(1.0, f64::from(model.l_max));
    let mut l = start as u32;
    while l > 1 && model.error_at(l - 1).le_rel(e) {
        l -= 1;
    }
    while !model.error_at(l).le_rel(e) {
        l += 1;
        if l > model.l_max {
            return Ok(BaseBraid::NeedsSk);
        }
    }
    Ok(BaseBraid::Found { length: l, eps_achieved: model.error_at(l) })
}

pub fn sk_plan<T: Real>(eps: ErrorProb<T>, model: &BraidModel<T>) -> Result<BraidPlan<T>> {
    let e = check_eps(eps)?;
    if let BaseBraid::Found { length, eps_achieved } = base_braid(eps, model)? {
        return Ok(BraidPlan {
            eps_required: e,
            base_length: length,
            n_sk: 0,
            total_length: u64::from(length),
            eps_achieved,
        });
    }
    let eps0 = model.error_at(model.l_max);
    let factor = model.sk_c * eps0.sqrt();
    if factor >= T::one() {
        return Err(Error::NonConvergent { factor: factor.as_f64() });
    }
    let exponent = T::lit(1.5);
    let mut achieved = eps0;
    let mut n = 0;
    while !achieved.le_rel(e) {
        achieved = model.sk_c * achieved.powf(exponent);
        n += 1;
        if n > MAX_SK {
            return Err(Error::InvalidInput(format!("braid target {e} needs more than {MAX_SK} SK iterations")));
        }
    }
    let len = T::lit(f64::from(model.l_max)) * model.sk_len_factor.powi(n as i32);
    Ok(BraidPlan {
        eps_required: e,
        base_length: model.l_max,
        n_sk: n,
        total_length: len.ceil().to_u64().unwrap_or(u64::MAX),
        eps_achieved: achieved,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibEstimate<T> {
    pub budget: GateBudget<T>,
    pub qubits: u64,
    pub anyons: u64,
    pub plan: BraidPlan<T>,
    pub time_steps: T,
}

pub fn total_time_fib<T: Real>(l: KeyLength, cfg: &ModelConfig) -> Result<FibEstimate<T>> {
    let budget = gate_counts::<T>(l, cfg);
    let target = ErrorProb::new(budget.eps_gate.min(T::one() - T::epsilon()))?;
    let plan = sk_plan(target, &cfg.braid_model())?;
    let per_gate = T::lit(plan.total_length as f64);
    let weighted = T::lit(
        budget.n_not as f64 * cfg.braid_mult_not
            + budget.n_cnot as f64 * cfg.braid_mult_cnot
            + budget.n_ccnot as f64 * cfg.braid_mult_ccnot,
    );
    let (qubits, anyons) = circuit_width_fib(l);
    Ok(FibEstimate { budget, qubits, anyons, plan, time_steps: weighted * per_gate })
}
