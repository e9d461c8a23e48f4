//! Space and time cost models for factoring on topological quantum
//! computers: Ising anyons with magic-state distillation and Fibonacci anyons
//! with compiled braids.
//!
//! The analytic modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod distillation;
pub mod error;
pub mod fib_compile;
pub mod gate_budget;
pub mod ising_schedule;
pub mod mc_oracle;
pub mod physical;
pub mod scalar;
pub mod sweep;

pub use config::{ConfigFile, ModelConfig};
pub use error::{Error, Result};
pub use gate_budget::{Demand, KeyLength};
pub use ising_schedule::{Mode, Regime, SchedulePolicy};
pub use scalar::Real;

pub type ErrorProb = distillation::ErrorProb<f64>;
pub type ProtocolSpec = distillation::ProtocolSpec<f64>;
pub type Protocols = distillation::Protocols<f64>;
pub type DistillationPlan = distillation::DistillationPlan<f64>;
pub type GateBudget = gate_budget::GateBudget<f64>;
pub type Campaign = ising_schedule::Campaign<f64>;
pub type ScheduleReport = ising_schedule::ScheduleReport<f64>;
pub type BraidModel = fib_compile::BraidModel<f64>;
pub type BraidPlan = fib_compile::BraidPlan<f64>;
pub type FibEstimate = fib_compile::FibEstimate<f64>;
pub type PhysicalParams = physical::PhysicalParams<f64>;
pub type PhysicalReport = physical::PhysicalReport<f64>;

pub type ErrorProb32 = distillation::ErrorProb<f32>;
pub type DistillationPlan32 = distillation::DistillationPlan<f32>;
pub type ScheduleReport32 = ising_schedule::ScheduleReport<f32>;
pub type BraidPlan32 = fib_compile::BraidPlan<f32>;
pub type PhysicalReport32 = physical::PhysicalReport<f32>;
