//! Magic-state distillation cost model for |a8> and |a4>.
//!
//! A protocol is a parameterized recursion: each round consumes `n_raw`
//! states of the current level, succeeds with a probability that vanishes at
//! the input cap, and maps the error as `eps' = a * eps^k`. Expected costs
//! follow from the geometric retry count at every level, so the expected
//! number of level-`i` states behind one output is
//! `E_i = E_{i+1} * n_raw / p(eps_i)` with `E_rounds = 1`.
//!
//! |a4> rounds additionally consume |a8> ancillas, each distilled to the
//! output error of the level it serves.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on ladder depth; any sane config converges in a few dozen.
const MAX_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolName {
    A8,
    A4,
}

impl fmt::Display for ProtocolName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolName::A8 => f.write_str("|a8>"),
            ProtocolName::A4 => f.write_str("|a4>"),
        }
    }
}

/// Probability that one distillation round succeeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SuccessModel {
    /// `p = 1 - eps / cap`
    #[default]
    Linear,
    /// `p = 1 - (eps / cap)^exponent`
    Power { exponent: f64 },
    /// Every round succeeds.
    Perfect,
}

/// Error probability (squared amplitude) in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ErrorProb<T>(T);

impl<T: Real> ErrorProb<T> {
    pub fn new(value: T) -> Result<Self> {
        if value >= T::zero() && value <= T::one() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidInput(format!("error probability {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> T {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec<T> {
    pub name: ProtocolName,
    pub n_raw: u32,
    pub map_coeff: T,
    pub map_exponent: T,
    pub input_cap: T,
    pub success_model: SuccessModel,
    /// Qubits one raw input state occupies.
    pub qubits_per_raw: u32,
    /// |a8> states consumed per round; zero for the |a8> protocol.
    pub ancilla_a8_per_round: u32,
    pub round_ops_braid: T,
    pub round_ops_measure: T,
    /// Duration of one measurement, in braid steps.
    pub measurement_steps: T,
}

impl<T: Real> ProtocolSpec<T> {
    /// Time steps one round occupies.
    pub fn round_time(&self) -> T {
        self.round_ops_braid + self.measurement_steps * self.round_ops_measure
    }

    fn check_input(&self, eps: T) -> Result<()> {
        if !(eps >= T::zero() && eps <= T::one()) {
            return Err(Error::InvalidInput(format!("error probability {eps} outside [0, 1]")));
        }
        if eps >= self.input_cap {
            return Err(Error::AboveThreshold {
                protocol: self.name,
                eps: eps.as_f64(),
                cap: self.input_cap.as_f64(),
            });
        }
        Ok(())
    }

    fn map(&self, eps: T) -> T {
        (self.map_coeff * eps.powf(self.map_exponent)).max(T::zero()).min(T::one())
    }

    fn success(&self, eps: T) -> T {
        let x = eps / self.input_cap;
        let p = match self.success_model {
            SuccessModel::Linear => T::one() - x,
            SuccessModel::Power { exponent } => T::one() - x.powf(T::lit(exponent)),
            SuccessModel::Perfect => T::one(),
        };
        p.max(T::zero()).min(T::one())
    }
}

/// The pair of protocols a run uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocols<T> {
    pub a8: ProtocolSpec<T>,
    pub a4: ProtocolSpec<T>,
}

pub fn output_error<T: Real>(spec: &ProtocolSpec<T>, eps: ErrorProb<T>) -> Result<ErrorProb<T>> {
    spec.check_input(eps.value())?;
    Ok(ErrorProb(spec.map(eps.value())))
}

pub fn success_prob<T: Real>(spec: &ProtocolSpec<T>, eps: ErrorProb<T>) -> Result<T> {
    spec.check_input(eps.value())?;
    Ok(spec.success(eps.value()))
}

fn check_target<T: Real>(target: ErrorProb<T>) -> Result<()> {
    if target.value() > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidInput("target error must be positive".into()))
    }
}

/// `eps_0 .. eps_m` under the iterated map, stopping at the first level at
/// or below `target`.
pub fn level_errors<T: Real>(
    spec: &ProtocolSpec<T>,
    eps0: ErrorProb<T>,
    target: ErrorProb<T>,
) -> Result<Vec<T>> {
    spec.check_input(eps0.value())?;
    check_target(target)?;
    let mut levels = vec![eps0.value()];
    while levels[levels.len() - 1] > target.value() {
        let cur = levels[levels.len() - 1];
        let next = spec.map(cur);
        if !(next < cur) {
            return Err(Error::InvalidConfig(format!(
                "{} error map does not contract at eps = {cur}",
                spec.name
            )));
        }
        if levels.len() > MAX_ROUNDS {
            return Err(Error::InvalidConfig(format!("{} ladder exceeds {MAX_ROUNDS} rounds", spec.name)));
        }
        levels.push(next);
    }
    Ok(levels)
}

pub fn rounds_needed<T: Real>(
    spec: &ProtocolSpec<T>,
    eps0: ErrorProb<T>,
    target: ErrorProb<T>,
) -> Result<u32> {
    Ok((level_errors(spec, eps0, target)?.len() - 1) as u32)
}

/// Expected state counts along one ladder.
#[derive(Debug, Clone, PartialEq)]
struct Ladder<T> {
    errors: Vec<T>,
    /// success probability of the round run on level `i`
    success: Vec<T>,
    /// expected level-`i` states per output (`states[rounds] = 1`)
    states: Vec<T>,
    /// expected rounds run on level `i` per output
    rounds_run: Vec<T>,
}

impl<T: Real> Ladder<T> {
    fn build(spec: &ProtocolSpec<T>, eps0: ErrorProb<T>, target: ErrorProb<T>) -> Result<Self> {
        let errors = level_errors(spec, eps0, target)?;
        let m = errors.len() - 1;
        let success: Vec<T> = errors[..m].iter().map(|&e| spec.success(e)).collect();
        let n = T::lit(f64::from(spec.n_raw));
        let mut states = vec![T::one(); m + 1];
        let mut rounds_run = vec![T::zero(); m];
        for i in (0..m).rev() {
            rounds_run[i] = states[i + 1] / success[i];
            states[i] = n * rounds_run[i];
        }
        Ok(Self { errors, success, states, rounds_run })
    }

    fn rounds(&self) -> usize {
        self.errors.len() - 1
    }

    fn total_rounds_run(&self) -> T {
        self.rounds_run.iter().copied().sum()
    }
}

/// |a8> cost of one ancilla batch inside an |a4> level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AncillaLevel<T> {
    pub level: u32,
    /// Error every ancilla in this batch must meet.
    pub required_error: T,
    /// Error the ancillas actually reach.
    pub achieved_error: T,
    /// Expected |a8> states consumed per purified |a4>.
    pub count: T,
    pub a8_rounds: u32,
    pub raw_per_state: T,
    pub raw_total: T,
    pub qubits: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistillationPlan<T> {
    pub protocol: ProtocolName,
    pub rounds: u32,
    pub level_errors: Vec<T>,
    /// Expected raw states of this protocol's species per purified output.
    pub expected_raw: T,
    /// Expected |a8> ancillas consumed (|a4> only).
    pub expected_ancilla_a8: T,
    pub ancilla_levels: Vec<AncillaLevel<T>>,
    /// Expected raw |a8> states behind all ancillas (|a4> only).
    pub expected_ancilla_raw: T,
    /// Qubits holding this species' raw states (Fig. 1(b) curve i).
    pub qubits_primary: T,
    /// Peak qubits making ancillas for one level (Fig. 1(b) curve ii).
    pub qubits_ancilla: T,
    /// Peak simultaneous qubits to make one purified state.
    pub qubits_peak: T,
    /// Total raw-state qubit slots consumed per purified state.
    pub slot_qubits: T,
    /// Serial time steps with full parallelism.
    pub time_steps: T,
    pub ops_braid: T,
    pub ops_measure: T,
}

impl<T: Real> DistillationPlan<T> {
    pub fn final_error(&self) -> T {
        self.level_errors[self.level_errors.len() - 1]
    }
}

/// Plan for one |a8> state (or any ancilla-free protocol).
pub fn a8_plan<T: Real>(
    eps0: ErrorProb<T>,
    target: ErrorProb<T>,
    protocols: &Protocols<T>,
) -> Result<DistillationPlan<T>> {
    single_species_plan(&protocols.a8, eps0, target)
}

fn single_species_plan<T: Real>(
    spec: &ProtocolSpec<T>,
    eps0: ErrorProb<T>,
    target: ErrorProb<T>,
) -> Result<DistillationPlan<T>> {
    let ladder = Ladder::build(spec, eps0, target)?;
    let rounds = ladder.rounds();
    let raw = ladder.states[0];
    let qubits = T::lit(f64::from(spec.qubits_per_raw)) * raw;
    let run = ladder.total_rounds_run();
    Ok(DistillationPlan {
        protocol: spec.name,
        rounds: rounds as u32,
        level_errors: ladder.errors,
        expected_raw: raw,
        expected_ancilla_a8: T::zero(),
        ancilla_levels: Vec::new(),
        expected_ancilla_raw: T::zero(),
        qubits_primary: qubits,
        qubits_ancilla: T::zero(),
        qubits_peak: qubits,
        slot_qubits: qubits,
        time_steps: T::from_count(rounds as u64) * spec.round_time(),
        ops_braid: run * spec.round_ops_braid,
        ops_measure: run * spec.round_ops_measure,
    })
}

/// Plan for one |a4> state including the |a8> ancillas each round consumes.
pub fn a4_plan<T: Real>(
    eps0_a4: ErrorProb<T>,
    eps0_a8: ErrorProb<T>,
    target: ErrorProb<T>,
    protocols: &Protocols<T>,
) -> Result<DistillationPlan<T>> {
    let spec = &protocols.a4;
    protocols.a8.check_input(eps0_a8.value())?;
    if spec.ancilla_a8_per_round == 0 {
        return single_species_plan(spec, eps0_a4, target);
    }

    let ladder = Ladder::build(spec, eps0_a4, target)?;
    let rounds = ladder.rounds();
    let q_raw = T::lit(f64::from(spec.qubits_per_raw));
    let per_round = T::lit(f64::from(spec.ancilla_a8_per_round));

    let mut ancilla_levels = Vec::with_capacity(rounds);
    let mut time = T::zero();
    let mut ops_braid = ladder.total_rounds_run() * spec.round_ops_braid;
    let mut ops_measure = ladder.total_rounds_run() * spec.round_ops_measure;
    let mut peak = T::zero();
    let mut ancilla_peak = T::zero();
    let mut ancilla_raw = T::zero();
    let mut ancilla_qubits = T::zero();
    let mut ancilla_count = T::zero();

    for i in 0..rounds {
        let required = ladder.errors[i + 1];
        let sub = single_species_plan(&protocols.a8, eps0_a8, ErrorProb(required))?;
        let count = per_round * ladder.rounds_run[i];
        let qubits = count * sub.qubits_peak;
        ancilla_levels.push(AncillaLevel {
            level: i as u32,
            required_error: required,
            achieved_error: sub.final_error(),
            count,
            a8_rounds: sub.rounds,
            raw_per_state: sub.expected_raw,
            raw_total: count * sub.expected_raw,
            qubits,
        });
        ancilla_count = ancilla_count + count;
        ancilla_raw = ancilla_raw + count * sub.expected_raw;
        ancilla_qubits = ancilla_qubits + qubits;
        ancilla_peak = ancilla_peak.max(qubits);
        peak = peak.max(q_raw * ladder.states[i] + qubits);
        time = time + sub.time_steps + spec.round_time();
        ops_braid = ops_braid + count * sub.ops_braid;
        ops_measure = ops_measure + count * sub.ops_measure;
    }

    let primary = q_raw * ladder.states[0];
    Ok(DistillationPlan {
        protocol: spec.name,
        rounds: rounds as u32,
        level_errors: ladder.errors,
        expected_raw: ladder.states[0],
        expected_ancilla_a8: ancilla_count,
        ancilla_levels,
        expected_ancilla_raw: ancilla_raw,
        qubits_primary: primary,
        qubits_ancilla: ancilla_peak,
        qubits_peak: if rounds == 0 { primary } else { peak },
        slot_qubits: primary + ancilla_qubits,
        time_steps: time,
        ops_braid,
        ops_measure,
    })
}

/// Running maximum over increasing `eps0`: a noisier input can always be
/// treated as the worse one it dominates.
pub fn monotonize<T: Real>(curve: &[(T, T)]) -> Vec<(T, T)> {
    let mut best = T::neg_infinity();
    curve
        .iter()
        .map(|&(x, y)| {
            best = best.max(y);
            (x, best)
        })
        .collect()
}
