//! Monte Carlo model of the distillation factory.
//!
//! Every round succeeds independently with the protocol's success
//! probability; a failed round burns its inputs and its qubits go back to the
//! pool. The number of rounds needed for `r` successes at probability `p` is
//! drawn directly as `r + NegBin(r, p)`, which is distributed exactly like
//! running the rounds one by one.
//!
//! Trials get their own ChaCha stream (`seed`, stream = trial index), run in
//! parallel, and are merged in trial order with compensated summation, so the
//! result does not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Geometric, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distillation::{a4_plan, a8_plan, level_errors, success_prob, ErrorProb, ProtocolSpec, Protocols};
use crate::error::{Error, Result};
use crate::gate_budget::Demand;

/// Above this many successes the negative binomial is drawn as a
/// Gamma-Poisson mixture instead of a sum of geometrics.
const GEOMETRIC_SUM_MAX: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub trials: u64,
    /// Keep every trial's outcome in the result.
    #[serde(default)]
    pub keep_trials: bool,
}

impl SimConfig {
    pub fn new(seed: u64, trials: u64) -> Self {
        Self { seed, trials, keep_trials: false }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("at least one trial is required".into()));
        }
        Ok(())
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub raw_states: f64,
    pub ancilla_raw_states: f64,
    pub time_steps: f64,
    pub peak_qubits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub seed: u64,
    pub trials: u64,
    pub raw_states: Estimate,
    /// Raw |a8> states behind the ancillas (|a4> runs only).
    pub ancilla_raw_states: Estimate,
    pub time_steps: Estimate,
    pub peak_qubits: Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_trial: Option<Vec<TrialOutcome>>,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn value(self) -> f64 {
        self.s + self.c
    }
}

fn estimate(xs: impl Iterator<Item = f64> + Clone) -> Estimate {
    let mut n = 0u64;
    let mut sum = Sum::default();
    for x in xs.clone() {
        sum.add(x);
        n += 1;
    }
    let mean = sum.value() / n as f64;
    let mut sq = Sum::default();
    for x in xs {
        sq.add((x - mean) * (x - mean));
    }
    let var = if n > 1 { sq.value() / (n - 1) as f64 } else { 0.0 };
    Estimate { mean, std_error: (var / n as f64).sqrt() }
}

fn run_trials(sim: &SimConfig, f: impl Fn(&mut ChaCha8Rng) -> TrialOutcome + Sync) -> SimResult {
    let outcomes: Vec<TrialOutcome> = (0..sim.trials).into_par_iter().map(|t| f(&mut sim.rng(t))).collect();
    SimResult {
        seed: sim.seed,
        trials: sim.trials,
        raw_states: estimate(outcomes.iter().map(|o| o.raw_states)),
        ancilla_raw_states: estimate(outcomes.iter().map(|o| o.ancilla_raw_states)),
        time_steps: estimate(outcomes.iter().map(|o| o.time_steps)),
        peak_qubits: estimate(outcomes.iter().map(|o| o.peak_qubits)),
        per_trial: sim.keep_trials.then_some(outcomes),
    }
}

/// Rounds executed until `successes` rounds succeed.
fn rounds_until<R: Rng + ?Sized>(rng: &mut R, successes: u64, p: f64) -> u64 {
    if successes == 0 || p >= 1.0 {
        return successes;
    }
    let failures = if successes <= GEOMETRIC_SUM_MAX {
        let g = Geometric::new(p).expect("success probability in (0, 1)");
        (0..successes).map(|_| g.sample(rng)).fold(0u64, u64::saturating_add)
    } else {
        let scale = (1.0 - p) / p;
        let lambda = Gamma::new(successes as f64, scale).expect("positive gamma parameters").sample(rng);
        if lambda <= 0.0 {
            0
        } else {
            Poisson::new(lambda).expect("finite poisson rate").sample(rng) as u64
        }
    };
    successes.saturating_add(failures)
}

/// Success probabilities along the ladder `eps0 -> target`.
#[derive(Debug, Clone)]
struct Ladder {
    n_raw: u64,
    success: Vec<f64>,
}

impl Ladder {
    fn new(spec: &ProtocolSpec<f64>, eps0: ErrorProb<f64>, target: ErrorProb<f64>) -> Result<Self> {
        let errors = level_errors(spec, eps0, target)?;
        let success = errors[..errors.len() - 1]
            .iter()
            .map(|&e| success_prob(spec, ErrorProb::new(e)?))
            .collect::<Result<Vec<_>>>()?;
        if success.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidConfig(format!("{} round can never succeed", spec.name)));
        }
        Ok(Self { n_raw: u64::from(spec.n_raw), success })
    }

    fn rounds(&self) -> usize {
        self.success.len()
    }

    /// Raw inputs consumed to finish `outputs` states, plus the rounds run on
    /// each level.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, outputs: u64) -> (u64, Vec<u64>) {
        let mut need = outputs;
        let mut rounds = vec![0; self.rounds()];
        for i in (0..self.rounds()).rev() {
            rounds[i] = rounds_until(rng, need, self.success[i]);
            need = rounds[i].saturating_mul(self.n_raw);
        }
        (need, rounds)
    }
}

/// |a4> ladder with one |a8> ladder per level for its ancillas.
#[derive(Debug, Clone)]
struct A4Factory {
    a4: Ladder,
    ancilla: Vec<Ladder>,
    per_round: u64,
    q4: f64,
    q8: f64,
}

impl A4Factory {
    fn new(p: &Protocols<f64>, eps0_a4: ErrorProb<f64>, eps0_a8: ErrorProb<f64>, target: ErrorProb<f64>) -> Result<Self> {
        let errors = level_errors(&p.a4, eps0_a4, target)?;
        let ancilla = errors[1..]
            .iter()
            .map(|&e| Ladder::new(&p.a8, eps0_a8, ErrorProb::new(e)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            a4: Ladder::new(&p.a4, eps0_a4, target)?,
            ancilla,
            per_round: u64::from(p.a4.ancilla_a8_per_round),
            q4: f64::from(p.a4.qubits_per_raw),
            q8: f64::from(p.a8.qubits_per_raw),
        })
    }

    /// `(raw a4, raw a8 behind ancillas, peak qubits, pool slots)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, outputs: u64) -> (u64, u64, f64, f64) {
        let (raw4, rounds) = self.a4.sample(rng, outputs);
        let mut raw8 = 0u64;
        let mut peak = if rounds.is_empty() { self.q4 * raw4 as f64 } else { 0.0 };
        for (i, &r) in rounds.iter().enumerate() {
            let level_raw = if self.per_round == 0 {
                0
            } else {
                self.ancilla[i].sample(rng, r.saturating_mul(self.per_round)).0
            };
            raw8 = raw8.saturating_add(level_raw);
            let inputs = r.saturating_mul(self.a4.n_raw);
            peak = peak.max(self.q4 * inputs as f64 + self.q8 * level_raw as f64);
        }
        (raw4, raw8, peak, self.q4 * raw4 as f64 + self.q8 * raw8 as f64)
    }
}

/// What a state-production run distills.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateRequest {
    A8 { eps0: f64, target: f64 },
    A4 { eps0_a4: f64, eps0_a8: f64, target: f64 },
}

/// Simulates making one purified state, `sim.trials` times.
pub fn simulate_state_production(req: &StateRequest, p: &Protocols<f64>, sim: &SimConfig) -> Result<SimResult> {
    sim.check()?;
    match *req {
        StateRequest::A8 { eps0, target } => {
            let (eps0, target) = (ErrorProb::new(eps0)?, ErrorProb::new(target)?);
            let plan = a8_plan(eps0, target, p)?;
            let ladder = Ladder::new(&p.a8, eps0, target)?;
            let q = f64::from(p.a8.qubits_per_raw);
            Ok(run_trials(sim, |rng| {
                let (raw, _) = ladder.sample(rng, 1);
                TrialOutcome {
                    raw_states: raw as f64,
                    ancilla_raw_states: 0.0,
                    time_steps: plan.time_steps,
                    peak_qubits: q * raw as f64,
                }
            }))
        }
        StateRequest::A4 { eps0_a4, eps0_a8, target } => {
            let (e4, e8, target) = (ErrorProb::new(eps0_a4)?, ErrorProb::new(eps0_a8)?, ErrorProb::new(target)?);
            let plan = a4_plan(e4, e8, target, p)?;
            let factory = A4Factory::new(p, e4, e8, target)?;
            Ok(run_trials(sim, |rng| {
                let (raw4, raw8, peak, _) = factory.sample(rng, 1);
                TrialOutcome {
                    raw_states: raw4 as f64,
                    ancilla_raw_states: raw8 as f64,
                    time_steps: plan.time_steps,
                    peak_qubits: peak,
                }
            }))
        }
    }
}

/// Pool of `budget` qubits working through `slots` qubit-rounds of demand,
/// one batch per single-state plan time. Returns `(batches, peak in use)`.
fn drain_pool(slots: f64, budget: u64) -> (u64, f64) {
    let b = budget as f64;
    let mut remaining = slots;
    let mut batches = 0u64;
    let mut peak = 0.0f64;
    while remaining > 0.0 {
        let in_use = remaining.min(b);
        let free = b - in_use;
        debug_assert_eq!(in_use + free, b);
        peak = peak.max(in_use);
        remaining -= in_use;
        batches += 1;
    }
    (batches, peak)
}

/// Simulates the batched campaign for `demand` purified states.
///
/// `time_steps` is the distillation time and `raw_states` the raw states of
/// both species consumed over the campaign.
#[allow(clippy::too_many_arguments)]
pub fn simulate_campaign(
    demand: Demand,
    target: f64,
    eps0_a4: f64,
    eps0_a8: f64,
    qubit_budget: u64,
    p: &Protocols<f64>,
    sim: &SimConfig,
) -> Result<SimResult> {
    sim.check()?;
    let (e4, e8, t) = (ErrorProb::new(eps0_a4)?, ErrorProb::new(eps0_a8)?, ErrorProb::new(target)?);
    let plan8 = a8_plan(e8, t, p)?;
    let plan4 = a4_plan(e4, e8, t, p)?;
    let mut single = 0.0f64;
    if demand.a8 > 0 {
        single = single.max(plan8.qubits_peak);
    }
    if demand.a4 > 0 {
        single = single.max(plan4.qubits_peak);
    }
    if single >= qubit_budget as f64 {
        return Err(Error::InfeasibleBudget { needed: single, budget: qubit_budget });
    }
    let ladder8 = Ladder::new(&p.a8, e8, t)?;
    let factory4 = A4Factory::new(p, e4, e8, t)?;
    let q8 = f64::from(p.a8.qubits_per_raw);
    Ok(run_trials(sim, |rng| {
        let raw8 = if demand.a8 > 0 { ladder8.sample(rng, demand.a8).0 } else { 0 };
        let (raw4, anc8, _, slots4) = if demand.a4 > 0 { factory4.sample(rng, demand.a4) } else { (0, 0, 0.0, 0.0) };
        let (n8, peak8) = drain_pool(q8 * raw8 as f64, qubit_budget);
        let (n4, peak4) = drain_pool(slots4, qubit_budget);
        TrialOutcome {
            raw_states: (raw8 + raw4) as f64,
            ancilla_raw_states: anc8 as f64,
            time_steps: n8 as f64 * plan8.time_steps + n4 as f64 * plan4.time_steps,
            peak_qubits: peak8.max(peak4),
        }
    }))
}
