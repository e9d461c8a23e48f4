//! Whole-run totals for the Ising machine.
//!
//! Purified states are made in batches that fill a fixed qubit pool. Within a
//! batch all states distill in parallel; batches run back to back, and every
//! qubit of a finished (or failed) round returns to the pool. A batch is
//! charged the serial time of one single-state plan.
//!
//! Regimes:
//! - A: the campaign finishes within the algorithm time, so distillation is
//!   interleaved with execution on the smallest pool that keeps up;
//! - B: distillation dominates and runs ahead of execution on the full pool;
//! - C: one purified state alone fills the pool.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::distillation::{a4_plan, a8_plan, DistillationPlan, ErrorProb, Protocols};
use crate::error::{Error, Result};
use crate::gate_budget::{fib_qubits, gate_counts, Demand, GateBudget, KeyLength};
use crate::scalar::{ceil_count, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    A,
    B,
    C,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::A => "A",
            Regime::B => "B",
            Regime::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Interleaved in regime A, batch-all otherwise.
    #[default]
    Auto,
    BatchAll,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePolicy {
    /// Pool size; `None` means `ceil(qubit_budget_fraction * n_total)`.
    pub qubit_budget: Option<u64>,
    pub mode: Mode,
    /// The pool is divided by this factor (time grows by about the same).
    pub tradeoff_factor: f64,
}

impl Default for SchedulePolicy {
    fn default() -> Self {
        Self { qubit_budget: None, mode: Mode::Auto, tradeoff_factor: 1.0 }
    }
}

impl SchedulePolicy {
    pub fn with_budget(qubit_budget: u64) -> Self {
        Self { qubit_budget: Some(qubit_budget), ..Self::default() }
    }

    /// Effective pool for a workload of `n_total` gates.
    pub fn resolve_budget(&self, n_total: u64, cfg: &ModelConfig) -> Result<u64> {
        if !(self.tradeoff_factor.is_finite() && self.tradeoff_factor > 0.0) {
            return Err(Error::InvalidInput("tradeoff_factor must be positive".into()));
        }
        let base = self
            .qubit_budget
            .unwrap_or_else(|| ceil_count(cfg.qubit_budget_fraction * n_total as f64));
        let b = ceil_count(base as f64 / self.tradeoff_factor);
        if b == 0 {
            return Err(Error::InvalidInput("qubit budget must be at least 1".into()));
        }
        Ok(b)
    }
}

/// Time steps to execute every gate once its magic states are at hand.
pub fn algorithm_time<T: Real>(budget: &GateBudget<T>, cfg: &ModelConfig) -> T {
    let m = cfg.measurement_steps;
    let t = budget.n_not as f64 * (cfg.exec_not_braid + m * cfg.exec_not_measure)
        + budget.n_cnot as f64 * (cfg.exec_cnot_braid + m * cfg.exec_cnot_measure)
        + budget.n_ccnot as f64 * (cfg.exec_ccnot_braid + m * cfg.exec_ccnot_measure);
    T::lit(t)
}

/// `(braid, measure)` operation counts of gate execution.
fn execution_ops(budget: &GateBudget<impl Real>, cfg: &ModelConfig) -> (f64, f64) {
    let (n, c, t) = (budget.n_not as f64, budget.n_cnot as f64, budget.n_ccnot as f64);
    (
        n * cfg.exec_not_braid + c * cfg.exec_cnot_braid + t * cfg.exec_ccnot_braid,
        n * cfg.exec_not_measure + c * cfg.exec_cnot_measure + t * cfg.exec_ccnot_measure,
    )
}

/// Share of all operations (distillation and execution) that are measurements.
pub fn measurement_fraction<T: Real>(
    budget: &GateBudget<T>,
    a8: &DistillationPlan<T>,
    a4: &DistillationPlan<T>,
    cfg: &ModelConfig,
) -> T {
    let (eb, em) = execution_ops(budget, cfg);
    let d8 = budget.demand_a8 as f64;
    let d4 = budget.demand_a4 as f64;
    let braid = eb + d8 * a8.ops_braid.as_f64() + d4 * a4.ops_braid.as_f64();
    let measure = em + d8 * a8.ops_measure.as_f64() + d4 * a4.ops_measure.as_f64();
    if braid + measure > 0.0 {
        T::lit(measure / (braid + measure))
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign<T> {
    pub qubit_budget: u64,
    /// Largest single-state peak among the species in demand.
    pub single_state_qubits: T,
    /// Pool slots one purified state ties up over its whole ladder.
    pub slots_a8: T,
    pub slots_a4: T,
    pub batches_a8: u64,
    pub batches_a4: u64,
    pub t_dist: T,
    pub peak_qubits: T,
}

/// Plans for both species, evaluated against any pool size.
#[derive(Debug, Clone)]
struct Factory<T> {
    demand: Demand,
    a8: DistillationPlan<T>,
    a4: DistillationPlan<T>,
    single: T,
}

impl<T: Real> Factory<T> {
    fn new(demand: Demand, a8: DistillationPlan<T>, a4: DistillationPlan<T>) -> Self {
        let mut single = T::zero();
        if demand.a8 > 0 {
            single = single.max(a8.qubits_peak);
        }
        if demand.a4 > 0 {
            single = single.max(a4.qubits_peak);
        }
        Self { demand, a8, a4, single }
    }

    fn fits(&self, b: u64) -> bool {
        self.single < T::from_count(b)
    }

    fn run(&self, b: u64) -> Result<Campaign<T>> {
        if !self.fits(b) {
            return Err(Error::InfeasibleBudget { needed: self.single.as_f64(), budget: b });
        }
        let pool = T::from_count(b);
        let need8 = T::from_count(self.demand.a8) * self.a8.slot_qubits;
        let need4 = T::from_count(self.demand.a4) * self.a4.slot_qubits;
        let batches_a8 = ceil_count(need8 / pool);
        let batches_a4 = ceil_count(need4 / pool);
        let t_dist = T::from_count(batches_a8) * self.a8.time_steps + T::from_count(batches_a4) * self.a4.time_steps;
        Ok(Campaign {
            qubit_budget: b,
            single_state_qubits: self.single,
            slots_a8: self.a8.slot_qubits,
            slots_a4: self.a4.slot_qubits,
            batches_a8,
            batches_a4,
            t_dist,
            peak_qubits: need8.min(pool).max(need4.min(pool)),
        })
    }

    /// Latency before the first states of each species are ready.
    fn startup(&self) -> T {
        self.a8.time_steps.max(self.a4.time_steps)
    }
}

/// Batched campaign producing `demand` purified states to error `target`.
pub fn distillation_campaign<T: Real>(
    demand: Demand,
    target: ErrorProb<T>,
    eps0_a4: ErrorProb<T>,
    eps0_a8: ErrorProb<T>,
    qubit_budget: u64,
    protocols: &Protocols<T>,
) -> Result<Campaign<T>> {
    let a8 = a8_plan(eps0_a8, target, protocols)?;
    let a4 = a4_plan(eps0_a4, eps0_a8, target, protocols)?;
    Factory::new(demand, a8, a4).run(qubit_budget)
}

/// Campaign for a full gate budget under `policy`.
pub fn budget_campaign<T: Real>(
    budget: &GateBudget<T>,
    eps0_a4: ErrorProb<T>,
    eps0_a8: ErrorProb<T>,
    policy: &SchedulePolicy,
    cfg: &ModelConfig,
) -> Result<Campaign<T>> {
    let b = policy.resolve_budget(budget.n_total, cfg)?;
    let target = ErrorProb::new(budget.eps_gate)?;
    distillation_campaign(budget.demand(), target, eps0_a4, eps0_a8, b, &cfg.protocols())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport<T> {
    pub key_length: KeyLength,
    pub eps0_a4: T,
    pub eps0_a8: T,
    pub regime: Regime,
    /// Mode actually used after resolving `Auto`.
    pub mode: Mode,
    pub feasible: bool,
    pub qubit_budget: u64,
    pub single_state_qubits: T,
    pub rounds_a8: u32,
    pub rounds_a4: u32,
    pub batches_a8: u64,
    pub batches_a4: u64,
    pub t_alg: T,
    pub t_dist: T,
    pub t_total: T,
    /// Distillation pool.
    pub total_qubits: T,
    /// Logical register, counted on top of the pool for anyons.
    pub register_qubits: u64,
    pub total_anyons: T,
    pub measurement_fraction: T,
}

impl<T: Real> ScheduleReport<T> {
    /// Regime-C row for an input the protocols cannot distill at all.
    pub fn undistillable(l: KeyLength, eps0_a4: T, eps0_a8: T, policy: &SchedulePolicy, cfg: &ModelConfig) -> Self {
        let budget = gate_counts::<T>(l, cfg);
        let inf = T::infinity();
        Self {
            key_length: l,
            eps0_a4,
            eps0_a8,
            regime: Regime::C,
            mode: policy.mode,
            feasible: false,
            qubit_budget: policy.resolve_budget(budget.n_total, cfg).unwrap_or(0),
            single_state_qubits: inf,
            rounds_a8: 0,
            rounds_a4: 0,
            batches_a8: 0,
            batches_a4: 0,
            t_alg: algorithm_time(&budget, cfg),
            t_dist: inf,
            t_total: inf,
            total_qubits: inf,
            register_qubits: fib_qubits(l),
            total_anyons: inf,
            measurement_fraction: T::nan(),
        }
    }
}

pub fn classify_and_schedule<T: Real>(
    l: KeyLength,
    eps0_a4: ErrorProb<T>,
    eps0_a8: ErrorProb<T>,
    policy: &SchedulePolicy,
    cfg: &ModelConfig,
) -> Result<ScheduleReport<T>> {
    let budget = gate_counts::<T>(l, cfg);
    let protocols = cfg.protocols::<T>();
    let target = ErrorProb::new(budget.eps_gate)?;
    let a8 = a8_plan(eps0_a8, target, &protocols)?;
    let a4 = a4_plan(eps0_a4, eps0_a8, target, &protocols)?;
    let b = policy.resolve_budget(budget.n_total, cfg)?;
    let t_alg = algorithm_time(&budget, cfg);
    let fraction = measurement_fraction(&budget, &a8, &a4, cfg);
    let register = fib_qubits(l);
    let (rounds_a8, rounds_a4) = (a8.rounds, a4.rounds);
    let factory = Factory::new(budget.demand(), a8, a4);

    let mut report = ScheduleReport {
        key_length: l,
        eps0_a4: eps0_a4.value(),
        eps0_a8: eps0_a8.value(),
        regime: Regime::C,
        mode: policy.mode,
        feasible: false,
        qubit_budget: b,
        single_state_qubits: factory.single,
        rounds_a8,
        rounds_a4,
        batches_a8: 0,
        batches_a4: 0,
        t_alg,
        t_dist: T::infinity(),
        t_total: T::infinity(),
        total_qubits: T::infinity(),
        register_qubits: register,
        total_anyons: T::infinity(),
        measurement_fraction: fraction,
    };
    if !factory.fits(b) {
        return Ok(report);
    }

    let full = factory.run(b)?;
    let regime = if full.t_dist <= t_alg { Regime::A } else { Regime::B };
    let mode = match policy.mode {
        Mode::Auto if regime == Regime::A => Mode::Interleaved,
        Mode::Auto => Mode::BatchAll,
        m => m,
    };

    let (campaign, t_total, pool) = match mode {
        Mode::Interleaved => {
            let startup = factory.startup();
            let limit = (T::one() + T::lit(cfg.interleave_slack)) * t_alg;
            let total_at = |c: &Campaign<T>| c.t_dist.max(t_alg) + startup;
            let ok = |x: u64| factory.run(x).map(|c| total_at(&c) <= limit).unwrap_or(false);
            // smallest pool that still keeps pace; the full pool if none does
            let mut hi = b;
            if ok(b) {
                let mut lo = ceil_count(factory.single).max(1);
                while !factory.fits(lo) {
                    lo += 1;
                }
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if ok(mid) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
            }
            let c = factory.run(hi)?;
            let t = total_at(&c);
            (c, t, T::from_count(hi))
        }
        _ => {
            let t = full.t_dist + t_alg;
            let pool = full.peak_qubits;
            (full, t, pool)
        }
    };

    report.regime = regime;
    report.mode = mode;
    report.feasible = true;
    report.batches_a8 = campaign.batches_a8;
    report.batches_a4 = campaign.batches_a4;
    report.t_dist = campaign.t_dist;
    report.t_total = t_total;
    report.total_qubits = pool;
    report.total_anyons = T::lit(4.0) * (pool + T::from_count(register));
    Ok(report)
}

/// Like [`classify_and_schedule`] but folds threshold violations into a
/// regime-C report, as sweeps need.
pub fn schedule_point<T: Real>(
    l: KeyLength,
    eps0_a4: T,
    eps0_a8: T,
    policy: &SchedulePolicy,
    cfg: &ModelConfig,
) -> Result<ScheduleReport<T>> {
    match classify_and_schedule(l, ErrorProb::new(eps0_a4)?, ErrorProb::new(eps0_a8)?, policy, cfg) {
        Err(Error::AboveThreshold { .. }) => Ok(ScheduleReport::undistillable(l, eps0_a4, eps0_a8, policy, cfg)),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e(x: f64) -> ErrorProb<f64> {
        ErrorProb::new(x).unwrap()
    }

    fn l(bits: u64) -> KeyLength {
        KeyLength::new(bits).unwrap()
    }

    fn cfg() -> ModelConfig {
        ModelConfig::default()
    }

    fn report(bits: u64, e4: f64, e8: f64, policy: &SchedulePolicy) -> ScheduleReport<f64> {
        classify_and_schedule(l(bits), e(e4), e(e8), policy, &cfg()).unwrap()
    }

    #[test]
    fn algorithm_time_is_linear() {
        let c = cfg();
        let mut b = gate_counts::<f64>(l(128), &c);
        let direct = b.n_not as f64 * 2.0 + b.n_cnot as f64 * 30.0 + b.n_ccnot as f64 * 250.0;
        assert_relative_eq!(algorithm_time(&b, &c), direct, max_relative = 1e-15);
        assert_relative_eq!(algorithm_time(&b, &c), 1.3726e11, max_relative = 1e-3);
        let mut doubled = c.clone();
        for x in [
            &mut doubled.exec_not_braid,
            &mut doubled.exec_not_measure,
            &mut doubled.exec_cnot_braid,
            &mut doubled.exec_cnot_measure,
            &mut doubled.exec_ccnot_braid,
            &mut doubled.exec_ccnot_measure,
        ] {
            *x *= 2.0;
        }
        assert_relative_eq!(algorithm_time(&b, &doubled), 2.0 * direct, max_relative = 1e-15);
        b.n_not = 0;
        b.n_cnot = 0;
        b.n_ccnot = 0;
        assert_eq!(algorithm_time(&b, &c), 0.0);
    }

    #[test]
    fn single_state_campaign_is_one_plan() {
        let p = cfg().protocols::<f64>();
        let camp = distillation_campaign(Demand { a8: 1, a4: 0 }, e(1e-9), e(0.01), e(0.1), 1 << 40, &p).unwrap();
        assert_eq!(camp.batches_a8, 1);
        assert_eq!(camp.batches_a4, 0);
        assert_eq!(camp.t_dist, 4.0 * p.a8.round_time());
    }

    #[test]
    fn campaign_rejects_small_pool() {
        let p = cfg().protocols::<f64>();
        let plan = a8_plan(e(0.1), e(1e-9), &p).unwrap();
        let b = plan.qubits_peak.floor() as u64;
        let err = distillation_campaign(Demand { a8: 10, a4: 0 }, e(1e-9), e(0.01), e(0.1), b, &p).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBudget { .. }));
        assert!(err.to_string().starts_with("regime C"));
        assert!(distillation_campaign(Demand { a8: 10, a4: 0 }, e(1e-9), e(0.01), e(0.1), b + 1, &p).is_ok());
    }

    #[test]
    fn campaign_time_from_ceil_division() {
        let p = cfg().protocols::<f64>();
        let a8 = a8_plan(e(0.1), e(1e-9), &p).unwrap();
        let a4 = a4_plan(e(0.01), e(0.1), e(1e-9), &p).unwrap();
        let d = Demand { a8: 1000, a4: 300 };
        let b = 2_000_000;
        let camp = distillation_campaign(d, e(1e-9), e(0.01), e(0.1), b, &p).unwrap();
        let n8 = (1000.0 * a8.slot_qubits / b as f64).ceil();
        let n4 = (300.0 * a4.slot_qubits / b as f64).ceil();
        assert_eq!(camp.batches_a8 as f64, n8);
        assert_eq!(camp.batches_a4 as f64, n4);
        assert_relative_eq!(camp.t_dist, n8 * a8.time_steps + n4 * a4.time_steps, max_relative = 1e-15);
        assert!(camp.peak_qubits <= b as f64);
    }

    #[test]
    fn l128_defaults() {
        let r = report(128, 0.01, 0.01, &SchedulePolicy::default());
        assert_eq!(r.regime, Regime::B);
        assert!(r.feasible);
        assert!((1e10..=1e12).contains(&r.t_total), "{}", r.t_total);
        assert!((1e9..=1e10).contains(&r.total_anyons), "{}", r.total_anyons);
        assert!((0.05..=0.08).contains(&r.measurement_fraction), "{}", r.measurement_fraction);
        assert!(r.total_qubits <= r.qubit_budget as f64);
        assert_eq!(r.t_total, r.t_dist + r.t_alg);
    }

    #[test]
    fn slow_measurements_less_than_double_the_time() {
        let base = report(128, 0.01, 0.01, &SchedulePolicy::default());
        let mut c = cfg();
        c.measurement_steps = 10.0;
        let slow = classify_and_schedule(l(128), e(0.01), e(0.01), &SchedulePolicy::default(), &c).unwrap();
        let ratio = slow.t_total / base.t_total;
        assert!(ratio > 1.0 && ratio <= 2.0, "{ratio}");
        // op counts, not durations, so the fraction is unchanged
        assert_relative_eq!(slow.measurement_fraction, base.measurement_fraction, max_relative = 1e-12);
    }

    #[test]
    fn no_measurements_zero_fraction() {
        let mut c = cfg();
        c.a8_round_ops_measure = 0.0;
        c.a4_round_ops_measure = 0.0;
        c.exec_cnot_measure = 0.0;
        c.exec_ccnot_measure = 0.0;
        let r = classify_and_schedule(l(64), e(0.01), e(0.01), &SchedulePolicy::default(), &c).unwrap();
        assert_eq!(r.measurement_fraction, 0.0);
    }

    #[test]
    fn cap_is_regime_c_or_threshold() {
        let policy = SchedulePolicy::default();
        assert!(matches!(
            classify_and_schedule(l(512), e(0.01), e(0.38), &policy, &cfg()),
            Err(Error::AboveThreshold { .. })
        ));
        let r: ScheduleReport<f64> = schedule_point(l(512), 0.01, 0.38, &policy, &cfg()).unwrap();
        assert_eq!(r.regime, Regime::C);
        assert!(!r.feasible && r.t_total.is_infinite() && r.total_qubits.is_infinite());
        let near = report(512, 0.01, 0.37, &policy);
        assert_eq!(near.regime, Regime::C);
        assert!(!near.feasible && near.t_dist.is_infinite());
    }

    #[test]
    fn interleaving_uses_fewer_qubits() {
        let auto = report(512, 1e-4, 1e-4, &SchedulePolicy::default());
        assert_eq!(auto.regime, Regime::A);
        assert_eq!(auto.mode, Mode::Interleaved);
        let batch = report(512, 1e-4, 1e-4, &SchedulePolicy { mode: Mode::BatchAll, ..Default::default() });
        assert!(auto.total_qubits < batch.total_qubits);
        assert!(auto.t_total <= auto.t_alg * (1.0 + cfg().interleave_slack));
        assert!(batch.t_total >= auto.t_dist.max(auto.t_alg));
    }

    #[test]
    fn interleaved_pool_is_minimal() {
        let c = cfg();
        let r = report(512, 0.01, 0.03, &SchedulePolicy::default());
        assert_eq!((r.regime, r.mode), (Regime::A, Mode::Interleaved));
        let pool = r.total_qubits as u64;
        let lim = (1.0 + c.interleave_slack) * r.t_alg;
        let startup_free = |b: u64| {
            let budget = gate_counts::<f64>(l(512), &c);
            budget_campaign(&budget, e(0.01), e(0.03), &SchedulePolicy::with_budget(b), &c)
        };
        let at = startup_free(pool).unwrap();
        assert_eq!(at.t_dist, r.t_dist);
        match startup_free(pool - 1) {
            Ok(below) => assert!(below.t_dist.max(r.t_alg) + (r.t_total - r.t_dist.max(r.t_alg)) > lim),
            Err(err) => assert!(matches!(err, Error::InfeasibleBudget { .. })),
        }
    }

    #[test]
    fn large_key_returns_to_regime_a() {
        let r = report(4096, 0.01, 0.2, &SchedulePolicy::default());
        assert_eq!(r.regime, Regime::A);
    }

    #[test]
    fn regimes_partition_the_sweep() {
        let policy = SchedulePolicy::default();
        let seq: Vec<Regime> = (1..380)
            .map(|i| schedule_point(l(512), 0.01, i as f64 / 1000.0, &policy, &cfg()).unwrap().regime)
            .collect();
        let mut changes: Vec<Regime> = vec![seq[0]];
        for r in &seq {
            if r != changes.last().unwrap() {
                changes.push(*r);
            }
        }
        assert_eq!(changes, vec![Regime::A, Regime::B, Regime::C]);
    }

    #[test]
    fn tradeoff_factor_scales_pool() {
        let c = cfg();
        let budget = gate_counts::<f64>(l(128), &c);
        let base = ceil_count(0.75 * budget.n_total as f64);
        let p = SchedulePolicy { tradeoff_factor: 4.0, ..Default::default() };
        assert_eq!(p.resolve_budget(budget.n_total, &c).unwrap(), ceil_count(base as f64 / 4.0));
        assert!(SchedulePolicy { tradeoff_factor: 0.0, ..Default::default() }.resolve_budget(1, &c).is_err());
    }

    #[test]
    fn f32_regime_matches_f64() {
        let c = cfg();
        let policy = SchedulePolicy::default();
        for eps8 in [0.01f32, 0.2, 0.36] {
            let r32 = schedule_point(l(512), 0.01f32, eps8, &policy, &c).unwrap();
            let r64 = schedule_point(l(512), 0.01, eps8 as f64, &policy, &c).unwrap();
            assert_eq!(r32.regime, r64.regime, "{eps8}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn total_time_nonincreasing_in_budget(e8 in 0.005f64..0.3, f in 0.2f64..1.0, g in 1.0f64..3.0) {
            let c = cfg();
            let budget = gate_counts::<f64>(l(256), &c);
            let b = ceil_count(0.75 * budget.n_total as f64);
            let small = (b as f64 * f) as u64;
            let large = (small as f64 * g) as u64;
            let run = |x: u64| schedule_point(l(256), 0.01, e8, &SchedulePolicy::with_budget(x), &c).unwrap();
            let (rs, rl) = (run(small), run(large));
            prop_assert!(rl.t_total <= rs.t_total || rs.t_total.is_infinite());
            if rl.feasible && rl.mode == Mode::BatchAll {
                prop_assert!(rl.total_qubits <= large as f64);
            }
        }
    }
}
