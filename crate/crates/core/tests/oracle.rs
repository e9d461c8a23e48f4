//! Monte Carlo factory against the closed-form expectations.

use topofactor::distillation::{a4_plan, a8_plan, SuccessModel};
use topofactor::ising_schedule::distillation_campaign;
use topofactor::mc_oracle::{simulate_campaign, simulate_state_production, Estimate, SimConfig, StateRequest};
use topofactor::{Demand, ErrorProb, ModelConfig, Protocols};

const TRIALS: u64 = 10_000;

fn p() -> Protocols {
    ModelConfig::default().protocols()
}

fn e(x: f64) -> ErrorProb {
    ErrorProb::new(x).unwrap()
}

fn within_3se(est: &Estimate, expected: f64) -> bool {
    (est.mean - expected).abs() <= 3.0 * est.std_error
}

#[test]
fn a8_raw_states_match_expectation() {
    for (i, eps0) in [0.01, 0.1, 0.3].into_iter().enumerate() {
        for (j, target) in [1e-6, 1e-9].into_iter().enumerate() {
            let plan = a8_plan(e(eps0), e(target), &p()).unwrap();
            let sim = SimConfig::new(1000 + 10 * i as u64 + j as u64, TRIALS);
            let r = simulate_state_production(&StateRequest::A8 { eps0, target }, &p(), &sim).unwrap();
            assert!(
                within_3se(&r.raw_states, plan.expected_raw),
                "eps0={eps0} target={target}: {:?} vs {}",
                r.raw_states,
                plan.expected_raw
            );
            assert_eq!(r.time_steps.mean, plan.time_steps);
            assert!(within_3se(&r.peak_qubits, plan.qubits_peak));
        }
    }
}

#[test]
fn a4_raw_and_ancilla_states_match_expectation() {
    for (i, (e4, e8)) in [(0.01, 0.01), (0.1, 0.1), (0.13, 0.3)].into_iter().enumerate() {
        for (j, target) in [1e-6, 1e-9].into_iter().enumerate() {
            let plan = a4_plan(e(e4), e(e8), e(target), &p()).unwrap();
            let sim = SimConfig::new(2000 + 10 * i as u64 + j as u64, TRIALS);
            let req = StateRequest::A4 { eps0_a4: e4, eps0_a8: e8, target };
            let r = simulate_state_production(&req, &p(), &sim).unwrap();
            assert!(within_3se(&r.raw_states, plan.expected_raw), "{e4}/{e8}/{target}: {:?} vs {}", r.raw_states, plan.expected_raw);
            assert!(
                within_3se(&r.ancilla_raw_states, plan.expected_ancilla_raw),
                "{e4}/{e8}/{target}: {:?} vs {}",
                r.ancilla_raw_states,
                plan.expected_ancilla_raw
            );
            // expectation of a maximum bounds the maximum of expectations
            assert!(r.peak_qubits.mean + 3.0 * r.peak_qubits.std_error >= plan.qubits_peak);
        }
    }
}

/// Budget that puts the expected load half way between two batch counts.
fn centered_budget(slots: f64, batches: u64) -> u64 {
    (slots / (batches as f64 + 0.5)).round() as u64
}

#[test]
fn campaign_matches_ceil_division_model() {
    let d = Demand { a8: 1_000, a4: 200 };
    for (i, (e4, e8)) in [(0.01, 0.01), (0.1, 0.1), (0.13, 0.3)].into_iter().enumerate() {
        for (j, target) in [1e-6, 1e-9].into_iter().enumerate() {
            let a8 = a8_plan(e(e8), e(target), &p()).unwrap();
            let a4 = a4_plan(e(e4), e(e8), e(target), &p()).unwrap();
            let slots = d.a8 as f64 * a8.slot_qubits + d.a4 as f64 * a4.slot_qubits;
            let single = a8.qubits_peak.max(a4.qubits_peak);
            let b = centered_budget(d.a4 as f64 * a4.slot_qubits, 2).max(single as u64 + 1);
            let analytic = distillation_campaign(d, e(target), e(e4), e(e8), b, &p()).unwrap();
            let sim = SimConfig::new(3000 + 10 * i as u64 + j as u64, TRIALS);
            let r = simulate_campaign(d, target, e4, e8, b, &p(), &sim).unwrap();
            let raw = d.a8 as f64 * a8.expected_raw + d.a4 as f64 * a4.expected_raw;
            assert!(within_3se(&r.raw_states, raw), "{e4}/{e8}/{target}: {:?} vs {raw}", r.raw_states);
            assert!(
                within_3se(&r.time_steps, analytic.t_dist),
                "{e4}/{e8}/{target} b={b} slots={slots}: {:?} vs {}",
                r.time_steps,
                analytic.t_dist
            );
        }
    }
}

#[test]
fn thousand_a8_states_at_point_one() {
    let d = Demand { a8: 1_000, a4: 0 };
    let plan = a8_plan(e(0.1), e(1e-9), &p()).unwrap();
    let b = centered_budget(d.a8 as f64 * plan.slot_qubits, 3);
    let analytic = distillation_campaign(d, e(1e-9), e(0.01), e(0.1), b, &p()).unwrap();
    let r = simulate_campaign(d, 1e-9, 0.01, 0.1, b, &p(), &SimConfig::new(11, 1_000)).unwrap();
    let ratio = r.time_steps.mean / analytic.t_dist;
    assert!((0.9..=1.1).contains(&ratio), "{ratio}");
}

#[test]
fn perfect_success_is_exact() {
    let mut q = p();
    q.a8.success_model = SuccessModel::Perfect;
    q.a4.success_model = SuccessModel::Perfect;
    let d = Demand { a8: 300, a4: 40 };
    let plan8 = a8_plan(e(0.2), e(1e-9), &q).unwrap();
    let plan4 = a4_plan(e(0.05), e(0.2), e(1e-9), &q).unwrap();
    let b = centered_budget(d.a4 as f64 * plan4.slot_qubits, 1);
    let analytic = distillation_campaign(d, e(1e-9), e(0.05), e(0.2), b, &q).unwrap();
    let r = simulate_campaign(d, 1e-9, 0.05, 0.2, b, &q, &SimConfig::new(5, 200)).unwrap();
    assert_eq!(r.time_steps.mean, analytic.t_dist);
    assert_eq!(r.time_steps.std_error, 0.0);
    assert_eq!(r.raw_states.mean, d.a8 as f64 * plan8.expected_raw + d.a4 as f64 * plan4.expected_raw);
    let one = simulate_campaign(Demand { a8: 1, a4: 0 }, 1e-9, 0.05, 0.2, u64::MAX / 4, &q, &SimConfig::new(5, 10)).unwrap();
    assert_eq!(one.time_steps.mean, plan8.rounds as f64 * q.a8.round_time());
}

#[test]
fn noisier_input_costs_more_with_paired_seeds() {
    let sim = SimConfig::new(77, 2_000);
    let mut prev = 0.0;
    for eps0 in [0.01, 0.05, 0.12, 0.2, 0.3, 0.35] {
        let r = simulate_state_production(&StateRequest::A8 { eps0, target: 1e-9 }, &p(), &sim).unwrap();
        assert!(r.raw_states.mean >= prev, "{eps0}");
        prev = r.raw_states.mean;
    }
}
