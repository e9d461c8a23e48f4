//! Published headline numbers reproduced through the public API.

use topofactor::distillation::{output_error, rounds_needed};
use topofactor::fib_compile::{base_braid, sk_plan, total_time_fib, BaseBraid};
use topofactor::gate_budget::{circuit_width_fib, gate_counts, ising_anyons};
use topofactor::ising_schedule::classify_and_schedule;
use topofactor::physical::{sample_area, step_rate, wall_clock};
use topofactor::{ErrorProb, KeyLength, ModelConfig, PhysicalParams, Regime, SchedulePolicy};

fn e(x: f64) -> ErrorProb {
    ErrorProb::new(x).unwrap()
}

fn l(bits: u64) -> KeyLength {
    KeyLength::new(bits).unwrap()
}

#[test]
fn about_a_billion_gates_at_128_bits() {
    let b = gate_counts::<f64>(l(128), &ModelConfig::default());
    assert!((0.9e9..=1.1e9).contains(&(b.n_total as f64)));
    assert!((0.9e-9..=1.1e-9).contains(&b.eps_gate));
    assert_eq!(ising_anyons(750_000_000), 3_000_000_000);
}

#[test]
fn distillation_caps_and_rounds() {
    let p = ModelConfig::default().protocols::<f64>();
    assert_eq!(rounds_needed(&p.a8, e(0.1), e(1e-9)).unwrap(), 4);
    assert!(output_error(&p.a8, e(0.38)).is_err());
    assert!(output_error(&p.a4, e(0.14)).is_err());
}

#[test]
fn ising_run_at_128_bits() {
    let cfg = ModelConfig::default();
    let r = classify_and_schedule(l(128), e(0.01), e(0.01), &SchedulePolicy::default(), &cfg).unwrap();
    assert!(r.feasible);
    assert!((1e10..=1e12).contains(&r.t_total));
    assert!((1e9..=1e10).contains(&r.total_anyons));
    let secs = wall_clock(r.t_total, &PhysicalParams::nu52());
    assert!((1e3..=1e5).contains(&secs), "{secs}");
}

#[test]
fn large_keys_return_to_regime_a() {
    let cfg = ModelConfig::default();
    let r = classify_and_schedule(l(4096), e(0.01), e(0.2), &SchedulePolicy::default(), &cfg).unwrap();
    assert_eq!(r.regime, Regime::A);
}

#[test]
fn fibonacci_register_and_braids() {
    assert_eq!(circuit_width_fib(l(128)), (259, 777));
    let m = ModelConfig::default().braid_model::<f64>();
    assert!(matches!(base_braid(e(1e-10), &m).unwrap(), BaseBraid::Found { length: 80, .. }));
    let plan = sk_plan(e(1e-12), &m).unwrap();
    assert_eq!((plan.n_sk, plan.total_length), (1, 400));
    let est = total_time_fib::<f64>(l(128), &ModelConfig::default()).unwrap();
    assert!((5e10..=2e11).contains(&est.time_steps));
    let secs = wall_clock(est.time_steps, &PhysicalParams::nu125());
    assert!((2e4..=4e4).contains(&secs), "{secs}");
}

#[test]
fn sample_rates_and_area() {
    let p = PhysicalParams::nu52();
    assert!((step_rate(&p) / 3e7 - 1.0).abs() < 0.02);
    assert!((3.0e3..=3.7e3).contains(&wall_clock(1e11, &p)));
    assert!((0.5e-2..=2e-2).contains(&sample_area(3e9, &p)));
    assert!((step_rate(&PhysicalParams::nu125()) / 3e6 - 1.0).abs() < 0.02);
}

#[test]
fn single_precision_tracks_double() {
    let cfg = ModelConfig::default();
    let e32 = |x: f32| topofactor::ErrorProb32::new(x).unwrap();
    let r32 = classify_and_schedule::<f32>(l(128), e32(0.01), e32(0.01), &SchedulePolicy::default(), &cfg).unwrap();
    let r64 = classify_and_schedule::<f64>(l(128), e(0.01), e(0.01), &SchedulePolicy::default(), &cfg).unwrap();
    assert_eq!(r32.regime, r64.regime);
    assert!((r32.t_total as f64 / r64.t_total - 1.0).abs() < 1e-3);
    let f32est = total_time_fib::<f32>(l(128), &cfg).unwrap();
    assert_eq!(f32est.plan.total_length, 73);
}
