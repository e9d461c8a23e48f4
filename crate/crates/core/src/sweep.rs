//! Figure-style parameter sweeps and their CSV form.
//!
//! Grid points are evaluated in parallel and returned in grid order.

use rayon::prelude::*;

use crate::config::ModelConfig;
use crate::distillation::{a4_plan, a8_plan, monotonize, ErrorProb, Protocols};
use crate::error::{Error, Result};
use crate::fib_compile::total_time_fib;
use crate::gate_budget::KeyLength;
use crate::ising_schedule::{schedule_point, SchedulePolicy, ScheduleReport};

pub const FIG1_TARGETS: [f64; 3] = [1e-9, 1e-11, 1e-13];
pub const FIG2_LENGTHS: [u64; 3] = [128, 256, 512];
/// The initial error held fixed while the other one is swept.
pub const PINNED_EPS: f64 = 0.01;

/// `0.001, 0.002, ...` strictly below `cap`.
pub fn milli_grid(cap: f64) -> Vec<f64> {
    (1..).map(|i| i as f64 / 1000.0).take_while(|&x| x < cap).collect()
}

/// Applies a running maximum to one column of a row series.
fn monotonize_by<R>(rows: &mut [R], get: impl Fn(&R) -> f64, set: impl Fn(&mut R, f64)) {
    let curve: Vec<(f64, f64)> = rows.iter().map(|r| (0.0, get(r))).collect();
    for (r, (_, y)) in rows.iter_mut().zip(monotonize(&curve)) {
        set(r, y);
    }
}

pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.5e}")
    }
}

/// Whole-number quantity; non-finite values print like floats.
pub fn fmt_count(x: f64) -> String {
    if x.is_finite() {
        format!("{:.0}", x.round())
    } else {
        fmt_float(x)
    }
}

pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = R::HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.fields().join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1aRow {
    pub target: f64,
    pub eps0: f64,
    pub rounds: u32,
    pub expected_raw: f64,
    pub qubits_peak: f64,
}

impl CsvRow for Fig1aRow {
    const HEADER: &'static [&'static str] = &["target", "eps0", "rounds", "expected_raw", "qubits_peak"];
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.target),
            fmt_float(self.eps0),
            self.rounds.to_string(),
            fmt_float(self.expected_raw),
            fmt_float(self.qubits_peak),
        ]
    }
}

/// Qubits for one |a8> state against its initial error, one series per target.
pub fn fig1a(p: &Protocols<f64>, targets: &[f64], eps: &[f64], raw: bool) -> Result<Vec<Fig1aRow>> {
    let mut out = Vec::with_capacity(targets.len() * eps.len());
    for &target in targets {
        let t = ErrorProb::new(target)?;
        let mut series = eps
            .par_iter()
            .map(|&e0| {
                let plan = a8_plan(ErrorProb::new(e0)?, t, p)?;
                Ok(Fig1aRow {
                    target,
                    eps0: e0,
                    rounds: plan.rounds,
                    expected_raw: plan.expected_raw,
                    qubits_peak: plan.qubits_peak,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if !raw {
            monotonize_by(&mut series, |r| r.expected_raw, |r, y| r.expected_raw = y);
            monotonize_by(&mut series, |r| r.qubits_peak, |r, y| r.qubits_peak = y);
        }
        out.extend(series);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1bRow {
    pub target: f64,
    pub eps0_a4: f64,
    pub rounds: u32,
    pub qubits_a4: f64,
    pub qubits_a8: f64,
    pub qubits_total: f64,
}

impl CsvRow for Fig1bRow {
    const HEADER: &'static [&'static str] = &["target", "eps0_a4", "rounds", "qubits_a4", "qubits_a8", "qubits_total"];
    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.target),
            fmt_float(self.eps0_a4),
            self.rounds.to_string(),
            fmt_float(self.qubits_a4),
            fmt_float(self.qubits_a8),
            fmt_float(self.qubits_total),
        ]
    }
}

/// Qubits for one |a4> state, split into the |a4> side and the |a8> ancilla
/// side, with the |a8> initial error fixed at `eps0_a8`.
pub fn fig1b(p: &Protocols<f64>, eps0_a8: f64, targets: &[f64], eps: &[f64], raw: bool) -> Result<Vec<Fig1bRow>> {
    let e8 = ErrorProb::new(eps0_a8)?;
    let mut out = Vec::with_capacity(targets.len() * eps.len());
    for &target in targets {
        let t = ErrorProb::new(target)?;
        let mut series = eps
            .par_iter()
            .map(|&e0| {
                let plan = a4_plan(ErrorProb::new(e0)?, e8, t, p)?;
                Ok(Fig1bRow {
                    target,
                    eps0_a4: e0,
                    rounds: plan.rounds,
                    qubits_a4: plan.qubits_primary,
                    qubits_a8: plan.qubits_ancilla,
                    qubits_total: plan.qubits_peak,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if !raw {
            monotonize_by(&mut series, |r| r.qubits_a4, |r, y| r.qubits_a4 = y);
            monotonize_by(&mut series, |r| r.qubits_a8, |r, y| r.qubits_a8 = y);
            monotonize_by(&mut series, |r| r.qubits_total, |r, y| r.qubits_total = y);
        }
        out.extend(series);
    }
    Ok(out)
}

impl CsvRow for ScheduleReport<f64> {
    const HEADER: &'static [&'static str] = &[
        "L",
        "eps0_a4",
        "eps0_a8",
        "regime",
        "total_qubits",
        "total_anyons",
        "t_alg",
        "t_dist",
        "t_total",
        "measurement_fraction",
    ];
    fn fields(&self) -> Vec<String> {
        vec![
            self.key_length.bits().to_string(),
            fmt_float(self.eps0_a4),
            fmt_float(self.eps0_a8),
            self.regime.to_string(),
            fmt_count(self.total_qubits),
            fmt_count(self.total_anyons),
            fmt_float(self.t_alg),
            fmt_float(self.t_dist),
            fmt_float(self.t_total),
            fmt_float(self.measurement_fraction),
        ]
    }
}

fn key(bits: u64) -> Result<KeyLength> {
    KeyLength::new(bits)
}

fn schedule_series(
    cfg: &ModelConfig,
    policy: &SchedulePolicy,
    points: &[(u64, f64, f64)],
    raw: bool,
) -> Result<Vec<ScheduleReport<f64>>> {
    let mut rows = points
        .par_iter()
        .map(|&(l, e4, e8)| schedule_point(key(l)?, e4, e8, policy, cfg))
        .collect::<Result<Vec<_>>>()?;
    if !raw {
        monotonize_schedule(&mut rows);
    }
    Ok(rows)
}

fn monotonize_schedule(rows: &mut [ScheduleReport<f64>]) {
    monotonize_by(rows, |r| r.t_dist, |r, y| r.t_dist = y);
    monotonize_by(rows, |r| r.t_total, |r, y| r.t_total = y);
    monotonize_by(rows, |r| r.total_qubits, |r, y| r.total_qubits = y);
    monotonize_by(rows, |r| r.total_anyons, |r, y| r.total_anyons = y);
}

/// Totals against each initial error, the other pinned at 0.01: first the
/// |a8> sweep, then the |a4> sweep, for every key length.
pub fn fig2(
    cfg: &ModelConfig,
    policy: &SchedulePolicy,
    lengths: &[u64],
    eps_a8: &[f64],
    eps_a4: &[f64],
    raw: bool,
) -> Result<Vec<ScheduleReport<f64>>> {
    let mut out = Vec::new();
    for &l in lengths {
        let pts: Vec<_> = eps_a8.iter().map(|&e| (l, PINNED_EPS, e)).collect();
        out.extend(schedule_series(cfg, policy, &pts, raw)?);
        let pts: Vec<_> = eps_a4.iter().map(|&e| (l, e, PINNED_EPS)).collect();
        out.extend(schedule_series(cfg, policy, &pts, raw)?);
    }
    Ok(out)
}

/// Full cartesian grid; series run along `eps_a8` for each `(L, eps0_a4)`.
pub fn ising_grid(
    cfg: &ModelConfig,
    policy: &SchedulePolicy,
    lengths: &[u64],
    eps_a4: &[f64],
    eps_a8: &[f64],
    raw: bool,
) -> Result<Vec<ScheduleReport<f64>>> {
    let mut out = Vec::new();
    for &l in lengths {
        for &e4 in eps_a4 {
            let pts: Vec<_> = eps_a8.iter().map(|&e8| (l, e4, e8)).collect();
            out.extend(schedule_series(cfg, policy, &pts, raw)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig4Row {
    pub l: u64,
    pub n_total: u64,
    pub eps_required: f64,
    pub base_length: u32,
    pub n_sk: u32,
    pub total_length: u64,
    pub time_steps: f64,
}

impl CsvRow for Fig4Row {
    const HEADER: &'static [&'static str] =
        &["L", "n_total", "eps_required", "base_length", "n_sk", "total_length", "time_steps"];
    fn fields(&self) -> Vec<String> {
        vec![
            self.l.to_string(),
            self.n_total.to_string(),
            fmt_float(self.eps_required),
            self.base_length.to_string(),
            self.n_sk.to_string(),
            self.total_length.to_string(),
            fmt_float(self.time_steps),
        ]
    }
}

/// Fibonacci run time against key length.
pub fn fig4(cfg: &ModelConfig, lengths: &[u64], raw: bool) -> Result<Vec<Fig4Row>> {
    let mut rows = lengths
        .par_iter()
        .map(|&l| {
            let est = total_time_fib::<f64>(key(l)?, cfg)?;
            Ok(Fig4Row {
                l,
                n_total: est.budget.n_total,
                eps_required: est.plan.eps_required,
                base_length: est.plan.base_length,
                n_sk: est.plan.n_sk,
                total_length: est.plan.total_length,
                time_steps: est.time_steps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if !raw {
        monotonize_by(&mut rows, |r| r.time_steps, |r, y| r.time_steps = y);
    }
    Ok(rows)
}

/// Parses `a,b,c` or `start:stop:step` (inclusive) into a list. An empty
/// string is an empty list.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = || Error::InvalidInput(format!("bad grid {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|s| s.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor();
        if !(0.0..=1e7).contains(&n) {
            return Err(bad());
        }
        // 12 significant digits so 0.001:0.379:0.001 lands on the decimals
        return Ok((0..=n as u64)
            .map(|i| format!("{:.11e}", start + i as f64 * step).parse().expect("formatted float parses"))
            .collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Like [`parse_list`] for key lengths.
pub fn parse_lengths(text: &str) -> Result<Vec<u64>> {
    parse_list(text)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= 1e9 {
                Ok(x as u64)
            } else {
                Err(Error::InvalidInput(format!("key length {x} is not a positive integer")))
            }
        })
        .collect()
}
