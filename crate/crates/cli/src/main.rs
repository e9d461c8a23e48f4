//! `topofactor` command-line front end.

mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use topofactor::distillation::{a4_plan, a8_plan};
use topofactor::fib_compile::total_time_fib;
use topofactor::ising_schedule::{classify_and_schedule, distillation_campaign};
use topofactor::mc_oracle::{simulate_campaign, simulate_state_production, SimConfig, StateRequest};
use topofactor::physical::physical_report;
use topofactor::sweep::{self, to_csv, CsvRow};
use topofactor::{ConfigFile, Demand, Error, ErrorProb, KeyLength, Mode, SchedulePolicy};

use manifest::RunManifest;

const CONFIG_ENV: &str = "TOPOFACTOR_CONFIG";

#[derive(Parser)]
#[command(name = "topofactor", version, about = "Resource estimates for factoring on anyonic quantum computers")]
struct Cli {
    /// JSON config or a previous run's manifest (falls back to $TOPOFACTOR_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here (plus `<out>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single-point totals.
    #[command(subcommand)]
    Estimate(Estimate),
    /// Figure data as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo run of the distillation factory.
    Montecarlo(McArgs),
    /// Physical conversions for a parameter preset.
    Physical(PhysArgs),
}

#[derive(Subcommand)]
enum Estimate {
    /// Ising anyons with magic-state distillation.
    Ising(IsingArgs),
    /// Fibonacci anyons with compiled braids.
    Fib(FibArgs),
}

fn probability(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is not a probability in [0, 1]"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Auto,
    Batch,
    Interleave,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Batch => Mode::BatchAll,
            ModeArg::Interleave => Mode::Interleaved,
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct IsingArgs {
    /// Key length in bits.
    #[arg(long = "L", value_parser = value_parser!(u64).range(1..))]
    #[serde(rename = "L")]
    l: Option<u64>,
    /// Raw |a4> input error.
    #[arg(long, value_parser = probability)]
    eps_a4: Option<f64>,
    /// Raw |a8> input error.
    #[arg(long, value_parser = probability)]
    eps_a8: Option<f64>,
    /// Qubits available to the factory; defaults to a fraction of the gate count.
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    qubit_budget: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Physical parameter preset.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct FibArgs {
    /// Key length in bits.
    #[arg(long = "L", value_parser = value_parser!(u64).range(1..))]
    #[serde(rename = "L")]
    l: Option<u64>,
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Figure {
    Fig1a,
    Fig1b,
    Fig2,
    Fig4,
    Custom,
}

/// Grids are `a,b,c` lists or inclusive `start:stop:step` ranges.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct SweepArgs {
    #[arg(value_enum)]
    figure: Option<Figure>,
    /// Key lengths: `a,b,c` or `start:stop:step`.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    l: Option<String>,
    /// |a4> input errors, list or range.
    #[arg(long)]
    eps_a4: Option<String>,
    #[arg(long)]
    eps_a8: Option<String>,
    /// Output error targets, list or range.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    qubit_budget: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Skip the running-maximum smoothing.
    #[arg(long)]
    raw: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Species {
    A8,
    A4,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct McArgs {
    #[arg(long, value_enum)]
    species: Option<Species>,
    #[arg(long, value_parser = probability)]
    eps_a4: Option<f64>,
    #[arg(long, value_parser = probability)]
    eps_a8: Option<f64>,
    /// Output error target.
    #[arg(long, value_parser = probability)]
    target: Option<f64>,
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    trials: Option<u64>,
    /// Base seed; trial `i` uses stream `i`.
    #[arg(long)]
    seed: Option<u64>,
    /// Purified |a8> states for a campaign run.
    #[arg(long)]
    demand_a8: Option<u64>,
    /// Purified |a4> states for a campaign run.
    #[arg(long)]
    demand_a4: Option<u64>,
    #[arg(long, value_parser = value_parser!(u64).range(1..))]
    qubit_budget: Option<u64>,
    /// Include every trial's outcome.
    #[arg(long)]
    per_trial: bool,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
struct PhysArgs {
    #[arg(long)]
    preset: Option<String>,
    /// Abstract time steps to convert.
    #[arg(long)]
    steps: Option<f64>,
    /// Quasiparticle count for the sample area.
    #[arg(long)]
    qp: Option<f64>,
}

enum Failure {
    Usage(String),
    Model(Error),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(m) => Failure::Usage(m),
            e => Failure::Model(e),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Model(e) if e.is_infeasible() => 3,
            _ => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Other(m) => m.clone(),
            Failure::Model(e @ Error::AboveThreshold { .. }) => format!("regime C (undistillable input): {e}"),
            Failure::Model(e) => e.to_string(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Ctx {
    config: ConfigFile,
    previous: Option<RunManifest>,
}

impl Ctx {
    /// Given flags, topped up from a manifest recorded by the same command.
    fn resolve<A: Serialize + DeserializeOwned>(&self, command: &str, given: &A) -> Outcome<A> {
        let recorded = self.previous.as_ref().filter(|m| m.command == command).map(|m| &m.args);
        let value = serde_json::to_value(given).map_err(|e| Failure::Other(e.to_string()))?;
        serde_json::from_value(manifest::merge_args(value, recorded))
            .map_err(|e| Failure::Usage(format!("bad recorded arguments: {e}")))
    }

    fn preset(&self, name: &str) -> Outcome<topofactor::PhysicalParams> {
        self.config.preset(name).map_err(|e| Failure::Usage(e.to_string()))
    }
}

fn key(bits: u64) -> Outcome<KeyLength> {
    Ok(KeyLength::new(bits)?)
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn estimate_ising(ctx: &Ctx, mut a: IsingArgs) -> Outcome<(String, Value)> {
    a.l.get_or_insert(128);
    a.eps_a4.get_or_insert(0.01);
    a.eps_a8.get_or_insert(0.01);
    a.mode.get_or_insert(ModeArg::Auto);
    a.preset.get_or_insert_with(|| "nu52".into());
    let cfg = &ctx.config.constants;
    let policy = SchedulePolicy { qubit_budget: a.qubit_budget, mode: a.mode.unwrap().into(), tradeoff_factor: 1.0 };
    let report = classify_and_schedule(
        key(a.l.unwrap())?,
        ErrorProb::new(a.eps_a4.unwrap())?,
        ErrorProb::new(a.eps_a8.unwrap())?,
        &policy,
        cfg,
    )?;
    if !report.feasible {
        return Err(Failure::Model(Error::InfeasibleBudget {
            needed: report.single_state_qubits,
            budget: report.qubit_budget,
        }));
    }
    let preset = a.preset.clone().unwrap();
    let phys = physical_report(report.t_total, report.total_anyons, &ctx.preset(&preset)?);
    let text = to_json(&json!({ "schedule": report, "preset": preset, "physical": phys }));
    Ok((text, serde_json::to_value(&a).unwrap()))
}

fn estimate_fib(ctx: &Ctx, mut a: FibArgs) -> Outcome<(String, Value)> {
    a.l.get_or_insert(128);
    a.preset.get_or_insert_with(|| "nu125".into());
    let est = total_time_fib::<f64>(key(a.l.unwrap())?, &ctx.config.constants)?;
    let preset = a.preset.clone().unwrap();
    let phys = physical_report(est.time_steps, est.anyons as f64, &ctx.preset(&preset)?);
    let text = to_json(&json!({ "estimate": est, "preset": preset, "physical": phys }));
    Ok((text, serde_json::to_value(&a).unwrap()))
}

const TARGETS: &str = "1e-9,1e-11,1e-13";
const EPS_A8_GRID: &str = "0.001:0.379:0.001";
const EPS_A4_GRID: &str = "0.001:0.139:0.001";

fn csv<R: CsvRow>(rows: topofactor::Result<Vec<R>>) -> Outcome<String> {
    Ok(to_csv(&rows?))
}

fn sweep_cmd(ctx: &Ctx, mut a: SweepArgs) -> Outcome<(String, Value)> {
    let figure = a.figure.ok_or_else(|| Failure::Usage("sweep needs a figure: fig1a, fig1b, fig2, fig4 or custom".into()))?;
    let set = |slot: &mut Option<String>, default: &str| {
        slot.get_or_insert_with(|| default.to_string());
    };
    match figure {
        Figure::Fig1a => {
            set(&mut a.target, TARGETS);
            set(&mut a.eps_a8, EPS_A8_GRID);
        }
        Figure::Fig1b => {
            set(&mut a.target, TARGETS);
            set(&mut a.eps_a4, EPS_A4_GRID);
            set(&mut a.eps_a8, "0.01");
        }
        Figure::Fig2 => {
            set(&mut a.l, "128,256,512");
            set(&mut a.eps_a8, EPS_A8_GRID);
            set(&mut a.eps_a4, EPS_A4_GRID);
        }
        Figure::Fig4 => set(&mut a.l, "16:4096:1"),
        Figure::Custom => {
            set(&mut a.l, "128");
            set(&mut a.eps_a4, "0.01");
            set(&mut a.eps_a8, "0.01");
        }
    }
    if matches!(figure, Figure::Fig2 | Figure::Custom) {
        a.mode.get_or_insert(ModeArg::Auto);
    }
    let list = |s: &Option<String>| -> Outcome<Vec<f64>> { Ok(sweep::parse_list(s.as_deref().unwrap_or(""))?) };
    let lengths = |s: &Option<String>| -> Outcome<Vec<u64>> { Ok(sweep::parse_lengths(s.as_deref().unwrap_or(""))?) };
    let cfg = &ctx.config.constants;
    let policy = SchedulePolicy {
        qubit_budget: a.qubit_budget,
        mode: a.mode.map(Mode::from).unwrap_or_default(),
        tradeoff_factor: 1.0,
    };
    let protocols = cfg.protocols::<f64>();
    let text = match figure {
        Figure::Fig1a => csv(sweep::fig1a(&protocols, &list(&a.target)?, &list(&a.eps_a8)?, a.raw))?,
        Figure::Fig1b => {
            let pinned = list(&a.eps_a8)?;
            let [e8] = pinned[..] else {
                return Err(Failure::Usage("fig1b takes a single --eps-a8 value".into()));
            };
            csv(sweep::fig1b(&protocols, e8, &list(&a.target)?, &list(&a.eps_a4)?, a.raw))?
        }
        Figure::Fig2 => csv(sweep::fig2(cfg, &policy, &lengths(&a.l)?, &list(&a.eps_a8)?, &list(&a.eps_a4)?, a.raw))?,
        Figure::Fig4 => csv(sweep::fig4(cfg, &lengths(&a.l)?, a.raw))?,
        Figure::Custom => {
            csv(sweep::ising_grid(cfg, &policy, &lengths(&a.l)?, &list(&a.eps_a4)?, &list(&a.eps_a8)?, a.raw))?
        }
    };
    Ok((text, serde_json::to_value(&a).unwrap()))
}

fn montecarlo(ctx: &Ctx, mut a: McArgs) -> Outcome<(String, Value)> {
    a.species.get_or_insert(Species::A8);
    a.eps_a4.get_or_insert(0.01);
    a.eps_a8.get_or_insert(0.01);
    a.target.get_or_insert(1e-9);
    a.trials.get_or_insert(10_000);
    a.seed.get_or_insert(1);
    let (e4, e8, target) = (a.eps_a4.unwrap(), a.eps_a8.unwrap(), a.target.unwrap());
    let sim = SimConfig { seed: a.seed.unwrap(), trials: a.trials.unwrap(), keep_trials: a.per_trial };
    let p = ctx.config.constants.protocols::<f64>();
    let (ep4, ep8, ept) = (ErrorProb::new(e4)?, ErrorProb::new(e8)?, ErrorProb::new(target)?);

    let text = if a.demand_a8.is_some() || a.demand_a4.is_some() {
        let demand = Demand { a8: a.demand_a8.unwrap_or(0), a4: a.demand_a4.unwrap_or(0) };
        let b = a.qubit_budget.ok_or_else(|| Failure::Usage("a campaign run needs --qubit-budget".into()))?;
        let analytic = distillation_campaign(demand, ept, ep4, ep8, b, &p)?;
        let result = simulate_campaign(demand, target, e4, e8, b, &p, &sim)?;
        to_json(&json!({ "campaign": { "demand": demand, "qubit_budget": b }, "analytic": analytic, "result": result }))
    } else {
        let (req, analytic) = match a.species.unwrap() {
            Species::A8 => (StateRequest::A8 { eps0: e8, target }, a8_plan(ep8, ept, &p)?),
            Species::A4 => (StateRequest::A4 { eps0_a4: e4, eps0_a8: e8, target }, a4_plan(ep4, ep8, ept, &p)?),
        };
        let result = simulate_state_production(&req, &p, &sim)?;
        to_json(&json!({ "request": req, "analytic": analytic, "result": result }))
    };
    Ok((text, serde_json::to_value(&a).unwrap()))
}

fn physical(ctx: &Ctx, mut a: PhysArgs) -> Outcome<(String, Value)> {
    a.preset.get_or_insert_with(|| "nu52".into());
    a.steps.get_or_insert(1e11);
    a.qp.get_or_insert(3e9);
    let (steps, qp) = (a.steps.unwrap(), a.qp.unwrap());
    if !(steps >= 0.0 && qp >= 0.0) {
        return Err(Failure::Usage("--steps and --qp must be non-negative".into()));
    }
    let name = a.preset.clone().unwrap();
    let params = ctx.preset(&name)?;
    let report = physical_report(steps, qp, &params);
    let text = to_json(&json!({ "preset": name, "params": params, "report": report }));
    Ok((text, serde_json::to_value(&a).unwrap()))
}

fn run(cli: Cli) -> Outcome<()> {
    let config_path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let loaded = manifest::load(config_path.as_deref()).map_err(Failure::Usage)?;
    let ctx = Ctx { config: loaded.config, previous: loaded.previous };

    let (name, (text, args)) = match &cli.command {
        Command::Estimate(Estimate::Ising(a)) => {
            let name = "estimate ising";
            (name, estimate_ising(&ctx, ctx.resolve(name, a)?)?)
        }
        Command::Estimate(Estimate::Fib(a)) => {
            let name = "estimate fib";
            (name, estimate_fib(&ctx, ctx.resolve(name, a)?)?)
        }
        Command::Sweep(a) => ("sweep", sweep_cmd(&ctx, ctx.resolve("sweep", a)?)?),
        Command::Montecarlo(a) => ("montecarlo", montecarlo(&ctx, ctx.resolve("montecarlo", a)?)?),
        Command::Physical(a) => ("physical", physical(&ctx, ctx.resolve("physical", a)?)?),
    };

    match &cli.out {
        None => print!("{text}"),
        Some(path) => {
            let io = |e: std::io::Error| Failure::Other(format!("cannot write {}: {e}", path.display()));
            std::fs::write(path, &text).map_err(io)?;
            let doc = manifest::build(name, args, &ctx.config);
            std::fs::write(manifest::sidecar_path(path), to_json(&doc)).map_err(io)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
