//! Command-line driver: parses the run configuration, dispatches the
//! subcommands and writes CSV/JSON reports.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 2 when the
//! run completed but a bound was unavailable or vacuous (outputs are still
//! written in that case).

pub mod output;

use std::io::Write;
use std::path::PathBuf;

use blowup_core::bounds::{threshold_set, threshold_set_2d, LowerVariant, ThresholdSet, UpperOptions};
use blowup_core::config::{load_config, ModelConfig, RunConfig};
use blowup_core::dist::{
    blowup_probability_mc, compare_noise_predicate, probability_setup, yor_oracle, ProbabilityCase,
};
use blowup_core::error::Error;
use blowup_core::functionals::StoppingOutcome;
use blowup_core::mc::{map_paths, MonteCarloSummary};
use blowup_core::model::epsilon_report;
use blowup_core::ode::{integrate, sandwich_from_outcomes, BlowupResult, OdeSettings, OdeSystem};
use blowup_core::spectral::{initial_mass, initial_mass_2d, solve_eigenpair};
use blowup_core::{PathSource, SimGrid};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub const SIMULATE_COLUMNS: [&str; 7] = [
    "path_id",
    "tau_lower",
    "lower_status",
    "tau_upper",
    "upper_status",
    "tau_ode",
    "ode_status",
];

pub const SANDWICH_COLUMNS: [&str; 8] = [
    "path_id",
    "tau_lower",
    "lower_status",
    "tau_ode",
    "ode_status",
    "tau_upper",
    "upper_status",
    "ok",
];

#[derive(Debug, Parser)]
#[command(name = "blowup", version, about = "Blow-up time bounds for coupled semilinear SPDEs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Per-path CSV; written to stdout when omitted.
    #[arg(long, global = true)]
    pub out_csv: Option<PathBuf>,
    /// JSON summary; written to stdout when omitted and no CSV goes there.
    #[arg(long, global = true)]
    pub out_json: Option<PathBuf>,
    /// Replace every Brownian path by W ≡ 0.
    #[arg(long, global = true)]
    pub zero_noise: bool,
    /// Use the sharper strict-chain rate (2^-(1+n) + 2^-(1+q)) eps0 instead of eps0 / 2^n.
    #[arg(long, global = true)]
    pub tight_rate: bool,
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the threshold constants.
    Thresholds,
    /// Lower, upper and ODE blow-up times per path.
    Simulate,
    /// Check lower ≤ ODE ≤ upper per path.
    OdeSandwich,
    /// Compare the simulated perpetuity with its gamma law.
    YorCheck {
        #[arg(long)]
        nu: f64,
    },
    /// Closed-form and Monte Carlo probability of no blow-up.
    Probability {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        case: u8,
    },
    /// Evaluate the two-noise comparison hypotheses.
    CompareNoise,
}

#[derive(Debug)]
pub enum Failure {
    /// Configuration, parameter or I/O error (exit 1).
    Fatal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Fatal(e.to_string())
    }
}

/// What a subcommand produced.
pub struct Report {
    pub csv: Option<Vec<u8>>,
    pub json: Value,
    /// Set when a bound was unavailable or vacuous (exit 2).
    pub degraded: Option<String>,
}

pub fn run(cli: &Cli) -> i32 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(Failure::Fatal(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    if let Err(e) = emit(&cli.global, &report) {
        eprintln!("error: {e}");
        return 1;
    }
    match &report.degraded {
        Some(reason) => {
            eprintln!("warning: {reason}");
            2
        }
        None => 0,
    }
}

fn emit(g: &GlobalArgs, report: &Report) -> std::io::Result<()> {
    let mut json = serde_json::to_vec_pretty(&report.json).map_err(std::io::Error::other)?;
    json.push(b'\n');
    let mut files = Vec::new();
    let mut stdout = Vec::new();
    if let Some(csv) = &report.csv {
        match &g.out_csv {
            Some(p) => files.push((p.clone(), csv.clone())),
            None => stdout.extend_from_slice(csv),
        }
    }
    match &g.out_json {
        Some(p) => files.push((p.clone(), json)),
        None if stdout.is_empty() => stdout = json,
        None => {}
    }
    output::write_all_or_nothing(&files)?;
    let mut out = std::io::stdout().lock();
    out.write_all(&stdout)?;
    out.flush()
}

fn load(g: &GlobalArgs) -> Result<RunConfig, Failure> {
    match &g.config {
        Some(p) => Ok(load_config(p)?),
        None => Ok(RunConfig {
            model: None,
            sim: Default::default(),
            compare: None,
        }),
    }
}

pub fn execute(cli: &Cli) -> Result<Report, Failure> {
    let g = &cli.global;
    if g.workers == 0 {
        return Err(Failure::Fatal("--workers must be at least 1".into()));
    }
    let cfg = load(g)?;
    let opts = UpperOptions {
        tight_rate: g.tight_rate,
    };
    let source = if g.zero_noise {
        PathSource::zero_noise(cfg.sim.seed)
    } else {
        PathSource::new(cfg.sim.seed)
    };
    match &cli.command {
        Command::Thresholds => {
            let prepared = Prepared::new(&cfg, opts)?;
            Ok(Report {
                csv: None,
                json: serde_json::to_value(&prepared.set.constants).expect("serializable"),
                degraded: prepared.unavailable(),
            })
        }
        Command::Simulate => simulate(&cfg, opts, source, g.workers, false),
        Command::OdeSandwich => simulate(&cfg, opts, source, g.workers, true),
        Command::YorCheck { nu } => {
            let grid = SimGrid::new(cfg.sim.dt, cfg.sim.horizon)?;
            let r = yor_oracle(*nu, cfg.sim.n_paths, &grid, source, g.workers)?;
            let mut json = serde_json::to_value(&r).expect("serializable");
            json["seed"] = json!(cfg.sim.seed);
            json["zero_noise"] = json!(g.zero_noise);
            Ok(Report {
                csv: None,
                json,
                degraded: None,
            })
        }
        Command::Probability { case } => probability(&cfg, opts, source, g.workers, *case),
        Command::CompareNoise => {
            let scalars = cfg.compare.ok_or_else(|| {
                Failure::Fatal("compare-noise needs the compare.* keys in the config".into())
            })?;
            let r = compare_noise_predicate(&scalars)?;
            Ok(Report {
                csv: None,
                json: serde_json::to_value(&r).expect("serializable"),
                degraded: None,
            })
        }
    }
}

/// Thresholds, ODE system and initial values for one configured model.
pub struct Prepared {
    pub dims: usize,
    pub set: ThresholdSet,
    pub sys: Result<OdeSystem, Error>,
    pub initial: [f64; 2],
    pub conditions: Value,
}

impl Prepared {
    pub fn new(cfg: &RunConfig, opts: UpperOptions) -> Result<Self, Failure> {
        let model = cfg
            .model
            .as_ref()
            .ok_or_else(|| Failure::Fatal("this subcommand needs a model in --config".into()))?;
        let spectral = solve_eigenpair(model.domain())?;
        match model {
            ModelConfig::OneNoise(p) => {
                let set = threshold_set(p, &spectral, opts)?;
                let mass = initial_mass(p, &spectral);
                let eps = epsilon_report(blowup_core::model::classify_case(p), p.exponents(), mass.h1_0, mass.h2_0).ok();
                Ok(Self {
                    dims: 1,
                    set,
                    sys: Ok(OdeSystem::for_params(p)),
                    initial: [mass.h1_0, mass.h2_0],
                    conditions: serde_json::to_value(eps).expect("serializable"),
                })
            }
            ModelConfig::TwoNoise(p) => {
                let set = threshold_set_2d(p, &spectral, LowerVariant::default(), opts)?;
                let mass = initial_mass_2d(p, &spectral);
                let [m, n, q_p, q] = p.exponents();
                let case = blowup_core::model::classify_exponents(m, n, q_p, q);
                let eps = epsilon_report(case, p.exponents(), mass.h1_0, mass.h2_0).ok();
                Ok(Self {
                    dims: 2,
                    set,
                    sys: OdeSystem::damped_2d(p, &spectral),
                    initial: [mass.h1_0, mass.h2_0],
                    conditions: serde_json::to_value(eps).expect("serializable"),
                })
            }
        }
    }

    pub fn unavailable(&self) -> Option<String> {
        self.set.upper.as_ref().err().map(|e| e.to_string())
    }
}

/// Per-path outcome of the three blow-up time estimates.
pub struct PathRow {
    pub id: u64,
    pub lower: StoppingOutcome,
    pub upper: Option<StoppingOutcome>,
    pub ode: Result<BlowupResult, String>,
}

pub fn fmt_real(x: f64) -> String {
    if x.is_infinite() && x > 0.0 {
        "inf".into()
    } else {
        format!("{x}")
    }
}

fn simulate(
    cfg: &RunConfig,
    opts: UpperOptions,
    source: PathSource,
    workers: usize,
    sandwich: bool,
) -> Result<Report, Failure> {
    let prepared = Prepared::new(cfg, opts)?;
    let grid = SimGrid::new(cfg.sim.dt, cfg.sim.horizon)?;
    let settings = OdeSettings::default();
    let rows = map_paths(cfg.sim.n_paths, workers, |id| -> Result<PathRow, Error> {
        let path = source.path(&grid, prepared.dims, id);
        let lower = prepared.set.lower.crossing(&path)?;
        let upper = match &prepared.set.upper {
            Ok(u) => Some(u.crossing(&path)?),
            Err(_) => None,
        };
        let ode = match &prepared.sys {
            Ok(sys) => integrate(sys, prepared.initial, &path, &settings).map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        Ok(PathRow { id, lower, upper, ode })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let header: &[&str] = if sandwich { &SANDWICH_COLUMNS } else { &SIMULATE_COLUMNS };
    w.write_record(header).map_err(|e| Failure::Fatal(e.to_string()))?;
    let mut ok_count = 0u64;
    let mut exhausted = 0u64;
    let mut ode_failures = 0u64;
    for r in &rows {
        let lower = (fmt_real(r.lower.time_or_inf()), r.lower.status.as_str().to_string());
        let upper = match &r.upper {
            Some(u) => (fmt_real(u.time_or_inf()), u.status.as_str().to_string()),
            None => (String::new(), "unavailable".to_string()),
        };
        let ode = match &r.ode {
            Ok(o) => {
                exhausted += o.step_exhausted as u64;
                (fmt_real(o.time_or_inf()), o.status.as_str().to_string())
            }
            Err(_) => {
                ode_failures += 1;
                (String::new(), "failed".to_string())
            }
        };
        let id = r.id.to_string();
        let record: Vec<&str> = if sandwich {
            let ok = match &r.ode {
                Ok(o) => {
                    let up = r.upper.unwrap_or(StoppingOutcome {
                        status: blowup_core::StoppingStatus::Censored,
                        time: grid.horizon,
                        functional_at_end: f64::NAN,
                    });
                    sandwich_from_outcomes(r.lower, *o, up, grid.dt, grid.horizon).ok()
                }
                Err(_) => false,
            };
            ok_count += ok as u64;
            vec![
                &id,
                &lower.0,
                &lower.1,
                &ode.0,
                &ode.1,
                &upper.0,
                &upper.1,
                if ok { "1" } else { "0" },
            ]
        } else {
            vec![&id, &lower.0, &lower.1, &upper.0, &upper.1, &ode.0, &ode.1]
        };
        w.write_record(&record).map_err(|e| Failure::Fatal(e.to_string()))?;
    }
    let csv = w.into_inner().map_err(|e| Failure::Fatal(e.to_string()))?;

    let summary = |f: &dyn Fn(&PathRow) -> Option<Option<f64>>| -> Value {
        let vals: Option<Vec<Option<f64>>> = rows.iter().map(f).collect();
        match vals {
            Some(v) => serde_json::to_value(MonteCarloSummary::from_values(&v)).expect("serializable"),
            None => Value::Null,
        }
    };
    let crossed = |o: &StoppingOutcome| o.crossed().then_some(o.time);
    let mut json = json!({
        "command": if sandwich { "ode-sandwich" } else { "simulate" },
        "constants": prepared.set.constants,
        "conditions": prepared.conditions,
        "upper_available": prepared.set.upper.is_ok(),
        "upper_reason": prepared.unavailable(),
        "n_paths": cfg.sim.n_paths,
        "seed": cfg.sim.seed,
        "dt": grid.dt,
        "horizon": grid.horizon,
        "n_steps": grid.n_steps,
        "zero_noise": source.zero_noise,
        "summary": {
            "tau_lower": summary(&|r| Some(crossed(&r.lower))),
            "tau_upper": summary(&|r| r.upper.as_ref().map(crossed)),
            "tau_ode": summary(&|r| Some(r.ode.as_ref().ok().and_then(|o| o.blew_up().then_some(o.time)))),
        },
        "ode_step_exhausted": exhausted,
        "ode_failures": ode_failures,
    });
    if sandwich {
        json["ok_count"] = json!(ok_count);
        json["ok_fraction"] = json!(ok_count as f64 / rows.len() as f64);
    }
    Ok(Report {
        csv: Some(csv),
        json,
        degraded: prepared.unavailable(),
    })
}

fn probability(
    cfg: &RunConfig,
    opts: UpperOptions,
    source: PathSource,
    workers: usize,
    case: u8,
) -> Result<Report, Failure> {
    let params = cfg.one_noise()?;
    let spectral = solve_eigenpair(&params.domain)?;
    let case = ProbabilityCase::from_index(case)?;
    let setup = match probability_setup(params, &spectral, case, opts) {
        Ok(s) => s,
        Err(e @ (Error::Vacuous(_) | Error::UpperUnavailable(_))) => {
            let json = json!({
                "case": case.index(),
                "vacuous": true,
                "reason": e.to_string(),
                "closed_form": null,
                "complement": null,
                "mc_estimate": null,
                "mc_stderr": null,
            });
            return Ok(Report {
                csv: None,
                json,
                degraded: Some(e.to_string()),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let r = blowup_probability_mc(&setup, cfg.sim.n_paths, cfg.sim.dt, cfg.sim.horizon, source, workers)?;
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["case"] = json!(case.index());
    json["vacuous"] = json!(false);
    json["seed"] = json!(cfg.sim.seed);
    json["zero_noise"] = json!(source.zero_noise);
    if let Some(w) = &r.warning {
        eprintln!("warning: {w}");
    }
    Ok(Report {
        csv: None,
        json,
        degraded: None,
    })
}
