//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use blowup_core::bounds::{lower_thresholds, tau_prime, UpperOptions};
use blowup_core::config::load_config;
use blowup_core::dist::{
    blowup_density, blowup_probability_mc, closed_form, compare_noise_predicate, functional_cdf,
    probability_setup, yor_oracle, CompareScalars, ProbabilityCase, ProbabilitySetup,
};
use blowup_core::model::{check_rho_conditions, young_constant};
use blowup_core::ode::{sandwich_check, OdeSettings};
use blowup_core::quadrature::{integrate, integrate_to_infinity};
use blowup_core::spectral::solve_eigenpair;
use blowup_core::{DomainSpec, ModelParams, PathSource, SimGrid};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const WORKERS: usize = 8;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> blowup_core::config::RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    load_config(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn yor_identity() -> Outcome {
    let grid = SimGrid::new(1e-3, 20.0).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for nu in [2.0, 4.0] {
        let start = Instant::now();
        let r = yor_oracle(nu, 10_000, &grid, PathSource::new(1), 1).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        ok &= r.ks_pass && r.mean_vs_theory.within && secs < 60.0;
        notes.push(format!(
            "nu={nu}: ks {:.4} < {:.4}, mean {:.4} vs {:.4} (3se+0.005 = {:.4}), {secs:.1}s single worker",
            r.ks_distance,
            r.ks_critical + r.ks_allowance,
            r.mean_vs_theory.sample_mean,
            r.mean_vs_theory.theory,
            3.0 * r.mean_vs_theory.stderr + 0.005
        ));
    }
    let msg = notes.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn closed_form_vs_mc() -> Outcome {
    let cfg = config("equal.cfg");
    let params = cfg.one_noise().map_err(|e| e.to_string())?;
    let spectral = solve_eigenpair(&params.domain).map_err(|e| e.to_string())?;
    let setup = probability_setup(params, &spectral, ProbabilityCase::Equal, UpperOptions::default())
        .map_err(|e| e.to_string())?;
    let r = blowup_probability_mc(&setup, 100_000, 1e-3, cfg.sim.horizon, PathSource::new(cfg.sim.seed), WORKERS)
        .map_err(|e| e.to_string())?;
    let tol = 3.0 * r.mc_stderr + 0.01;
    let msg = format!(
        "closed form {:.6} (reference 0.99143), mc {:.5} +- {:.5}, |diff| {:.5} <= {tol:.5}",
        r.closed_form, r.mc_estimate, r.mc_stderr, r.abs_diff
    );
    if r.abs_diff <= tol && (r.closed_form - 0.99143).abs() < 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// A random parameter draw satisfying the rho identities for `case`.
fn draw(case: ProbabilityCase, rng: &mut Xoshiro256PlusPlus) -> ModelParams {
    let k1 = rng.random_range(0.3..2.0);
    let (exps, k2) = match case {
        ProbabilityCase::Equal => {
            let b = rng.random_range(0.5..4.0);
            ([b; 4], k1)
        }
        ProbabilityCase::TwoLevel => {
            let g = rng.random_range(0.3..2.0);
            let b = g + rng.random_range(0.2..3.0);
            ([b, g, b, g], (1.0 + b) * k1 / (1.0 + g))
        }
        ProbabilityCase::StrictChain => {
            let q = rng.random_range(0.2..1.5);
            let p = q + rng.random_range(0.2..1.5);
            let n = p + rng.random_range(0.2..1.5);
            let m = (1.0 + n) * (1.0 + p) / (1.0 + q) - 1.0;
            ([m, n, p, q], (1.0 + p) * k1 / (1.0 + q))
        }
    };
    let length = rng.random_range(1.0..5.0);
    let domain = DomainSpec::interval(length).unwrap();
    ModelParams::new(exps, [k1, k2], [1.0, 1.0], domain).unwrap()
}

fn substitution_identity() -> Outcome {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(6);
    let mut worst_partial = 0.0f64;
    let mut worst_full = 0.0f64;
    let mut count = 0;
    for case in [ProbabilityCase::Equal, ProbabilityCase::TwoLevel, ProbabilityCase::StrictChain] {
        for _ in 0..20 {
            let params = draw(case, &mut rng);
            let spectral = solve_eigenpair(&params.domain).map_err(|e| e.to_string())?;
            let (rho1, rho2) = check_rho_conditions(&params)
                .rhos()
                .ok_or_else(|| format!("draw {params:?} violates the rho identities"))?;
            let mu = params.mu(&spectral);
            let (rho, exponent) = match case {
                ProbabilityCase::Equal => (rho1, params.m),
                ProbabilityCase::TwoLevel => (rho2, params.n),
                ProbabilityCase::StrictChain => (rho2, params.q),
            };
            let n = rng.random_range(0.05..20.0);
            let setup = ProbabilitySetup::from_scalars(rho, mu * exponent, n).map_err(|e| e.to_string())?;
            let h = |y: f64| blowup_density(y, setup.shape, setup.rho);
            let quad = integrate(h, 0.0, n, 1e-12).map_err(|e| e.to_string())?.value;
            let exact = functional_cdf(setup.shape, setup.rho, n).map_err(|e| e.to_string())?;
            let cf = closed_form(&setup).map_err(|e| e.to_string())?.p_infinite;
            worst_partial = worst_partial.max((quad - exact).abs()).max((cf - exact).abs());
            let full = integrate_to_infinity(h, 0.0, 1e-11).map_err(|e| e.to_string())?.value;
            worst_full = worst_full.max((full - 1.0).abs());
            count += 1;
        }
    }
    let msg = format!(
        "{count} draws over three cases: max |quad - Q| = {worst_partial:.2e}, max |full - 1| = {worst_full:.2e}"
    );
    if worst_partial <= 1e-8 && worst_full <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn pathwise_sandwich() -> Outcome {
    let cfg = config("equal.cfg");
    let params = cfg.one_noise().map_err(|e| e.to_string())?;
    let spectral = solve_eigenpair(&params.domain).map_err(|e| e.to_string())?;
    let grid = SimGrid::new(cfg.sim.dt, cfg.sim.horizon).map_err(|e| e.to_string())?;
    let settings = OdeSettings::default();
    let opts = UpperOptions::default();
    let source = PathSource::new(cfg.sim.seed);
    let reports = blowup_core::mc::map_paths(1000, WORKERS, |id| {
        sandwich_check(params, &spectral, &source.path(&grid, 1, id), opts, &settings)
    });
    let mut failures = 0;
    let mut resolved = 0;
    for r in &reports {
        match r {
            Ok(r) => {
                failures += usize::from(!r.ok());
                resolved += usize::from(r.ode.blew_up() && r.lower.crossed() && r.upper.crossed());
            }
            Err(_) => failures += 1,
        }
    }
    let zero = sandwich_check(params, &spectral, &PathSource::zero_noise(0).path(&grid, 1, 0), opts, &settings)
        .map_err(|e| e.to_string())?;
    let triple = [zero.lower.time, zero.ode.time, zero.upper.time];
    let expect = [1.0 / 3.0, 4.0 / PI, 8.0 / PI];
    let triple_err = triple.iter().zip(expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let msg = format!(
        "{failures} violations in {} paths ({resolved} fully resolved); zero noise ({:.6}, {:.6}, {:.6}), max err {triple_err:.1e}",
        reports.len(),
        triple[0],
        triple[1],
        triple[2]
    );
    if failures == 0 && triple_err <= 1e-3 && zero.ok() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn tau_prime_ordering() -> Outcome {
    let cfg = config("general.cfg");
    let params = cfg.one_noise().map_err(|e| e.to_string())?;
    let spectral = solve_eigenpair(&params.domain).map_err(|e| e.to_string())?;
    let grid = SimGrid::new(cfg.sim.dt, cfg.sim.horizon).map_err(|e| e.to_string())?;
    let lower = lower_thresholds(params, &spectral).map_err(|e| e.to_string())?;
    let prime = tau_prime(params, &spectral).map_err(|e| e.to_string())?;
    let source = PathSource::new(cfg.sim.seed);
    let times = blowup_core::mc::map_paths(1000, WORKERS, |id| {
        let path = source.path(&grid, 1, id);
        let a = blowup_core::functionals::crossing(&path, &prime.spec, prime.threshold)?;
        let b = lower.crossing(&path)?;
        Ok::<_, blowup_core::Error>((a.time_or_inf(), b.time_or_inf()))
    });
    let mut violations = 0;
    let mut crossed = 0;
    for t in &times {
        match t {
            Ok((a, b)) => {
                violations += usize::from(a > b);
                crossed += usize::from(b.is_finite());
            }
            Err(_) => violations += 1,
        }
    }
    let msg = format!(
        "exponents (2, 1.5, 1.2, 1), k = (1, 0.8): {violations} violations in {} paths ({crossed} with a finite tau**)",
        times.len()
    );
    if violations == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn constants_regression() -> Outcome {
    let report = compare_noise_predicate(&CompareScalars::reference()).map_err(|e| e.to_string())?;
    let lambda = report.lambda_ratio;
    let checks = [
        ("D1", young_constant(4.0, 3.0), 0.48828125),
        ("D2", young_constant(2.0, 1.0), 0.75),
        ("D3", young_constant(3.0, 1.0), 1.0),
        ("Lambda", lambda, 8.0 / 3.0),
        ("alpha1", report.alpha1, 3.0),
        ("alpha2", report.alpha2, 2.0),
    ];
    let worst = checks.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0, f64::max);
    let msg = checks.iter().map(|(n, a, _)| format!("{n}={a}")).collect::<Vec<_>>().join(", ")
        + &format!("; max err {worst:.1e}");
    if worst <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reproducibility() -> Outcome {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/equal.cfg");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for w in ["1", "8"] {
        let csv = dir.path().join(format!("w{w}.csv"));
        let json = dir.path().join(format!("w{w}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_blowup"))
            .args(["ode-sandwich", "--workers", w, "--config"])
            .arg(&cfg)
            .arg("--out-csv")
            .arg(&csv)
            .arg("--out-json")
            .arg(&json)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("blowup exited with {status} at {w} workers"));
        }
        files.push(std::fs::read(&csv).map_err(|e| e.to_string())?);
    }
    let msg = format!("{} bytes at 1 worker, {} bytes at 8 workers", files[0].len(), files[1].len());
    if files[0] == files[1] && !files[0].is_empty() {
        Ok(msg + ", identical")
    } else {
        Err(msg + ", differ")
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("yor identity", yor_identity),
        ("closed form vs monte carlo", closed_form_vs_mc),
        ("substitution identity", substitution_identity),
        ("pathwise sandwich", pathwise_sandwich),
        ("tau' ordering", tau_prime_ordering),
        ("constants regression", constants_regression),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
