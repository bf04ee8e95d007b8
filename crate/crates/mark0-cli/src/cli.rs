//! Command-line interface: `run`, `sweep`, `shock` and `validate`.

use std::fs;
use std::path::PathBuf;

use mark0::observables::{mean, residual_employment_oracle};
use mark0::rng::{Uniform01, Xoshiro256PlusPlus};
use mark0::spectrum::{fit_ou, log_window_average, power_spectrum, FitBand};
use mark0::{bank, derive_seed, EconomyState, PolicyParams};

use crate::config::Config;
use crate::experiments::{
    locate_critical_r, monetary_shock, run_simulation, sweep, RcLocator, ShockSpec, SweepSpec,
};
use crate::output::{
    comment_block, render_grid, render_shock, render_timeseries, write_atomic, SHOCK_SCHEMA,
    TIMESERIES_SCHEMA,
};

const USAGE: &str = "\
mark0 - agent-based macroeconomic simulator with central-bank policy

USAGE:
    mark0 <SUBCOMMAND> [FLAGS] [key=value ...]

SUBCOMMANDS:
    run        simulate one economy and write the time-series CSV
    sweep      run a 2-D parameter sweep and write the phase-grid file
    shock      run the monetary-shock ensemble and write the response CSV
    validate   run the built-in invariant and oracle suites

FLAGS:
    --config PATH    flat key=value configuration file (# comments allowed)
    --out PATH       output file (required by run/sweep/shock)
    --seed N         overrides the seed key
    --jobs N         worker threads for sweep cells (default 1)
    --help           print this table

Any bare key=value argument overrides the corresponding config key.
";

/// Parsed command line.
struct Invocation {
    subcommand: String,
    config_path: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    jobs: usize,
    overrides: Vec<(String, String)>,
}

fn parse_args(args: &[String]) -> Result<Invocation, String> {
    let mut iter = args.iter();
    let subcommand = iter.next().ok_or("missing subcommand")?.clone();
    let mut inv = Invocation {
        subcommand,
        config_path: None,
        out: None,
        seed: None,
        jobs: 1,
        overrides: Vec::new(),
    };
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--config" => {
                let v = iter.next().ok_or("--config requires a path")?;
                inv.config_path = Some(PathBuf::from(v));
            }
            "--out" => {
                let v = iter.next().ok_or("--out requires a path")?;
                inv.out = Some(PathBuf::from(v));
            }
            "--seed" => {
                let v = iter.next().ok_or("--seed requires a number")?;
                inv.seed = Some(v.parse().map_err(|_| format!("--seed: bad value '{v}'"))?);
            }
            "--jobs" => {
                let v = iter.next().ok_or("--jobs requires a number")?;
                inv.jobs = v.parse().map_err(|_| format!("--jobs: bad value '{v}'"))?;
                if inv.jobs == 0 {
                    return Err("--jobs must be >= 1".into());
                }
            }
            "--help" | "-h" => return Err(String::new()),
            other if other.contains('=') && !other.starts_with('-') => {
                let (k, v) = other.split_once('=').unwrap();
                inv.overrides.push((k.trim().to_string(), v.trim().to_string()));
            }
            other => return Err(format!("unrecognized argument '{other}'")),
        }
    }
    Ok(inv)
}

fn load_config(inv: &Invocation) -> Result<Config, String> {
    // Overrides are appended to the file text and parsed in one pass, so
    // their order never matters and validation sees the final document.
    let mut text = match &inv.config_path {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?,
        None => String::new(),
    };
    for (k, v) in &inv.overrides {
        text.push_str(&format!("\n{k} = {v}"));
    }
    if let Some(seed) = inv.seed {
        text.push_str(&format!("\nseed = {seed}"));
    }
    Config::parse(&text).map_err(|e| e.to_string())
}

/// Entry point; returns the process exit code.
pub fn run_cli(args: &[String]) -> i32 {
    let inv = match parse_args(args) {
        Ok(inv) => inv,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}\n");
            }
            eprint!("{USAGE}");
            return 2;
        }
    };
    let result = match inv.subcommand.as_str() {
        "run" => cmd_run(&inv),
        "sweep" => cmd_sweep(&inv),
        "shock" => cmd_shock(&inv),
        "validate" => cmd_validate(&inv),
        other => {
            eprintln!("error: unknown subcommand '{other}'\n");
            eprint!("{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn require_out(inv: &Invocation) -> Result<&PathBuf, String> {
    inv.out.as_ref().ok_or_else(|| "--out is required".to_string())
}

fn cmd_run(inv: &Invocation) -> Result<i32, String> {
    let config = load_config(inv)?;
    let out = require_out(inv)?;
    let record = run_simulation(&config.model, &config.policy, config.t, config.seed)
        .map_err(|e| e.to_string())?;
    let mut content = comment_block(TIMESERIES_SCHEMA, "");
    content.push_str(&comment_block(
        &format!("seed = {}", config.seed),
        &config.to_text(),
    ));
    content.push_str(&render_timeseries(&record));
    write_atomic(out, &content).map_err(|e| e.to_string())?;
    eprintln!("wrote {} ({} steps)", out.display(), record.len());
    Ok(0)
}

fn cmd_sweep(inv: &Invocation) -> Result<i32, String> {
    let config = load_config(inv)?;
    let out = require_out(inv)?;
    let spec = SweepSpec::from_config(&config).map_err(|e| e.to_string())?;
    let total = spec.x.values.len() * spec.y.values.len();
    eprintln!(
        "sweep: {} x {} cells, ensemble {}, {} jobs",
        spec.x.values.len(),
        spec.y.values.len(),
        spec.ensemble,
        inv.jobs
    );
    let grid = sweep(&spec, inv.jobs, &move |done, _| {
        if done % 25 == 0 || done == total {
            eprintln!("  {done}/{total} cells");
        }
    })
    .map_err(|e| e.to_string())?;
    let content = render_grid(&grid, &config.to_text());
    write_atomic(out, &content).map_err(|e| e.to_string())?;
    eprintln!("wrote {}", out.display());
    Ok(0)
}

fn cmd_shock(inv: &Invocation) -> Result<i32, String> {
    let config = load_config(inv)?;
    let out = require_out(inv)?;
    let spec = ShockSpec {
        pre_rate: config.shock.pre_rate,
        post_rate: config.shock.post_rate,
        time: config.shock.time,
        window_before: config.shock.window_before,
        window_after: config.shock.window_after,
        normalize: config.shock.normalize,
    };
    let seeds: Vec<u64> = (0..config.ensemble as u64)
        .map(|k| derive_seed(config.seed, &[0, 0, k]))
        .collect();
    let response =
        monetary_shock(&spec, &config.model, config.t_eq, &seeds).map_err(|e| e.to_string())?;
    let mut content = comment_block(SHOCK_SCHEMA, "");
    content.push_str(&comment_block(
        &format!("seeds = {:?}", seeds),
        &config.to_text(),
    ));
    content.push_str(&render_shock(&response));
    write_atomic(out, &content).map_err(|e| e.to_string())?;
    eprintln!("wrote {}", out.display());
    Ok(0)
}

/// Built-in validation: money conservation and the banking identity across
/// phase corners, the no-profit rate algebra on random inputs, the
/// residual-employment formula against a located critical ratio, and the
/// spectral-fit sanity check. Scales (n_firms, t, t_eq) honor the config so
/// a quick pass is available via overrides.
fn cmd_validate(inv: &Invocation) -> Result<i32, String> {
    let config = load_config(inv)?;
    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("[validate] {:<28} {} {}", name, if ok { "pass" } else { "FAIL" }, detail);
        all_ok &= ok;
    };

    // Conservation battery across representative corners.
    {
        let corners: &[(f64, f64, f64, f64)] = &[
            // (R, theta, rho_star, phi_cb)
            (2.0, f64::INFINITY, 0.0, 0.0),
            (0.5, f64::INFINITY, 0.0, 0.0),
            (2.0, 1.0, 0.0, 0.0),
            (2.0, 0.3, 0.0, 0.0),
            (2.0, 3.0, 0.02, 0.0),
            (2.0, 2.0, 0.02, 0.5),
        ];
        let n = config.model.n_firms.min(500);
        let t = config.t.min(4000);
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for &(r, theta, rho, phi) in corners {
            let mut model = config.model.clone();
            model.n_firms = n;
            model.hire_fire_ratio = r;
            model.theta = theta;
            let policy = PolicyParams {
                natural_rate: rho,
                phi_pi: phi,
                phi_eps: phi,
                ..PolicyParams::baseline()
            };
            let mut state = match EconomyState::init(&model, config.seed) {
                Ok(s) => s,
                Err(e) => {
                    ok = false;
                    eprintln!("  init failed: {e}");
                    continue;
                }
            };
            for _ in 0..t {
                match state.step(&model, &policy) {
                    Ok(_) => {
                        worst = worst.max(state.money_drift().abs());
                    }
                    Err(e) => {
                        ok = false;
                        eprintln!("  corner (R={r}, theta={theta}): {e}");
                        break;
                    }
                }
            }
        }
        report(
            "money conservation",
            ok && worst < 1e-6 * n as f64,
            format!("worst |drift| {worst:.2e} over {} corners", corners.len()),
        );
    }

    // No-profit identity on random inputs.
    {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(config.seed ^ 0xBA2E);
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for _ in 0..100_000 {
            let base = 0.05 * rng.next_f64();
            let defaults = 10.0 * rng.next_f64();
            let loans = if rng.next_f64() < 0.1 { 0.0 } else { 500.0 * rng.next_f64() };
            // Balance sheet: deposits = money stock + loans.
            let deposits = 1.0 + 2000.0 * rng.next_f64() + loans;
            let f = rng.next_f64();
            match bank::bank_rates(base, defaults, loans, deposits, f) {
                Ok((rl, rd)) => {
                    let resid =
                        bank::no_profit_residual(rl, rd, loans, deposits, defaults).abs();
                    worst = worst.max(resid / deposits);
                    if resid > 1e-12 * deposits {
                        ok = false;
                    }
                    if rd > base + 1e-15 || base > rl + 1e-15 {
                        ok = false;
                    }
                }
                Err(_) => ok = false,
            }
        }
        report(
            "banking no-profit identity",
            ok,
            format!("worst relative residual {worst:.2e}"),
        );
    }

    // Residual-employment formula at a located critical ratio.
    {
        let mut locator = RcLocator::constant_wage_default();
        locator.t = locator.t.min(config.t.max(40_000));
        locator.t_eq = locator.t / 3;
        match locate_critical_r(&locator) {
            Ok(rc) => {
                let mut ok = true;
                let mut detail = format!("R_c = {rc:.3}");
                for frac in [0.45, 0.6] {
                    let mut model = locator.model.clone();
                    model.gamma0 = 1e-3;
                    model.hire_fire_ratio = frac * rc;
                    let mut vals = Vec::new();
                    for seed in 1..=2u64 {
                        match run_simulation(&model, &locator.policy, 120_000, seed) {
                            Ok(record) => vals.push(mean(&record.epsilon[40_000..])),
                            Err(e) => {
                                ok = false;
                                eprintln!("  empres run failed: {e}");
                            }
                        }
                    }
                    if vals.is_empty() {
                        ok = false;
                        continue;
                    }
                    let measured = mean(&vals);
                    let predicted = residual_employment_oracle(frac * rc, rc, 1e-3);
                    let rel = (measured / predicted - 1.0).abs();
                    detail.push_str(&format!(", R/R_c={frac}: rel err {rel:.2}"));
                    if rel > 0.2 {
                        ok = false;
                    }
                }
                report("residual-employment formula", ok, detail);
            }
            Err(e) => report("residual-employment formula", false, e.to_string()),
        }
    }

    // Spectral fit sanity on a synthetic first-order autoregression.
    {
        let target: f64 = 0.01;
        let a = (-target).exp();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(config.seed ^ 0x5bec);
        let n = 1 << 17;
        let mut series = Vec::with_capacity(n);
        let mut x = 0.0;
        for _ in 0..n {
            x = a * x + (rng.next_f64() - 0.5);
            series.push(x);
        }
        let ok = match power_spectrum(&series, 0)
            .map(|s| log_window_average(&s, 100))
            .and_then(|s| fit_ou(&s, FitBand::default()))
        {
            Ok(fit) => {
                let rel = (fit.omega0 / target - 1.0).abs();
                report(
                    "spectral knee recovery",
                    rel < 0.1 && !fit.pinned_high,
                    format!("omega0 {:.3e} vs {target:.3e}", fit.omega0),
                );
                true
            }
            Err(e) => {
                report("spectral knee recovery", false, e.to_string());
                false
            }
        };
        let _ = ok;
    }

    if all_ok {
        println!("[validate] all checks passed");
        Ok(0)
    } else {
        Ok(1)
    }
}
