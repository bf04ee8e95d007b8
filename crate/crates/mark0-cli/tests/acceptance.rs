//! Acceptance suite: one test per release criterion, each printing a
//! `[acceptance] criterion N` pass/fail line (run with `-- --nocapture` to
//! see them). Tolerances are fixed here and nowhere else.
//!
//! Scale: 2000 firms and 20,000 steps (5,000 equilibration) for the
//! policy-facing criteria; the adaptive-firm validations use 50 firms with
//! longer horizons where relaxation times demand it.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use mark0::observables::{linear_fit, mean, residual_employment_oracle};
use mark0::spectrum::{fit_ou, log_window_average, power_spectrum, FitBand};
use mark0::{derive_seed, EconomyState, ModelParams, Phase, PhaseThresholds, PolicyParams};
use mark0_cli::cli::run_cli;
use mark0_cli::{
    ensemble, locate_critical_r, monetary_shock, run_epsilon_series, run_simulation, sweep,
    AxisSpec, RcLocator, ShockSpec, SweepSpec,
};

/// Reports one criterion line; panics (failing the test) when not ok.
fn report(criterion: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion:2} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

fn natural_policy(rho_star: f64) -> PolicyParams {
    PolicyParams {
        natural_rate: rho_star,
        phi_pi: 0.0,
        phi_eps: 0.0,
        ..PolicyParams::baseline()
    }
}

/// Baseline model with the interest-rate channels switched off.
fn mark0_baseline(r: f64, theta: f64) -> ModelParams {
    ModelParams {
        hire_fire_ratio: r,
        theta,
        alpha_c: 0.0,
        alpha_gamma: 0.0,
        gamma0: 0.0,
        ..ModelParams::baseline()
    }
}

/// Constant-wage adaptive-firm setting of the residual-employment and
/// spectral validations.
fn constant_wage_params(r: f64, gamma0: f64) -> ModelParams {
    ModelParams {
        n_firms: 50,
        c0: 0.5,
        beta: 0.0,
        gamma_p: 0.05,
        gamma_w: 0.0,
        eta0_minus: 0.1,
        hire_fire_ratio: r,
        delta: 0.02,
        theta: 5.0,
        revival_prob: 0.1,
        default_share: 1.0,
        alpha_c: 0.0,
        alpha_gamma: 0.0,
        gamma0,
    }
}

fn seeds(base: u64, tag: u64, n: usize) -> Vec<u64> {
    (0..n as u64).map(|k| derive_seed(base, &[tag, 0, k])).collect()
}

const T: usize = 20_000;
const T_EQ: usize = 5_000;

#[test]
fn criterion_01_conservation() {
    // Money conservation and the banking no-profit identity are enforced
    // inside every step of every run (the step aborts beyond tolerance), so
    // all other criteria double as evidence. This battery re-checks the
    // drift explicitly at every step across the phase corners.
    let corners: Vec<(ModelParams, PolicyParams)> = vec![
        (mark0_baseline(2.0, 10.0), natural_policy(0.0)),
        (mark0_baseline(0.5, f64::INFINITY), natural_policy(0.0)),
        (mark0_baseline(2.0, 1.0), natural_policy(0.0)),
        (mark0_baseline(2.0, 0.3), natural_policy(0.0)),
        (
            ModelParams {
                theta: 2.0,
                ..ModelParams::baseline()
            },
            PolicyParams {
                phi_pi: 1.0,
                phi_eps: 1.0,
                ..PolicyParams::baseline()
            },
        ),
        (constant_wage_params(0.5, 1e-3), natural_policy(0.0)),
    ];
    let mut worst_rel: f64 = 0.0;
    for (i, (mut params, policy)) in corners.into_iter().enumerate() {
        params.n_firms = 500;
        let mut state = EconomyState::init(&params, 91 + i as u64).unwrap();
        for _ in 0..5_000 {
            // Any bank-identity or drift breach aborts the step itself.
            state.step(&params, &policy).unwrap();
            let rel = state.money_drift().abs() / params.n_firms as f64;
            worst_rel = worst_rel.max(rel);
        }
    }
    report(
        1,
        "conservation",
        worst_rel < 1e-6,
        &format!("worst |drift|/N_F = {worst_rel:.2e} (tolerance 1e-6); bank identity enforced per step at 1e-12"),
    );
}

#[test]
fn criterion_02_baseline_phase_diagram() {
    let thresholds = PhaseThresholds::default();
    let run_corner = |r: f64, theta: f64, tag: u64| {
        let params = mark0_baseline(r, theta);
        ensemble(
            &params,
            &natural_policy(0.0),
            T,
            T_EQ,
            &seeds(7102, tag, 8),
            &thresholds,
        )
    };

    let fe = run_corner(2.0, 10.0, 1);
    let fe_ok = fe.mean_u < 0.1 && fe.mean_pi > 0.0 && fe.majority == Some(Phase::FullEmployment);

    let fu = run_corner(0.5, f64::INFINITY, 2);
    let fu_ok = fu.mean_u > 0.8
        && fu.mean_pi < 0.0
        && fu.majority == Some(Phase::FullUnemployment);

    // "Theta intermediate" and "theta small" for this implementation's
    // baseline phase diagram (the crisis band sits at theta near 1, the
    // no-credit band below ~0.5).
    let ec = run_corner(2.0, 1.0, 3);
    let ec_ok = ec.mean_amplitude > 0.5 && ec.majority == Some(Phase::EndogenousCrises);

    let ru = run_corner(2.0, 0.3, 4);
    let ru_ok = ru.mean_u >= 0.05
        && ru.mean_u <= 0.5
        && ru.mean_pi.abs() < 0.001
        && ru.majority == Some(Phase::ResidualUnemployment);

    let detail = format!(
        "FE(u={:.3}, pi={:+.4}, {:?}) FU(u={:.3}, pi={:+.5}, {:?}) EC(amp={:.2}, {:?}) RU(u={:.3}, pi={:+.6}, {:?})",
        fe.mean_u, fe.mean_pi, fe.majority,
        fu.mean_u, fu.mean_pi, fu.majority,
        ec.mean_amplitude, ec.majority,
        ru.mean_u, ru.mean_pi, ru.majority,
    );
    report(
        2,
        "baseline phase diagram",
        fe_ok && fu_ok && ec_ok && ru_ok,
        &detail,
    );
}

#[test]
fn criterion_03_natural_state_transition() {
    // alpha_gamma = 50, alpha_c = 4, R = 2, theta = 3: sweeping the natural
    // rate locates the full-employment -> residual-unemployment jump.
    let params = ModelParams {
        theta: 3.0,
        ..ModelParams::baseline()
    };
    let thresholds = PhaseThresholds::default();
    let rho_grid: Vec<f64> = (2..=12).map(|i| 0.002 * i as f64).collect(); // 0.4% .. 2.4%
    let mut means = Vec::new();
    for (i, &rho) in rho_grid.iter().enumerate() {
        let outcome = ensemble(
            &params,
            &natural_policy(rho),
            T,
            T_EQ,
            &seeds(3307, i as u64, 4),
            &thresholds,
        );
        means.push(outcome.mean_u);
    }
    // Jump = largest rise between consecutive grid points.
    let mut jump_at = 0;
    let mut jump_size = 0.0;
    for i in 1..means.len() {
        let d = means[i] - means[i - 1];
        if d > jump_size {
            jump_size = d;
            jump_at = i;
        }
    }
    let rho_critical = 0.5 * (rho_grid[jump_at - 1] + rho_grid[jump_at]);
    let ru_side = mean(&means[jump_at..]);
    let ok = (rho_critical - 0.013).abs() <= 0.004 && (ru_side - 0.3).abs() <= 0.1;
    report(
        3,
        "natural-state transition",
        ok,
        &format!(
            "jump at rho* = {:.2}% (target 1.3% +/- 0.4%), RU-side mean u = {ru_side:.3} (target 0.3 +/- 0.1)",
            100.0 * rho_critical
        ),
    );
}

#[test]
fn criterion_04_policy_experiment() {
    let params = ModelParams {
        theta: 2.0,
        ..ModelParams::baseline()
    };
    let thresholds = PhaseThresholds::default();
    let run_policy = |phi: f64, tag: u64| {
        let policy = PolicyParams {
            phi_pi: phi,
            phi_eps: phi,
            ..PolicyParams::baseline()
        };
        ensemble(&params, &policy, T, T_EQ, &seeds(4411, tag, 8), &thresholds)
    };
    let natural = run_policy(0.0, 0);
    let mild = run_policy(0.5, 1);
    let aggressive = run_policy(1.0, 2);

    let natural_ok = (natural.mean_u - 0.33).abs() <= 0.07;
    let mild_ok = (mild.mean_pi - 0.002).abs() <= 0.0005 && mild.mean_u <= 0.12;
    let aggressive_ok = aggressive.mean_amplitude >= 0.3;
    report(
        4,
        "policy experiment",
        natural_ok && mild_ok && aggressive_ok,
        &format!(
            "natural u = {:.3} (0.33 +/- 0.07); mild pi = {:.4} (0.002 +/- 0.0005), u = {:.3} (<= 0.12); aggressive amplitude = {:.2} (>= 0.3)",
            natural.mean_u, mild.mean_pi, mild.mean_u, aggressive.mean_amplitude
        ),
    );
}

#[test]
fn criterion_05_stability_wedge() {
    // 21 x 21 grid over the Taylor coefficients at the policy-experiment
    // parameters; 4 seeds per cell.
    let spec = SweepSpec {
        model: ModelParams {
            theta: 2.0,
            ..ModelParams::baseline()
        },
        policy: PolicyParams::baseline(),
        t: T,
        t_eq: T_EQ,
        ensemble: 4,
        base_seed: 5001,
        thresholds: PhaseThresholds::default(),
        x: AxisSpec::linspace("phi_pi", 0.0, 1.5, 21),
        y: AxisSpec::linspace("phi_eps", 0.0, 1.5, 21),
    };
    let done = AtomicUsize::new(0);
    let grid = sweep(&spec, 2, &|_, total| {
        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
        if d % 63 == 0 {
            eprintln!("  [criterion 5] {d}/{total} cells");
        }
    })
    .unwrap();

    // Keep the computed grid on disk for inspection.
    let artifact = std::env::temp_dir().join("mark0-criterion5.grid");
    let _ = fs::write(
        &artifact,
        mark0_cli::output::render_grid(&grid, "# criterion 5 sweep"),
    );

    let nx = 21;
    let ny = 21;
    // "Low amplitude" is the complement of the destabilized level (>= 0.3,
    // the same bar the aggressive-policy criterion uses), so boundary cells
    // where a single replicate spikes do not fracture the region.
    let low_amp = |xi: usize, yi: usize| grid.cell(xi, yi).mean_amplitude < 0.3;

    // Flood fill the low-amplitude region from the origin.
    let mut reachable = vec![false; nx * ny];
    let mut stack = Vec::new();
    if low_amp(0, 0) {
        reachable[0] = true;
        stack.push((0usize, 0usize));
    }
    while let Some((x, y)) = stack.pop() {
        let neighbors = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (ax, ay) in neighbors {
            if ax < nx && ay < ny && !reachable[ay * nx + ax] && low_amp(ax, ay) {
                reachable[ay * nx + ax] = true;
                stack.push((ax, ay));
            }
        }
    }

    let origin_stable = low_amp(0, 0);
    let corner_unstable = grid.cell(nx - 1, ny - 1).mean_amplitude >= 0.3;
    // Every low-unemployment cell must lie inside the connected
    // low-amplitude region around the origin.
    let mut low_u_cells = 0;
    let mut low_u_inside = 0;
    for yi in 0..ny {
        for xi in 0..nx {
            if grid.cell(xi, yi).mean_u <= 0.12 {
                low_u_cells += 1;
                if reachable[yi * nx + xi] {
                    low_u_inside += 1;
                } else {
                    let c = grid.cell(xi, yi);
                    eprintln!(
                        "  [criterion 5] low-u cell outside stable region: ({:.3}, {:.3}) u={:.3} amp={:.3}",
                        c.x_value, c.y_value, c.mean_u, c.mean_amplitude
                    );
                }
            }
        }
    }
    let ok = origin_stable && corner_unstable && low_u_cells > 0 && low_u_inside == low_u_cells;
    report(
        5,
        "stability wedge",
        ok,
        &format!(
            "origin amplitude {:.3}; corner (1.5,1.5) amplitude {:.2}; {low_u_inside}/{low_u_cells} low-u cells inside the connected stable region of {} cells",
            grid.cell(0, 0).mean_amplitude,
            grid.cell(nx - 1, ny - 1).mean_amplitude,
            reachable.iter().filter(|&&r| r).count(),
        ),
    );
}

#[test]
fn criterion_06_residual_employment_collapse() {
    // Critical ratio located from the simulator at gamma0 = 0.
    let rc = locate_critical_r(&RcLocator::constant_wage_default()).unwrap();
    let fracs = [0.3, 0.45, 0.6, 0.75, 0.9];
    let policy = natural_policy(0.0);
    let mut ratios = [[0.0f64; 5]; 2]; // [gamma0 index][frac index]
    let mut worst_rel: f64 = 0.0;
    for (gi, &gamma0) in [1e-3, 1e-4].iter().enumerate() {
        for (fi, &frac) in fracs.iter().enumerate() {
            let params = constant_wage_params(frac * rc, gamma0);
            // Relaxation slows critically near R_c; give the upper points a
            // longer horizon so the mean is taken over an equilibrated span.
            let (t, t_eq) = if frac >= 0.85 {
                (900_000, 300_000)
            } else if frac >= 0.7 {
                (450_000, 150_000)
            } else {
                (300_000, 100_000)
            };
            let mut eps = Vec::new();
            for seed in seeds(6600 + gi as u64, fi as u64, 4) {
                let series = run_epsilon_series(&params, &policy, t, seed).unwrap();
                eps.push(mean(&series[t_eq..]));
            }
            let measured = mean(&eps);
            let predicted = residual_employment_oracle(frac * rc, rc, gamma0);
            // The collapse variable of the scaling plot.
            ratios[gi][fi] = gamma0 / measured;
            let rel = (measured / predicted - 1.0).abs();
            worst_rel = worst_rel.max(rel);
        }
    }
    // Both gamma0 curves collapse onto each other.
    let mut worst_collapse: f64 = 0.0;
    for fi in 0..fracs.len() {
        let rel = (ratios[0][fi] / ratios[1][fi] - 1.0).abs();
        worst_collapse = worst_collapse.max(rel);
    }
    let ok = worst_rel <= 0.15 && worst_collapse <= 0.10;
    report(
        6,
        "residual employment collapse",
        ok,
        &format!(
            "R_c = {rc:.3}; worst formula deviation {:.1}% (<= 15%); worst curve-collapse deviation {:.1}% (<= 10%)",
            100.0 * worst_rel,
            100.0 * worst_collapse
        ),
    );
}

#[test]
fn criterion_07_spectral_criticality() {
    let rc = locate_critical_r(&RcLocator::constant_wage_default()).unwrap();
    let policy = natural_policy(0.0);
    let t_eq = 60_000usize;
    let t = t_eq + (1 << 20);
    let mut rs = Vec::new();
    let mut omegas = Vec::new();
    let mut all_fit = true;
    for &frac in &[0.5, 0.65, 0.8, 0.9] {
        let params = constant_wage_params(frac * rc, 1e-3);
        let series = run_epsilon_series(&params, &policy, t, 7).unwrap();
        let spec = power_spectrum(&series, t_eq).unwrap();
        let smooth = log_window_average(&spec, 100);
        let fit = fit_ou(&smooth, FitBand::default()).unwrap();
        all_fit &= !fit.pinned_high;
        rs.push(frac * rc);
        omegas.push(fit.omega0);
    }
    let monotone = omegas.windows(2).all(|w| w[1] < w[0]);
    let (slope, _, r2) = linear_fit(&rs, &omegas);
    let ok = all_fit && monotone && slope < 0.0 && r2 > 0.8;
    report(
        7,
        "spectral criticality",
        ok,
        &format!(
            "omega0 = {:?} over R = {:?}; monotone {monotone}; linear fit R^2 = {r2:.3} (> 0.8)",
            omegas.iter().map(|w| format!("{w:.2e}")).collect::<Vec<_>>(),
            rs.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
        ),
    );
}

#[test]
fn criterion_08_monetary_shock() {
    // Rate drop 2% -> 1.8% at theta = 3 with the transmission channels on
    // and no further central-bank response.
    let params = ModelParams {
        theta: 3.0,
        ..ModelParams::baseline()
    };
    let spec = ShockSpec {
        pre_rate: 0.02,
        post_rate: 0.018,
        time: 10_000,
        window_before: 2_000,
        window_after: 2_000,
        normalize: true,
    };
    let response = monetary_shock(&spec, &params, T_EQ, &seeds(8803, 0, 8)).unwrap();
    let w = spec.window_before; // index of the shock step in the window
    let output = &response.output;

    // Peak of the smoothed response, strictly after the shock.
    let smooth: Vec<f64> = (0..output.len())
        .map(|i| {
            let lo = i.saturating_sub(25);
            let hi = (i + 26).min(output.len());
            mean(&output[lo..hi])
        })
        .collect();
    let (peak_index, peak) = smooth
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, v)| (i, *v))
        .unwrap();
    let pre_std = {
        let pre = &output[..w];
        let m = mean(pre);
        (pre.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / pre.len() as f64).sqrt()
    };
    let hump = peak_index > w && peak > 0.0 && peak > 3.0 * pre_std / (8f64).sqrt();
    // Relaxation: the tail returns towards the pre-shock level.
    let tail = mean(&smooth[smooth.len() - 200..]);
    let relaxes = tail < 0.5 * peak;
    // Damped oscillation: the detrended derivative changes sign after the
    // shock (rise then fall counts as one change; ringing adds more).
    let mut sign_changes = 0;
    let mut last_sign = 0i8;
    for i in (w + 1)..smooth.len() {
        let d = smooth[i] - smooth[i - 1];
        let s = if d > 0.0 {
            1i8
        } else if d < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if last_sign != 0 && s != last_sign {
                sign_changes += 1;
            }
            last_sign = s;
        }
    }
    let ok = hump && relaxes && sign_changes >= 1;
    report(
        8,
        "monetary shock",
        ok,
        &format!(
            "peak {:+.4} at offset {} (> 0 required), pre-shock noise {:.4}, tail {:+.4}, derivative sign changes {sign_changes}",
            peak,
            peak_index as i64 - w as i64,
            pre_std,
            tail
        ),
    );
}

#[test]
fn criterion_09_determinism() {
    let dir: PathBuf = std::env::temp_dir().join(format!("mark0-acc9-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    let arg = |s: &str| s.to_string();

    // run: identical config and seed give byte-identical CSVs.
    let r1 = dir.join("r1.csv");
    let r2 = dir.join("r2.csv");
    for out in [&r1, &r2] {
        let code = run_cli(&[
            arg("run"),
            arg("--seed"),
            arg("11"),
            arg("--out"),
            arg(out.to_str().unwrap()),
            arg("n_firms=500"),
            arg("t=3000"),
            arg("t_eq=1000"),
            arg("theta=2"),
        ]);
        assert_eq!(code, 0);
    }
    let run_identical = fs::read(&r1).unwrap() == fs::read(&r2).unwrap();

    // sweep: job count and re-runs do not change a single byte.
    let g1 = dir.join("g1.grid");
    let g2 = dir.join("g2.grid");
    for (out, jobs) in [(&g1, "1"), (&g2, "4")] {
        let code = run_cli(&[
            arg("sweep"),
            arg("--seed"),
            arg("12"),
            arg("--jobs"),
            arg(jobs),
            arg("--out"),
            arg(out.to_str().unwrap()),
            arg("n_firms=200"),
            arg("t=1500"),
            arg("t_eq=500"),
            arg("ensemble=2"),
            arg("theta=2"),
            arg("sweep_x=phi_pi"),
            arg("sweep_x_min=0"),
            arg("sweep_x_max=1"),
            arg("sweep_x_steps=3"),
            arg("sweep_y=phi_eps"),
            arg("sweep_y_min=0"),
            arg("sweep_y_max=1"),
            arg("sweep_y_steps=2"),
        ]);
        assert_eq!(code, 0);
    }
    let sweep_identical = fs::read(&g1).unwrap() == fs::read(&g2).unwrap();

    // shock: identical reruns byte-identical.
    let s1 = dir.join("s1.csv");
    let s2 = dir.join("s2.csv");
    for out in [&s1, &s2] {
        let code = run_cli(&[
            arg("shock"),
            arg("--seed"),
            arg("13"),
            arg("--out"),
            arg(out.to_str().unwrap()),
            arg("n_firms=300"),
            arg("t_eq=400"),
            arg("ensemble=2"),
            arg("theta=3"),
            arg("shock_time=1200"),
            arg("shock_window_before=400"),
            arg("shock_window_after=400"),
        ]);
        assert_eq!(code, 0);
    }
    let shock_identical = fs::read(&s1).unwrap() == fs::read(&s2).unwrap();
    let _ = fs::remove_dir_all(&dir);

    report(
        9,
        "determinism",
        run_identical && sweep_identical && shock_identical,
        &format!("run {run_identical}, sweep across job counts {sweep_identical}, shock {shock_identical}"),
    );
}

#[test]
fn criterion_10_mark0_recovery() {
    // All new channels off: the fragility sensitivity and the consumption
    // propensity must be bit-exactly constant for the whole run.
    let params = mark0_baseline(2.0, 5.0);
    let policy = natural_policy(0.0);
    let record = run_simulation(&params, &policy, T, 3).unwrap();
    let gamma_constant = record.gamma.iter().all(|&g| g == 0.0);
    let propensity_constant = record.propensity.iter().all(|&c| c == params.c0);
    report(
        10,
        "core-model recovery",
        gamma_constant && propensity_constant,
        &format!(
            "Gamma == 0 for all {} steps: {gamma_constant}; c == c0 for all steps: {propensity_constant}",
            record.len()
        ),
    );
}
