//! Named experiments: deterministic single runs, ensembles, 2-D phase-grid
//! sweeps with parallel cell execution, the monetary-shock impulse response,
//! and the critical-ratio locator.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use mark0::observables::{classify_phase, majority_phase, mean, mean_std};
use mark0::{
    derive_seed, EconomyState, ModelParams, Phase, PhaseThresholds, PolicyParams, RunRecord,
    RunSummary, StepError,
};

use crate::config::Config;

/// A run failed: either the inputs were rejected or the economy violated an
/// internal-consistency check mid-run.
#[derive(Clone, Debug, PartialEq)]
pub enum RunError {
    InvalidParams(String),
    Step(StepError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            RunError::Step(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Runs `t` steps and records every macro observable.
/// Deterministic in `(params, policy, t, seed)`.
pub fn run_simulation(
    params: &ModelParams,
    policy: &PolicyParams,
    t: usize,
    seed: u64,
) -> Result<RunRecord, RunError> {
    if t == 0 {
        return Err(RunError::InvalidParams("t must be >= 1".into()));
    }
    policy
        .validate()
        .map_err(|e| RunError::InvalidParams(e.to_string()))?;
    let mut state =
        EconomyState::init(params, seed).map_err(|e| RunError::InvalidParams(e.to_string()))?;
    let mut record = RunRecord::with_capacity(t);
    for _ in 0..t {
        let row = state.step(params, policy).map_err(RunError::Step)?;
        record.push(&row);
    }
    Ok(record)
}

/// Lean runner capturing only the employment series (for spectral work,
/// where records of 2^20 steps would be wasteful).
pub fn run_epsilon_series(
    params: &ModelParams,
    policy: &PolicyParams,
    t: usize,
    seed: u64,
) -> Result<Vec<f64>, RunError> {
    if t == 0 {
        return Err(RunError::InvalidParams("t must be >= 1".into()));
    }
    let mut state =
        EconomyState::init(params, seed).map_err(|e| RunError::InvalidParams(e.to_string()))?;
    let mut eps = Vec::with_capacity(t);
    for _ in 0..t {
        let row = state.step(params, policy).map_err(RunError::Step)?;
        eps.push(row.epsilon);
    }
    Ok(eps)
}

/// Ensemble of runs over explicit seeds with per-seed summaries and labels,
/// aggregate statistics over the successful runs, and the majority label.
#[derive(Clone, Debug)]
pub struct EnsembleOutcome {
    pub seeds: Vec<u64>,
    pub results: Vec<Result<(RunSummary, Phase), RunError>>,
    pub mean_u: f64,
    pub std_u: f64,
    pub mean_amplitude: f64,
    pub mean_pi: f64,
    pub majority: Option<Phase>,
    pub failures: usize,
}

pub fn ensemble(
    params: &ModelParams,
    policy: &PolicyParams,
    t: usize,
    t_eq: usize,
    seeds: &[u64],
    thresholds: &PhaseThresholds,
) -> EnsembleOutcome {
    assert!(!seeds.is_empty(), "ensemble requires at least one seed");
    let mut results = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let result = run_simulation(params, policy, t, seed).and_then(|record| {
            RunSummary::from_record(&record, t_eq)
                .map_err(|e| RunError::InvalidParams(e.to_string()))
                .map(|summary| (summary, classify_phase(&summary, thresholds)))
        });
        results.push(result);
    }
    let ok: Vec<&(RunSummary, Phase)> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failures = results.len() - ok.len();
    let us: Vec<f64> = ok.iter().map(|(s, _)| s.mean_u).collect();
    let amps: Vec<f64> = ok.iter().map(|(s, _)| s.amplitude).collect();
    let pis: Vec<f64> = ok.iter().map(|(s, _)| s.mean_pi).collect();
    let labels: Vec<Phase> = ok.iter().map(|(_, l)| *l).collect();
    let (mean_u, std_u) = if us.is_empty() { (f64::NAN, f64::NAN) } else { mean_std(&us) };
    EnsembleOutcome {
        seeds: seeds.to_vec(),
        results,
        mean_u,
        std_u,
        mean_amplitude: if amps.is_empty() { f64::NAN } else { mean(&amps) },
        mean_pi: if pis.is_empty() { f64::NAN } else { mean(&pis) },
        majority: majority_phase(&labels),
        failures,
    }
}

/// One axis of a parameter sweep: evenly spaced values of a named parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisSpec {
    pub name: String,
    pub values: Vec<f64>,
}

impl AxisSpec {
    pub fn linspace(name: &str, min: f64, max: f64, steps: usize) -> Self {
        assert!(steps >= 1);
        let values = if steps == 1 {
            vec![min]
        } else {
            (0..steps)
                .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
                .collect()
        };
        Self {
            name: name.to_string(),
            values,
        }
    }
}

/// Full sweep specification: base parameters plus two axes.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub model: ModelParams,
    pub policy: PolicyParams,
    pub t: usize,
    pub t_eq: usize,
    pub ensemble: usize,
    pub base_seed: u64,
    pub thresholds: PhaseThresholds,
    pub x: AxisSpec,
    pub y: AxisSpec,
}

impl SweepSpec {
    /// Builds the spec from a parsed config; the config must carry both axes.
    pub fn from_config(config: &Config) -> Result<Self, SweepError> {
        let x = config
            .sweep_x
            .as_ref()
            .ok_or_else(|| SweepError::MissingAxis("sweep_x"))?;
        let y = config
            .sweep_y
            .as_ref()
            .ok_or_else(|| SweepError::MissingAxis("sweep_y"))?;
        Ok(Self {
            model: config.model.clone(),
            policy: config.policy.clone(),
            t: config.t,
            t_eq: config.t_eq,
            ensemble: config.ensemble,
            base_seed: config.seed,
            thresholds: config.thresholds,
            x: AxisSpec::linspace(&x.name, x.min, x.max, x.steps),
            y: AxisSpec::linspace(&y.name, y.min, y.max, y.steps),
        })
    }

    /// Parameters of one cell, or an error if the axis value violates an
    /// invariant (checked before any run starts).
    fn cell_params(&self, xi: usize, yi: usize) -> Result<(ModelParams, PolicyParams), SweepError> {
        let mut model = self.model.clone();
        let mut policy = self.policy.clone();
        Config::set_axis_value(&mut model, &mut policy, &self.x.name, self.x.values[xi])
            .map_err(SweepError::BadAxis)?;
        Config::set_axis_value(&mut model, &mut policy, &self.y.name, self.y.values[yi])
            .map_err(SweepError::BadAxis)?;
        model.validate().map_err(|e| SweepError::BadAxis(e.to_string()))?;
        policy.validate().map_err(|e| SweepError::BadAxis(e.to_string()))?;
        Ok((model, policy))
    }

    /// Replicate seeds of one cell: `derive_seed(base, x, y, k)`, independent
    /// of scheduling.
    pub fn cell_seeds(&self, xi: usize, yi: usize) -> Vec<u64> {
        (0..self.ensemble)
            .map(|k| derive_seed(self.base_seed, &[xi as u64, yi as u64, k as u64]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepError {
    MissingAxis(&'static str),
    BadAxis(String),
}

impl fmt::Display for SweepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepError::MissingAxis(which) => write!(f, "sweep requires {which} in the config"),
            SweepError::BadAxis(msg) => write!(f, "invalid sweep axis: {msg}"),
        }
    }
}

impl std::error::Error for SweepError {}

/// Ensemble aggregate of one grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellStats {
    pub xi: usize,
    pub yi: usize,
    pub x_value: f64,
    pub y_value: f64,
    pub mean_u: f64,
    pub std_u: f64,
    pub mean_amplitude: f64,
    pub mean_pi: f64,
    pub majority: Phase,
    pub failures: usize,
    pub seeds: Vec<u64>,
}

/// Grid of ensemble aggregates over the two axes, row-major in x.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub ensemble: usize,
    pub base_seed: u64,
    pub cells: Vec<CellStats>,
}

impl PhaseGrid {
    pub fn cell(&self, xi: usize, yi: usize) -> &CellStats {
        &self.cells[yi * self.x.values.len() + xi]
    }
}

/// Runs the sweep with up to `jobs` worker threads. Cells are independent;
/// scheduling cannot affect the result because every cell's seeds derive
/// from its grid coordinates alone. `progress` is invoked after each
/// completed cell with (done, total).
pub fn sweep(
    spec: &SweepSpec,
    jobs: usize,
    progress: &(dyn Fn(usize, usize) + Sync),
) -> Result<PhaseGrid, SweepError> {
    let nx = spec.x.values.len();
    let ny = spec.y.values.len();
    let total = nx * ny;
    // Validate every cell's parameters up front; no run starts otherwise.
    for yi in 0..ny {
        for xi in 0..nx {
            spec.cell_params(xi, yi)?;
        }
    }
    let jobs = jobs.clamp(1, total);
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let cells: Mutex<Vec<Option<CellStats>>> = Mutex::new(vec![None; total]);

    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= total {
                    break;
                }
                let (xi, yi) = (index % nx, index / nx);
                let (model, policy) = spec.cell_params(xi, yi).expect("validated above");
                let seeds = spec.cell_seeds(xi, yi);
                let outcome = ensemble(&model, &policy, spec.t, spec.t_eq, &seeds, &spec.thresholds);
                let stats = CellStats {
                    xi,
                    yi,
                    x_value: spec.x.values[xi],
                    y_value: spec.y.values[yi],
                    mean_u: outcome.mean_u,
                    std_u: outcome.std_u,
                    mean_amplitude: outcome.mean_amplitude,
                    mean_pi: outcome.mean_pi,
                    majority: outcome.majority.unwrap_or(Phase::ResidualUnemployment),
                    failures: outcome.failures,
                    seeds,
                };
                cells.lock().unwrap()[index] = Some(stats);
                let completed = done.fetch_add(1, Ordering::Relaxed) + 1;
                progress(completed, total);
            });
        }
    });

    let cells = cells
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("all cells computed"))
        .collect();
    Ok(PhaseGrid {
        x: spec.x.clone(),
        y: spec.y.clone(),
        ensemble: spec.ensemble,
        base_seed: spec.base_seed,
        cells,
    })
}

/// Monetary-shock experiment: the base rate drops from `pre_rate` to
/// `post_rate` at step `time`, with no other central-bank response.
#[derive(Clone, Debug, PartialEq)]
pub struct ShockSpec {
    pub pre_rate: f64,
    pub post_rate: f64,
    pub time: usize,
    pub window_before: usize,
    pub window_after: usize,
    pub normalize: bool,
}

/// Ensemble-averaged impulse response around the shock step. `offset[i]`
/// is the step relative to the shock (negative = before); `output`,
/// `wages` and `prices` are variations of employment, average wage and
/// average price from their pre-shock means.
#[derive(Clone, Debug, PartialEq)]
pub struct ShockResponse {
    pub offset: Vec<i64>,
    pub output: Vec<f64>,
    pub wages: Vec<f64>,
    pub prices: Vec<f64>,
}

pub fn monetary_shock(
    spec: &ShockSpec,
    params: &ModelParams,
    t_eq: usize,
    seeds: &[u64],
) -> Result<ShockResponse, RunError> {
    if spec.time <= t_eq {
        return Err(RunError::InvalidParams(
            "shock time must exceed the equilibration cutoff".into(),
        ));
    }
    if spec.window_before > spec.time {
        return Err(RunError::InvalidParams(
            "shock window_before must not exceed the shock time".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(RunError::InvalidParams("shock requires at least one seed".into()));
    }
    // The shock isolates the transmission channels: the CB does not react.
    let policy_pre = PolicyParams {
        natural_rate: spec.pre_rate,
        phi_pi: 0.0,
        phi_eps: 0.0,
        ..PolicyParams::baseline()
    };
    let policy_post = PolicyParams {
        natural_rate: spec.post_rate,
        ..policy_pre.clone()
    };

    let window = spec.window_before + spec.window_after;
    let mut output = vec![0.0; window];
    let mut wages = vec![0.0; window];
    let mut prices = vec![0.0; window];
    let total_steps = spec.time + spec.window_after;

    for &seed in seeds {
        let mut state = EconomyState::init(params, seed)
            .map_err(|e| RunError::InvalidParams(e.to_string()))?;
        let mut eps = Vec::with_capacity(total_steps);
        let mut wbar = Vec::with_capacity(total_steps);
        let mut pbar = Vec::with_capacity(total_steps);
        for step in 0..total_steps {
            let policy = if step < spec.time { &policy_pre } else { &policy_post };
            let row = state.step(params, policy).map_err(RunError::Step)?;
            eps.push(row.epsilon);
            wbar.push(row.wbar);
            pbar.push(row.pbar);
        }
        let pre = spec.time - spec.window_before..spec.time;
        let m_eps = mean(&eps[pre.clone()]);
        let m_w = mean(&wbar[pre.clone()]);
        let m_p = mean(&pbar[pre]);
        let weight = 1.0 / seeds.len() as f64;
        for i in 0..window {
            let step = spec.time - spec.window_before + i;
            let (de, dw, dp) = if spec.normalize {
                (
                    (eps[step] - m_eps) / m_eps,
                    (wbar[step] - m_w) / m_w,
                    (pbar[step] - m_p) / m_p,
                )
            } else {
                (eps[step] - m_eps, wbar[step] - m_w, pbar[step] - m_p)
            };
            output[i] += weight * de;
            wages[i] += weight * dw;
            prices[i] += weight * dp;
        }
    }
    let offset = (0..window)
        .map(|i| i as i64 - spec.window_before as i64)
        .collect();
    Ok(ShockResponse {
        offset,
        output,
        wages,
        prices,
    })
}

/// Settings for the critical-ratio locator.
#[derive(Clone, Debug)]
pub struct RcLocator {
    /// Parameter set with `gamma0 = 0` (first-order transition regime);
    /// `hire_fire_ratio` is overwritten during the search.
    pub model: ModelParams,
    pub policy: PolicyParams,
    pub t: usize,
    pub t_eq: usize,
    pub seeds: Vec<u64>,
    pub lo: f64,
    pub hi: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub resolution: f64,
}

impl RcLocator {
    /// Constant-wage locator configuration used by the adaptive-firm
    /// validation experiments.
    pub fn constant_wage_default() -> Self {
        let model = ModelParams {
            n_firms: 50,
            c0: 0.5,
            beta: 0.0,
            gamma_p: 0.05,
            gamma_w: 0.0,
            eta0_minus: 0.1,
            hire_fire_ratio: 1.0,
            delta: 0.02,
            theta: 5.0,
            revival_prob: 0.1,
            default_share: 1.0,
            alpha_c: 0.0,
            alpha_gamma: 0.0,
            gamma0: 0.0,
        };
        let policy = PolicyParams {
            natural_rate: 0.0,
            ..PolicyParams::inactive()
        };
        Self {
            model,
            policy,
            t: 120_000,
            t_eq: 40_000,
            seeds: vec![1, 2, 3],
            lo: 0.6,
            hi: 1.2,
            resolution: 0.005,
        }
    }
}

/// Locates the critical hiring/firing ratio by bisection on the collapse
/// indicator: below the transition the economy settles at high unemployment,
/// above it at (near) full employment. Returns the bracket midpoint.
pub fn locate_critical_r(locator: &RcLocator) -> Result<f64, RunError> {
    let collapsed = |r: f64| -> Result<bool, RunError> {
        let mut model = locator.model.clone();
        model.hire_fire_ratio = r;
        let mut us = Vec::new();
        for &seed in &locator.seeds {
            let record = run_simulation(&model, &locator.policy, locator.t, seed)?;
            us.push(mean(&record.u[locator.t_eq..]));
        }
        Ok(mean(&us) > 0.5)
    };
    let (mut lo, mut hi) = (locator.lo, locator.hi);
    if !collapsed(lo)? {
        return Err(RunError::InvalidParams(format!(
            "R_c bracket: economy did not collapse at R = {lo}"
        )));
    }
    if collapsed(hi)? {
        return Err(RunError::InvalidParams(format!(
            "R_c bracket: economy still collapsed at R = {hi}"
        )));
    }
    while hi - lo > locator.resolution {
        let mid = 0.5 * (lo + hi);
        if collapsed(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
