//! Run summaries, phase classification and the residual-employment
//! prediction for the constant-sensitivity regime.

use core::fmt;

use crate::record::RunRecord;

/// The four macro phases of the model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    FullEmployment,
    FullUnemployment,
    EndogenousCrises,
    ResidualUnemployment,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::FullEmployment => "FE",
            Phase::FullUnemployment => "FU",
            Phase::EndogenousCrises => "EC",
            Phase::ResidualUnemployment => "RU",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "FE" => Some(Phase::FullEmployment),
            "FU" => Some(Phase::FullUnemployment),
            "EC" => Some(Phase::EndogenousCrises),
            "RU" => Some(Phase::ResidualUnemployment),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Classifier thresholds. The phases are defined visually in the source
/// material; these cutoffs are calibrated once against the four reference
/// corners of the baseline phase diagram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseThresholds {
    /// FE requires mean unemployment below this.
    pub fe_max_u: f64,
    /// EC requires cycle amplitude at least this.
    pub ec_min_amplitude: f64,
    /// FU requires mean unemployment above this (plus deflation).
    pub fu_min_u: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            fe_max_u: 0.1,
            ec_min_amplitude: 0.25,
            fu_min_u: 0.6,
        }
    }
}

/// Post-equilibration summary statistics of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub mean_u: f64,
    /// Cycle amplitude `max_t u - min_t u` over the measurement window.
    pub amplitude: f64,
    pub mean_pi: f64,
    pub var_epsilon: f64,
}

/// The measurement window `t >= t_eq` is empty or absent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmptyWindow {
    pub len: usize,
    pub t_eq: usize,
}

impl fmt::Display for EmptyWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "measurement window is empty: series length {} with equilibration cutoff {}",
            self.len, self.t_eq
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EmptyWindow {}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// `max - min` of the series over `t >= t_eq` (indices `>= t_eq`).
pub fn cycle_amplitude(series: &[f64], t_eq: usize) -> Result<f64, EmptyWindow> {
    let window = series.get(t_eq..).filter(|w| !w.is_empty()).ok_or(EmptyWindow {
        len: series.len(),
        t_eq,
    })?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in window {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok(hi - lo)
}

impl RunSummary {
    /// Summarizes a record over its measurement window `t >= t_eq`.
    pub fn from_record(record: &RunRecord, t_eq: usize) -> Result<Self, EmptyWindow> {
        let amplitude = cycle_amplitude(&record.u, t_eq)?;
        Ok(Self {
            mean_u: mean(&record.u[t_eq..]),
            amplitude,
            mean_pi: mean(&record.pi[t_eq..]),
            var_epsilon: variance(&record.epsilon[t_eq..]),
        })
    }
}

/// Assigns a phase label, evaluating in the tie-break order EC > FU > FE > RU.
pub fn classify_phase(summary: &RunSummary, thresholds: &PhaseThresholds) -> Phase {
    if summary.amplitude >= thresholds.ec_min_amplitude {
        Phase::EndogenousCrises
    } else if summary.mean_u > thresholds.fu_min_u && summary.mean_pi < 0.0 {
        Phase::FullUnemployment
    } else if summary.mean_u < thresholds.fe_max_u {
        Phase::FullEmployment
    } else {
        Phase::ResidualUnemployment
    }
}

/// Majority label of an ensemble; ties break in the order EC > FU > FE > RU.
pub fn majority_phase(labels: &[Phase]) -> Option<Phase> {
    if labels.is_empty() {
        return None;
    }
    let order = [
        Phase::EndogenousCrises,
        Phase::FullUnemployment,
        Phase::FullEmployment,
        Phase::ResidualUnemployment,
    ];
    let mut best = order[0];
    let mut best_count = 0usize;
    for phase in order {
        let count = labels.iter().filter(|&&l| l == phase).count();
        if count > best_count {
            best = phase;
            best_count = count;
        }
    }
    Some(best)
}

/// Predicted residual employment in the constant-sensitivity regime below
/// the critical adjustment ratio:
/// `eps = gamma0 / ((r_c - r)/(r_c + r) + gamma0)`, and 1 at or above `r_c`.
pub fn residual_employment_oracle(r: f64, r_c: f64, gamma0: f64) -> f64 {
    if r >= r_c {
        return 1.0;
    }
    gamma0 / ((r_c - r) / (r_c + r) + gamma0)
}

/// Ordinary least squares `y ~ slope * x + intercept`; returns
/// `(slope, intercept, r_squared)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
        syy += (yi - my) * (yi - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, intercept, r2)
}

/// Ensemble mean and standard deviation (population) of a statistic.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    (m, crate::math::sqrt(variance(xs)))
}
