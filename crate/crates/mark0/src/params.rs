//! Model and policy parameters with validation.

use core::fmt;

/// Structural and behavioral parameters of the firm/household economy.
///
/// `theta = f64::INFINITY` is the documented sentinel for unbounded leverage
/// (no firm ever defaults).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// Number of firms N_F (also the total money stock M and workforce N).
    pub n_firms: usize,
    /// Baseline consumption propensity c0 in [0, 1].
    pub c0: f64,
    /// Intensity of choice for demand and job allocation.
    pub beta: f64,
    /// Price adjustment scale (multiplicative, per step).
    pub gamma_p: f64,
    /// Wage adjustment scale (multiplicative, per step).
    pub gamma_w: f64,
    /// Baseline firing adjustment speed eta0-.
    pub eta0_minus: f64,
    /// Hiring-to-firing speed ratio R = eta0+/eta0-.
    pub hire_fire_ratio: f64,
    /// Dividend share of positive cash balance, paid on profitable steps.
    pub delta: f64,
    /// Bankruptcy threshold: a firm defaults when its debt exceeds
    /// `theta` times its payroll. `INFINITY` disables defaults.
    pub theta: f64,
    /// Per-step revival probability of an inactive firm.
    pub revival_prob: f64,
    /// Share of default costs charged on loans (the rest on deposits).
    pub default_share: f64,
    /// Household consumption sensitivity to inflation minus deposit rate.
    pub alpha_c: f64,
    /// Firm fragility-sensitivity response to the real loan rate.
    pub alpha_gamma: f64,
    /// Floor of the fragility sensitivity Gamma.
    pub gamma0: f64,
}

/// Central-bank policy knobs: Taylor-rule coefficients, targets and the
/// smoothing weight shared by all exponential moving averages.
#[derive(Clone, Debug, PartialEq)]
pub struct PolicyParams {
    /// Natural interest rate rho* (per step), the base rate on target.
    pub natural_rate: f64,
    /// Inflation-gap aggressiveness (enters with a conventional factor 10).
    pub phi_pi: f64,
    /// Employment-gap aggressiveness.
    pub phi_eps: f64,
    /// Inflation target per step.
    pub inflation_target: f64,
    /// Employment target in (0, 1].
    pub employment_target: f64,
    /// EMA weight omega in (0, 1] for all smoothed macro variables.
    pub ema_weight: f64,
}

impl ModelParams {
    /// Baseline parameter set used throughout the phase-diagram and policy
    /// experiments (unbounded leverage unless overridden).
    pub fn baseline() -> Self {
        Self {
            n_firms: 2000,
            c0: 0.5,
            beta: 2.0,
            gamma_p: 0.05,
            gamma_w: 0.05,
            eta0_minus: 0.1,
            hire_fire_ratio: 2.0,
            delta: 0.02,
            theta: f64::INFINITY,
            revival_prob: 0.1,
            default_share: 0.5,
            alpha_c: 4.0,
            alpha_gamma: 50.0,
            gamma0: 0.0,
        }
    }

    /// Baseline hiring speed eta0+ = R * eta0-.
    pub fn eta0_plus(&self) -> f64 {
        self.hire_fire_ratio * self.eta0_minus
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        fn check(ok: bool, key: &'static str, req: &'static str) -> Result<(), ParamError> {
            if ok {
                Ok(())
            } else {
                Err(ParamError { key, requirement: req })
            }
        }
        check(self.n_firms >= 1, "n_firms", "must be >= 1")?;
        check((0.0..=1.0).contains(&self.c0), "c0", "must be in [0, 1]")?;
        check(self.beta >= 0.0 && self.beta.is_finite(), "beta", "must be finite and >= 0")?;
        check((0.0..1.0).contains(&self.gamma_p), "gamma_p", "must be in [0, 1)")?;
        // The wage-cut factor 1 - gamma_w*(1 + Gamma*Phi)*u*xi stays positive
        // for gamma_w < 1/2 because the clamped fragility bounds the
        // parenthesis by 2.
        check((0.0..0.5).contains(&self.gamma_w), "gamma_w", "must be in [0, 0.5)")?;
        check(
            self.eta0_minus > 0.0 && self.eta0_minus <= 1.0,
            "eta0_minus",
            "must be in (0, 1]",
        )?;
        check(
            self.hire_fire_ratio > 0.0 && self.hire_fire_ratio.is_finite(),
            "R",
            "must be > 0",
        )?;
        check((0.0..=1.0).contains(&self.delta), "delta", "must be in [0, 1]")?;
        check(self.theta >= 0.0, "theta", "must be >= 0 (inf allowed)")?;
        check(
            (0.0..=1.0).contains(&self.revival_prob),
            "phi_revival",
            "must be in [0, 1]",
        )?;
        check((0.0..=1.0).contains(&self.default_share), "f", "must be in [0, 1]")?;
        check(self.alpha_c >= 0.0 && self.alpha_c.is_finite(), "alpha_c", "must be finite and >= 0")?;
        check(
            self.alpha_gamma >= 0.0 && self.alpha_gamma.is_finite(),
            "alpha_gamma",
            "must be finite and >= 0",
        )?;
        check(self.gamma0 >= 0.0 && self.gamma0.is_finite(), "gamma0", "must be finite and >= 0")?;
        Ok(())
    }
}

impl PolicyParams {
    /// Policy defaults: natural rate 2% per step, feedback off, inflation
    /// target 0.2% per step, unemployment target 5%, EMA weight 0.2.
    pub fn baseline() -> Self {
        Self {
            natural_rate: 0.02,
            phi_pi: 0.0,
            phi_eps: 0.0,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        }
    }

    /// All-zero policy: no natural rate, no feedback. Together with
    /// `alpha_c = alpha_gamma = gamma0 = 0` this recovers the core model
    /// without interest rates.
    pub fn inactive() -> Self {
        Self {
            natural_rate: 0.0,
            phi_pi: 0.0,
            phi_eps: 0.0,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        fn check(ok: bool, key: &'static str, req: &'static str) -> Result<(), ParamError> {
            if ok {
                Ok(())
            } else {
                Err(ParamError { key, requirement: req })
            }
        }
        check(
            self.natural_rate >= 0.0 && self.natural_rate.is_finite(),
            "rho_star",
            "must be finite and >= 0",
        )?;
        check(self.phi_pi >= 0.0 && self.phi_pi.is_finite(), "phi_pi", "must be finite and >= 0")?;
        check(
            self.phi_eps >= 0.0 && self.phi_eps.is_finite(),
            "phi_eps",
            "must be finite and >= 0",
        )?;
        check(self.inflation_target.is_finite(), "pi_star", "must be finite")?;
        check(
            self.employment_target > 0.0 && self.employment_target <= 1.0,
            "eps_star",
            "must be in (0, 1]",
        )?;
        check(
            self.ema_weight > 0.0 && self.ema_weight <= 1.0,
            "omega",
            "must be in (0, 1]",
        )?;
        Ok(())
    }
}

/// A parameter failed validation; carries the offending key and requirement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamError {
    pub key: &'static str,
    pub requirement: &'static str,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.key, self.requirement)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_validates() {
        ModelParams::baseline().validate().unwrap();
        PolicyParams::baseline().validate().unwrap();
        PolicyParams::inactive().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = ModelParams::baseline();
        p.n_firms = 0;
        assert_eq!(p.validate().unwrap_err().key, "n_firms");

        let mut p = ModelParams::baseline();
        p.hire_fire_ratio = -1.0;
        let err = p.validate().unwrap_err();
        assert_eq!(err.key, "R");
        assert_eq!(err.to_string(), "R must be > 0");

        let mut p = ModelParams::baseline();
        p.theta = -2.0;
        assert_eq!(p.validate().unwrap_err().key, "theta");

        let mut pol = PolicyParams::baseline();
        pol.ema_weight = 0.0;
        assert_eq!(pol.validate().unwrap_err().key, "omega");
    }

    #[test]
    fn theta_infinity_is_valid() {
        let mut p = ModelParams::baseline();
        p.theta = f64::INFINITY;
        p.validate().unwrap();
    }

    #[test]
    fn eta0_plus_is_ratio_times_minus() {
        let p = ModelParams::baseline();
        assert_eq!(p.eta0_plus(), 0.2);
    }
}
