//! Central-bank policy: EMA smoothing, the Taylor rule with its one-step
//! employment target, and the fragility-sensitivity channel.

use crate::math;
use crate::params::PolicyParams;

/// Employment floor applied before the Taylor logarithm so the rule stays
/// finite in total-collapse states (the non-negativity clamp usually binds
/// there anyway).
pub const EMPLOYMENT_FLOOR: f64 = 1e-3;

/// Exponential moving averages of the macro inputs to policy, all smoothed
/// with the same weight. Each is updated exactly once per step before any
/// policy computation reads it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmoothedMacro {
    pub inflation: f64,
    pub deposit_rate: f64,
    pub loan_rate: f64,
    pub unemployment: f64,
}

impl SmoothedMacro {
    pub fn update(&mut self, omega: f64, inflation: f64, deposit_rate: f64, loan_rate: f64, unemployment: f64) {
        self.inflation = ema_update(self.inflation, inflation, omega);
        self.deposit_rate = ema_update(self.deposit_rate, deposit_rate, omega);
        self.loan_rate = ema_update(self.loan_rate, loan_rate, omega);
        self.unemployment = ema_update(self.unemployment, unemployment, omega);
    }

    pub fn employment(&self) -> f64 {
        1.0 - self.unemployment
    }
}

/// `x_smoothed' = omega * x + (1 - omega) * x_smoothed`.
pub fn ema_update(smoothed: f64, x: f64, omega: f64) -> f64 {
    omega * x + (1.0 - omega) * smoothed
}

/// One-step employment target: when actual employment is far below the
/// policy target, aim for a 2.5% relative improvement per step instead of
/// the full gap.
pub fn effective_employment_target(employment_smoothed: f64, employment_target: f64) -> f64 {
    (1.025 * employment_smoothed).min(employment_target)
}

/// Taylor rule for the base rate, constrained non-negative:
/// `rho0 = max(rho* + 10*phi_pi*(pi~ - pi*) + phi_eps*ln(eps~ / eps_hat*), 0)`.
pub fn taylor_rate(pi_smoothed: f64, employment_smoothed: f64, policy: &PolicyParams) -> f64 {
    let eps = employment_smoothed.max(EMPLOYMENT_FLOOR);
    let eps_hat = effective_employment_target(eps, policy.employment_target);
    let rho = policy.natural_rate
        + 10.0 * policy.phi_pi * (pi_smoothed - policy.inflation_target)
        + policy.phi_eps * math::ln(eps / eps_hat);
    rho.max(0.0)
}

/// Fragility sensitivity driven by the smoothed real loan rate:
/// `Gamma = max(alpha_gamma * (rho_l~ - pi~), gamma0)`. Zero (up to the
/// floor) when real rates are negative.
pub fn gamma_sensitivity(loan_rate_smoothed: f64, pi_smoothed: f64, alpha_gamma: f64, gamma0: f64) -> f64 {
    (alpha_gamma * (loan_rate_smoothed - pi_smoothed)).max(gamma0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ema_examples() {
        assert_eq!(ema_update(0.0, 1.0, 0.2), 0.2);
        // Fixed point.
        assert_eq!(ema_update(0.7, 0.7, 0.2), 0.7);
        // omega = 0.2 corresponds to an averaging time of ~4.5 steps.
        let tau = -1.0 / (1.0f64 - 0.2).ln();
        assert!((tau - 4.48).abs() < 0.01);
    }

    #[test]
    fn one_step_target_examples() {
        assert!((effective_employment_target(0.5, 0.95) - 0.5125).abs() < 1e-15);
        assert_eq!(effective_employment_target(0.95, 0.95), 0.95);
        // min(0.95325, 0.95) saturates at the policy target.
        assert_eq!(effective_employment_target(0.93, 0.95), 0.95);
    }

    #[test]
    fn taylor_on_target_returns_natural_rate() {
        let policy = PolicyParams {
            natural_rate: 0.02,
            phi_pi: 0.5,
            phi_eps: 0.5,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        };
        let rho = taylor_rate(0.002, 0.95, &policy);
        assert!((rho - 0.02).abs() < 1e-15);
    }

    #[test]
    fn taylor_worked_example() {
        let policy = PolicyParams {
            natural_rate: 0.02,
            phi_pi: 0.5,
            phi_eps: 0.7,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        };
        // Employment exactly at the one-step target: the log term vanishes.
        let rho = taylor_rate(0.002 + 0.001, 0.95, &policy);
        assert!((rho - 0.025).abs() < 1e-15);
    }

    #[test]
    fn taylor_clamped_at_zero() {
        let policy = PolicyParams {
            natural_rate: 0.0,
            phi_pi: 1.0,
            phi_eps: 0.0,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        };
        // Deflationary slump: the raw expression is negative.
        assert_eq!(taylor_rate(-0.05, 0.9, &policy), 0.0);
    }

    #[test]
    fn taylor_monotone_in_employment() {
        let policy = PolicyParams {
            natural_rate: 0.02,
            phi_pi: 0.0,
            phi_eps: 0.8,
            inflation_target: 0.002,
            employment_target: 0.95,
            ema_weight: 0.2,
        };
        let mut last = 0.0;
        for i in 0..200 {
            let eps = 0.005 + 0.9945 * (i as f64) / 199.0;
            let rho = taylor_rate(0.002, eps, &policy);
            assert!(rho >= last - 1e-12, "not monotone at eps={eps}");
            last = rho;
        }
        // Far below target the log term is the constant -ln(1.025).
        let low = taylor_rate(0.002, 0.3, &policy);
        assert!((low - (0.02 - 0.8 * 1.025f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma_sensitivity(0.03, 0.01, 50.0, 0.0) - 1.0).abs() < 1e-12);
        // Negative real rate: inert.
        assert_eq!(gamma_sensitivity(0.01, 0.03, 50.0, 0.0), 0.0);
        // Constant-sensitivity regime.
        assert_eq!(gamma_sensitivity(0.5, -0.5, 0.0, 1e-3), 1e-3);
    }
}
