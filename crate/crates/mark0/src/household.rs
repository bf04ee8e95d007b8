//! The aggregate household sector and its consumption rule.

/// Households hold savings, receive wages and interest, and spend a fraction
/// of their resources each step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HouseholdSector {
    pub savings: f64,
    /// Total wage bill received this step.
    pub total_wages: f64,
    /// Consumption budget set this step.
    pub consumption_budget: f64,
    /// Consumption propensity used this step.
    pub propensity: f64,
}

/// Consumption propensity and budget.
///
/// The propensity rises with the smoothed gap between inflation and the
/// deposit rate (saving is unattractive when real returns are negative) and
/// is clamped to [0, 1]. The budget applies it to savings plus the current
/// wage bill plus interest on savings.
pub fn consumption_budget(
    savings: f64,
    total_wages: f64,
    rho_deposit: f64,
    pi_smoothed: f64,
    rho_deposit_smoothed: f64,
    c0: f64,
    alpha_c: f64,
) -> (f64, f64) {
    let c = (c0 * (1.0 + alpha_c * (pi_smoothed - rho_deposit_smoothed))).clamp(0.0, 1.0);
    let budget = c * (savings + total_wages + rho_deposit * savings);
    (c, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_propensity_when_insensitive() {
        let (c, _) = consumption_budget(100.0, 50.0, 0.01, 0.05, -0.02, 0.5, 0.0);
        assert_eq!(c, 0.5);
    }

    #[test]
    fn worked_example() {
        let (c, budget) = consumption_budget(100.0, 50.0, 0.005, 0.01, 0.005, 0.5, 4.0);
        assert!((c - 0.51).abs() < 1e-15);
        assert!((budget - 76.755).abs() < 1e-12);
    }

    #[test]
    fn propensity_clamped() {
        // Extreme deflation drives the raw propensity negative.
        let (c, budget) = consumption_budget(100.0, 0.0, 0.0, -0.9, 0.1, 0.5, 4.0);
        assert_eq!(c, 0.0);
        assert_eq!(budget, 0.0);
        // And extreme inflation saturates it at 1.
        let (c, _) = consumption_budget(100.0, 0.0, 0.0, 0.9, -0.1, 0.5, 4.0);
        assert_eq!(c, 1.0);
    }
}
