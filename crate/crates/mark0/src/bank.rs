//! The private banking sector: aggregate balance-sheet state and the
//! no-profit interest-rate rule.

use core::fmt;

/// Aggregate banking state for one step: the base rate set by the central
/// bank, the loan and deposit rates derived from it, and the balance-sheet
/// aggregates they were derived from.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BankState {
    pub base_rate: f64,
    pub loan_rate: f64,
    pub deposit_rate: f64,
    /// Cost of this step's firm defaults, borne by the banking sector.
    pub default_costs: f64,
    /// Total loans E- (sum of debtor firms' negative balances, sign-flipped).
    pub total_loans: f64,
    /// Total firm deposits E+.
    pub total_firm_deposits: f64,
}

/// Sets the loan and deposit rates so that banking profits are exactly zero:
/// interest collected on loans minus interest paid on deposits covers the
/// default costs. A share `f` of the default costs is charged on loans, the
/// rest on deposits; with no outstanding loans the whole cost falls on
/// deposits.
///
/// `deposits_total` is the full deposit base (household savings plus firm
/// deposits). The deposit rate can go negative when defaults are large.
pub fn bank_rates(
    base_rate: f64,
    default_costs: f64,
    loans: f64,
    deposits_total: f64,
    f: f64,
) -> Result<(f64, f64), DrainedDeposits> {
    if deposits_total <= 0.0 {
        return Err(DrainedDeposits { deposits_total });
    }
    if loans > 0.0 {
        let loan_rate = base_rate + f * default_costs / loans;
        let deposit_rate = (base_rate * loans - (1.0 - f) * default_costs) / deposits_total;
        Ok((loan_rate, deposit_rate))
    } else {
        Ok((base_rate, -default_costs / deposits_total))
    }
}

/// Residual of the zero-profit identity `rho_l*E- - rho_d*X - D`; should be
/// zero to float accuracy after every rate setting.
pub fn no_profit_residual(
    loan_rate: f64,
    deposit_rate: f64,
    loans: f64,
    deposits_total: f64,
    default_costs: f64,
) -> f64 {
    loan_rate * loans - deposit_rate * deposits_total - default_costs
}

/// The deposit base hit zero: every agent in the economy is broke and the
/// rate rule is undefined. Runs abort with this diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct DrainedDeposits {
    pub deposits_total: f64,
}

impl fmt::Display for DrainedDeposits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "total deposits {} <= 0: the economy is fully drained",
            self.deposits_total
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DrainedDeposits {}
