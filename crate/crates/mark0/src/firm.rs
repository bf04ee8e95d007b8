//! Firm state and the per-firm adaptive update rules.
//!
//! All functions here are pure in their explicit arguments; the step
//! orchestration in [`crate::economy`] decides what to feed them and in
//! which order. Random variates are passed in so the rules are exactly
//! testable.

/// One firm: production (= workforce), posted price, offered wage, cash
/// balance, demand observed last allocation, last profit, and activity flag.
///
/// Inactive firms carry zero production, demand and cash until revived.
#[derive(Clone, Debug, PartialEq)]
pub struct FirmState {
    pub production: f64,
    pub price: f64,
    pub wage: f64,
    pub cash: f64,
    pub demand: f64,
    pub profit: f64,
    pub active: bool,
}

/// Financial fragility: debt over payroll, `-cash / (wage * production)`.
///
/// When `gamma > 0` the value is clamped to `[-1/gamma, 1/gamma]` so the
/// reaction-rate factors `1 ± gamma*phi` stay in `[0, 2]`. A firm with no
/// payroll has no meaningful leverage ratio and gets fragility 0.
pub fn fragility(cash: f64, wage: f64, production: f64, gamma: f64) -> f64 {
    let payroll = wage * production;
    if payroll <= 0.0 {
        return 0.0;
    }
    let phi = -cash / payroll;
    if gamma > 0.0 {
        let limit = 1.0 / gamma;
        phi.clamp(-limit, limit)
    } else {
        phi
    }
}

/// Hiring/firing speeds modulated by financial fragility:
/// `eta- = eta0- * max(1 + gamma*phi, 0)`, `eta+ = R*eta0- * max(1 - gamma*phi, 0)`.
///
/// Indebted firms (`phi > 0`) fire faster and hire slower; cash-rich firms
/// the opposite. `gamma = 0` recovers the constant baseline speeds.
pub fn reaction_rates(phi: f64, gamma: f64, eta0_minus: f64, ratio: f64) -> (f64, f64) {
    let eta_plus = ratio * eta0_minus * (1.0 - gamma * phi).max(0.0);
    let eta_minus = eta0_minus * (1.0 + gamma * phi).max(0.0);
    (eta_plus, eta_minus)
}

/// Multiplicative price update driven by the excess demand experienced last
/// step and the firm's competitiveness against the average price:
/// underproducers below the average raise, overproducers above it cut.
pub fn update_price(price: f64, production: f64, demand: f64, pbar: f64, gamma_p: f64, xi: f64) -> f64 {
    if production < demand {
        if price < pbar {
            return price * (1.0 + gamma_p * xi);
        }
    } else if production > demand && price > pbar {
        return price * (1.0 - gamma_p * xi);
    }
    price
}

/// Production update: hire towards demand, capped by the labor available to
/// this firm, or fire a fraction of the surplus.
pub fn update_production(
    production: f64,
    demand: f64,
    eta_plus: f64,
    eta_minus: f64,
    labor_available: f64,
) -> f64 {
    if production < demand {
        production + (eta_plus * (demand - production)).min(labor_available)
    } else if production > demand {
        (production - eta_minus * (production - demand)).max(0.0)
    } else {
        production
    }
}

/// Wage update. A profitable firm facing excess demand raises wages (more if
/// healthy, more when unemployment is low); a loss-making firm facing excess
/// supply cuts them (more if fragile, more when unemployment is high).
///
/// A raise is capped at the break-even wage where the profit recomputed at
/// current sales and the prevailing rates would be zero. The cap only ever
/// limits a raise: when break-even is already below the current wage the
/// wage is left unchanged (the rule defines no cut here, and wages must stay
/// positive).
#[allow(clippy::too_many_arguments)]
pub fn update_wage(
    wage: f64,
    production: f64,
    demand: f64,
    profit: f64,
    cash: f64,
    price: f64,
    phi: f64,
    gamma: f64,
    unemployment: f64,
    gamma_w: f64,
    rho_deposit: f64,
    rho_loan: f64,
    xi: f64,
) -> f64 {
    if production < demand && profit > 0.0 {
        let employment = 1.0 - unemployment;
        let raised = wage * (1.0 + gamma_w * (1.0 - gamma * phi) * employment * xi);
        if production > 0.0 {
            let break_even = (price * demand.min(production)
                + rho_deposit * cash.max(0.0)
                + rho_loan * cash.min(0.0))
                / production;
            raised.min(break_even.max(wage))
        } else {
            raised
        }
    } else if production > demand && profit < 0.0 {
        wage * (1.0 - gamma_w * (1.0 + gamma * phi) * unemployment * xi)
    } else {
        wage
    }
}

/// Sales revenue minus payroll plus net interest on the cash balance.
pub fn profit(
    price: f64,
    production: f64,
    demand: f64,
    wage: f64,
    cash: f64,
    rho_deposit: f64,
    rho_loan: f64,
) -> f64 {
    price * production.min(demand) - wage * production
        + rho_deposit * cash.max(0.0)
        + rho_loan * cash.min(0.0)
}

/// Applies one accounting round to a firm: add profit to cash, then pay a
/// dividend `delta * cash` to households when both profit and the updated
/// cash balance are positive. Returns the dividend paid.
pub fn settle(firm: &mut FirmState, new_profit: f64, delta: f64) -> f64 {
    firm.profit = new_profit;
    firm.cash += new_profit;
    if new_profit > 0.0 && firm.cash > 0.0 {
        let dividend = delta * firm.cash;
        firm.cash -= dividend;
        dividend
    } else {
        0.0
    }
}
