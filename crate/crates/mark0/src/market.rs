//! Market mechanisms shared by the step loop: production-weighted averages
//! and the intensity-of-choice allocation of workers and demand.

use alloc::vec::Vec;

use crate::firm::FirmState;
use crate::math;

/// Production-weighted average of `value` over active firms, falling back to
/// the unweighted mean when total production is zero and to `last` when no
/// firm is active.
fn weighted_mean(firms: &[FirmState], value: impl Fn(&FirmState) -> f64, last: f64) -> f64 {
    let mut weighted = 0.0;
    let mut weight = 0.0;
    let mut plain = 0.0;
    let mut count = 0usize;
    for f in firms.iter().filter(|f| f.active) {
        weighted += value(f) * f.production;
        weight += f.production;
        plain += value(f);
        count += 1;
    }
    if weight > 0.0 {
        weighted / weight
    } else if count > 0 {
        plain / count as f64
    } else {
        last
    }
}

/// Production-weighted average price.
pub fn average_price(firms: &[FirmState], last: f64) -> f64 {
    weighted_mean(firms, |f| f.price, last)
}

/// Production-weighted average wage.
pub fn average_wage(firms: &[FirmState], last: f64) -> f64 {
    weighted_mean(firms, |f| f.wage, last)
}

/// Employment rate: total production over the workforce `n_firms`, clamped
/// to [0, 1] against float round-off.
pub fn employment_rate(firms: &[FirmState], n_firms: usize) -> f64 {
    let total: f64 = firms.iter().map(|f| f.production).sum();
    (total / n_firms as f64).clamp(0.0, 1.0)
}

/// Inflation between two consecutive average prices.
pub fn inflation(pbar: f64, pbar_prev: f64) -> f64 {
    (pbar - pbar_prev) / pbar_prev
}

/// Start-of-step aggregates in one pass: employment rate, average price and
/// average wage (with the same fallbacks as the individual functions).
pub fn aggregates(firms: &[FirmState], n_firms: usize, pbar_last: f64, wbar_last: f64) -> (f64, f64, f64) {
    let mut total_y = 0.0;
    let mut py = 0.0;
    let mut wy = 0.0;
    let mut p_plain = 0.0;
    let mut w_plain = 0.0;
    let mut active = 0usize;
    for f in firms {
        total_y += f.production;
        if f.active {
            py += f.price * f.production;
            wy += f.wage * f.production;
            p_plain += f.price;
            w_plain += f.wage;
            active += 1;
        }
    }
    let epsilon = (total_y / n_firms as f64).clamp(0.0, 1.0);
    // Inactive firms carry production exactly 0.0, so the all-firm total
    // equals the active-only weight bit for bit.
    let weight = total_y;
    let (pbar, wbar) = if weight > 0.0 {
        (py / weight, wy / weight)
    } else if active > 0 {
        (p_plain / active as f64, w_plain / active as f64)
    } else {
        (pbar_last, wbar_last)
    };
    (epsilon, pbar, wbar)
}

/// Distributes the `n_firms * u` unemployed workers across active firms by a
/// softmax on offered wages: `u*_i = N_F u exp(beta W_i / wbar) / sum_active`.
/// Inactive firms get zero. The allocation sums to `n_firms * u`.
///
/// Writes into `out` (resized to `firms.len()`).
pub fn allocate_workforce(
    firms: &[FirmState],
    beta: f64,
    unemployment: f64,
    wbar: f64,
    n_firms: usize,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.resize(firms.len(), 0.0);
    // Stabilized softmax: shift exponents by their maximum.
    let scale = beta / wbar;
    let mut max_arg = f64::NEG_INFINITY;
    for f in firms.iter().filter(|f| f.active) {
        max_arg = max_arg.max(scale * f.wage);
    }
    if max_arg == f64::NEG_INFINITY {
        return; // no active firms
    }
    let mut total = 0.0;
    for (i, f) in firms.iter().enumerate() {
        if f.active {
            let w = math::exp(scale * f.wage - max_arg);
            out[i] = w;
            total += w;
        }
    }
    let pool = n_firms as f64 * unemployment;
    for v in out.iter_mut() {
        *v *= pool / total;
    }
}

/// Splits the consumption budget across active firms by a softmax on prices
/// and converts each share into goods demanded:
/// `D_i = (C_B / p_i) exp(-beta p_i / pbar) / sum_active`. Inactive firms get
/// zero demand. The allocated budget sums to `budget` exactly.
pub fn allocate_demand(firms: &mut [FirmState], budget: f64, beta: f64, pbar: f64) {
    let mut scratch = Vec::new();
    allocate_demand_with(firms, budget, beta, pbar, &mut scratch);
}

/// As [`allocate_demand`], reusing a caller-provided weight buffer.
pub fn allocate_demand_with(
    firms: &mut [FirmState],
    budget: f64,
    beta: f64,
    pbar: f64,
    weights: &mut Vec<f64>,
) {
    let scale = -beta / pbar;
    let mut max_arg = f64::NEG_INFINITY;
    for f in firms.iter().filter(|f| f.active) {
        max_arg = max_arg.max(scale * f.price);
    }
    if max_arg == f64::NEG_INFINITY {
        return; // no active firms: the budget stays with households
    }
    weights.clear();
    weights.resize(firms.len(), 0.0);
    let mut total = 0.0;
    for (w, f) in weights.iter_mut().zip(firms.iter()) {
        if f.active {
            *w = math::exp(scale * f.price - max_arg);
            total += *w;
        }
    }
    for (w, f) in weights.iter().zip(firms.iter_mut()) {
        f.demand = if f.active { budget / f.price * *w / total } else { 0.0 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn firm(price: f64, wage: f64, production: f64, active: bool) -> FirmState {
        FirmState {
            production,
            price,
            wage,
            cash: 0.0,
            demand: 0.0,
            profit: 0.0,
            active,
        }
    }

    #[test]
    fn average_price_examples() {
        let firms = vec![firm(1.0, 1.0, 3.0, true), firm(3.0, 1.0, 1.0, true)];
        assert!((average_price(&firms, 1.0) - 1.5).abs() < 1e-15);
        // Equal prices: any weights give the common price.
        let firms = vec![firm(2.0, 1.0, 0.4, true), firm(2.0, 1.0, 2.5, true)];
        assert_eq!(average_price(&firms, 1.0), 2.0);
    }

    #[test]
    fn average_price_fallbacks() {
        // Zero total production: unweighted mean over active firms.
        let firms = vec![firm(1.0, 1.0, 0.0, true), firm(3.0, 1.0, 0.0, true)];
        assert_eq!(average_price(&firms, 9.0), 2.0);
        // No active firms: carry the last known value.
        let firms = vec![firm(1.0, 1.0, 0.0, false)];
        assert_eq!(average_price(&firms, 9.0), 9.0);
    }

    #[test]
    fn inflation_examples() {
        assert_eq!(inflation(1.0, 1.0), 0.0);
        assert!((inflation(1.01, 1.0) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn workforce_uniform_when_beta_zero() {
        let firms = vec![
            firm(1.0, 1.0, 0.5, true),
            firm(1.0, 2.0, 0.5, true),
            firm(1.0, 0.5, 0.5, true),
            firm(1.0, 3.0, 0.5, true),
        ];
        let mut out = Vec::new();
        allocate_workforce(&firms, 0.0, 0.5, 1.0, 4, &mut out);
        for &v in &out {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn workforce_equal_wages_split_equally() {
        let firms = vec![firm(1.0, 1.3, 0.5, true), firm(1.0, 1.3, 0.5, true)];
        let mut out = Vec::new();
        allocate_workforce(&firms, 7.0, 0.4, 1.3, 2, &mut out);
        assert!((out[0] - out[1]).abs() < 1e-12);
        let total: f64 = out.iter().sum();
        assert!((total - 2.0 * 0.4).abs() < 1e-12);
    }

    #[test]
    fn workforce_limit_all_to_highest_wage() {
        let firms = vec![
            firm(1.0, 1.0, 0.5, true),
            firm(1.0, 1.5, 0.5, true),
            firm(1.0, 1.2, 0.5, true),
        ];
        let mut out = Vec::new();
        allocate_workforce(&firms, 1e4, 0.3, 1.0, 3, &mut out);
        assert!((out[1] - 3.0 * 0.3).abs() < 1e-9);
        assert!(out[0] < 1e-12 && out[2] < 1e-12);
    }

    #[test]
    fn workforce_sums_to_pool_and_skips_inactive() {
        let firms = vec![
            firm(1.0, 1.0, 0.5, true),
            firm(1.0, 2.0, 0.0, false),
            firm(1.0, 0.7, 0.5, true),
        ];
        let mut out = Vec::new();
        allocate_workforce(&firms, 2.0, 0.25, 1.1, 3, &mut out);
        assert_eq!(out[1], 0.0);
        let total: f64 = out.iter().sum();
        assert!((total - 0.75).abs() < 1e-12);
    }

    #[test]
    fn workforce_no_active_firms() {
        let firms = vec![firm(1.0, 1.0, 0.0, false)];
        let mut out = Vec::new();
        allocate_workforce(&firms, 2.0, 0.5, 1.0, 1, &mut out);
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn demand_price_insensitive_when_beta_zero() {
        let mut firms = vec![firm(1.0, 1.0, 0.5, true), firm(2.0, 1.0, 0.5, true)];
        allocate_demand(&mut firms, 10.0, 0.0, 1.5);
        assert!((firms[0].demand - 5.0).abs() < 1e-12);
        assert!((firms[1].demand - 2.5).abs() < 1e-12);
    }

    #[test]
    fn demand_limit_lowest_price_takes_all() {
        let mut firms = vec![
            firm(1.0, 1.0, 0.5, true),
            firm(1.1, 1.0, 0.5, true),
            firm(3.0, 1.0, 0.5, true),
        ];
        allocate_demand(&mut firms, 12.0, 1e4, 1.5);
        assert!((firms[0].demand - 12.0).abs() < 1e-9);
        assert!(firms[1].demand < 1e-12 && firms[2].demand < 1e-12);
    }

    #[test]
    fn demand_equal_prices_equal_budget_shares() {
        let mut firms = vec![firm(2.0, 1.0, 0.5, true), firm(2.0, 1.0, 0.5, true)];
        allocate_demand(&mut firms, 8.0, 3.7, 2.0);
        assert!((firms[0].demand - firms[1].demand).abs() < 1e-12);
    }

    #[test]
    fn demand_exhausts_budget_and_skips_inactive() {
        let mut firms = vec![
            firm(0.8, 1.0, 0.5, true),
            firm(1.9, 1.0, 0.0, false),
            firm(1.2, 1.0, 0.5, true),
        ];
        allocate_demand(&mut firms, 23.0, 2.0, 1.0);
        assert_eq!(firms[1].demand, 0.0);
        let spent: f64 = firms.iter().map(|f| f.price * f.demand).sum();
        assert!((spent - 23.0).abs() < 1e-10);
    }
}
