//! The full economy state and the step loop.
//!
//! One step executes, in this exact order:
//!
//! 1. start-of-step aggregates: employment, unemployment, average price and
//!    wage, per-firm labor availability; inflation against the previous
//!    step's average price;
//! 2. EMA updates of inflation, deposit rate, loan rate and unemployment;
//! 3. central bank sets the base rate (Taylor rule) and the fragility
//!    sensitivity Gamma;
//! 4. bankruptcy resolution, then price/production/wage updates for the
//!    surviving firms (wage caps use the previous step's rates);
//! 5. unemployment and the average price are recomputed so job losses and
//!    price moves become visible to the rest of the step;
//! 6. the private bank sets loan and deposit rates under the no-profit rule;
//! 7. households receive wages and interest, set the consumption budget, and
//!    demand is allocated across firms;
//! 8. firm accounting and dividends;
//! 9. inactive firms revive with probability `phi_revival`, funded
//!    proportionally by cash-rich firms.
//!
//! The ordering is semantically load-bearing (which aggregates each rule
//! sees is part of the model), so a single run is strictly sequential.
//! Distinct runs share nothing and can execute concurrently.

use alloc::vec::Vec;
use core::fmt;

use crate::bank::{bank_rates, no_profit_residual, BankState};
use crate::firm::{self, FirmState};
use crate::household::{consumption_budget, HouseholdSector};
use crate::market;
use crate::params::{ModelParams, ParamError, PolicyParams};
use crate::policy::{gamma_sensitivity, taylor_rate, SmoothedMacro};
use crate::rng::{Uniform01, Xoshiro256PlusPlus};

/// Relative tolerance on money conservation: the run aborts when
/// `|savings + sum(cash) - money_stock|` exceeds this times `n_firms`.
pub const MONEY_TOLERANCE: f64 = 1e-6;

/// Relative tolerance on the banking no-profit identity per step.
pub const BANK_IDENTITY_TOLERANCE: f64 = 1e-12;

/// Average-price bound beyond which the nominal unit is rebased.
///
/// Sustained inflation grows every balance-sheet entry exponentially while
/// the net money stock stays fixed, so the conservation check would drown in
/// float cancellation. All update rules are homogeneous of degree one in the
/// nominal block (prices, wages, cash, savings, budgets), which makes a
/// common rescaling an exact symmetry: whenever the average price leaves
/// `[1/RENORM_THRESHOLD, RENORM_THRESHOLD]` every nominal quantity is
/// divided by it and the unit factor is accumulated in `nominal_scale`.
/// Real dynamics (employment, inflation, rates, fragility) are unaffected.
pub const RENORM_THRESHOLD: f64 = 1e3;

/// Complete mutable state of one simulation run.
#[derive(Clone, Debug)]
pub struct EconomyState {
    pub firms: Vec<FirmState>,
    pub households: HouseholdSector,
    pub bank: BankState,
    pub smoothed: SmoothedMacro,
    /// Fragility sensitivity in force this step.
    pub gamma: f64,
    /// Average price at the start of the last executed step (inflation
    /// reference).
    pub pbar_prev: f64,
    /// Last computed average wage (fallback for a fully inactive economy).
    pub wbar_prev: f64,
    /// Cumulative nominal-unit factor: a quantity in original money units is
    /// its current value times this. Starts at 1; see [`RENORM_THRESHOLD`].
    pub nominal_scale: f64,
    rng: Xoshiro256PlusPlus,
    pub t: u64,
    // Scratch buffers reused across steps.
    labor_available: Vec<f64>,
    demand_weights: Vec<f64>,
}

/// Macro observables emitted by one step. See [`crate::record::RunRecord`]
/// for the column conventions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRow {
    pub t: u64,
    pub u: f64,
    pub epsilon: f64,
    pub pi: f64,
    pub rho0: f64,
    pub rho_loan: f64,
    pub rho_deposit: f64,
    pub pbar: f64,
    pub wbar: f64,
    pub savings: f64,
    pub firm_deposits: f64,
    pub firm_loans: f64,
    pub default_costs: f64,
    pub bankruptcies: u32,
    pub gamma: f64,
    pub propensity: f64,
}

/// Internal-consistency failure; aborts the run at the offending step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepError {
    pub step: u64,
    pub kind: StepErrorKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepErrorKind {
    /// Money stock drifted beyond `MONEY_TOLERANCE * n_firms`.
    MoneyDrift { drift: f64 },
    /// The banking no-profit identity failed beyond tolerance.
    BankIdentity { residual: f64 },
    /// Total deposits hit zero; interest rates are undefined.
    DrainedDeposits,
    /// Household savings went negative (defaults exceeded all deposits).
    NegativeSavings { savings: f64 },
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StepErrorKind::MoneyDrift { drift } => {
                write!(f, "money conservation violated at step {}: drift {}", self.step, drift)
            }
            StepErrorKind::BankIdentity { residual } => write!(
                f,
                "banking no-profit identity violated at step {}: residual {}",
                self.step, residual
            ),
            StepErrorKind::DrainedDeposits => {
                write!(f, "total deposits reached zero at step {}", self.step)
            }
            StepErrorKind::NegativeSavings { savings } => {
                write!(f, "household savings went negative at step {}: {}", self.step, savings)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for StepError {}

impl EconomyState {
    /// Initializes the economy: unit wages, prices and sizes uniformly
    /// spread 20% around their means, initial employment 1/2, uniform random
    /// firm cash below one payroll, and household savings absorbing the rest
    /// of the money stock `M = n_firms`. Identical `(params, seed)` produce
    /// bit-identical states.
    pub fn init(params: &ModelParams, seed: u64) -> Result<Self, ParamError> {
        params.validate()?;
        let mut seeder = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut state = Self::init_from_source(params, &mut seeder);
        state.rng = seeder; // continue the same stream for step draws
        Ok(state)
    }

    /// As [`EconomyState::init`] but drawing the initial heterogeneity from
    /// an arbitrary source (tests force exact values through this).
    pub fn init_with<R: Uniform01>(params: &ModelParams, source: &mut R) -> Result<Self, ParamError> {
        params.validate()?;
        Ok(Self::init_from_source(params, source))
    }

    fn init_from_source<R: Uniform01>(params: &ModelParams, source: &mut R) -> Self {
        let n = params.n_firms;
        let mut firms = Vec::with_capacity(n);
        let mut total_cash = 0.0;
        for _ in 0..n {
            let price = 1.0 + 0.2 * (source.next_f64() - 0.5);
            let production = (1.0 + 0.2 * (source.next_f64() - 0.5)) / 2.0;
            let wage = 1.0;
            let cash = wage * production * source.next_f64();
            let demand = 0.5f64;
            let profit = price * demand.min(production) - wage * production;
            total_cash += cash;
            firms.push(FirmState {
                production,
                price,
                wage,
                cash,
                demand,
                profit,
                active: true,
            });
        }
        let savings = n as f64 - total_cash;
        let pbar = market::average_price(&firms, 1.0);
        let wbar = market::average_wage(&firms, 1.0);
        let unemployment = 1.0 - market::employment_rate(&firms, n);
        Self {
            firms,
            households: HouseholdSector {
                savings,
                total_wages: 0.0,
                consumption_budget: 0.0,
                propensity: params.c0,
            },
            bank: BankState::default(),
            smoothed: SmoothedMacro {
                inflation: 0.0,
                deposit_rate: 0.0,
                loan_rate: 0.0,
                unemployment,
            },
            gamma: params.gamma0,
            pbar_prev: pbar,
            wbar_prev: wbar,
            nominal_scale: 1.0,
            rng: Xoshiro256PlusPlus::seed_from_u64(0),
            t: 0,
            labor_available: Vec::new(),
            demand_weights: Vec::new(),
        }
    }

    /// Signed deviation of the money stock from its conserved value, in
    /// current nominal units: `savings + sum_i cash_i - n_firms / scale`.
    /// Exactly zero at initialization and conserved by every step up to
    /// float round-off.
    pub fn money_drift(&self) -> f64 {
        let firm_cash: f64 = self.firms.iter().map(|f| f.cash).sum();
        self.households.savings + firm_cash - self.firms.len() as f64 / self.nominal_scale
    }

    /// Rebases the nominal unit when the average price has drifted far from
    /// one. Exact unit change: every nominal quantity is divided by the
    /// current average price and the factor folds into `nominal_scale`.
    fn maybe_renormalize(&mut self) {
        let pbar = self.pbar_prev;
        if (1.0 / RENORM_THRESHOLD..=RENORM_THRESHOLD).contains(&pbar) {
            return;
        }
        let inv = 1.0 / pbar;
        for f in &mut self.firms {
            f.price *= inv;
            f.wage *= inv;
            f.cash *= inv;
            f.profit *= inv;
        }
        self.households.savings *= inv;
        self.households.total_wages *= inv;
        self.households.consumption_budget *= inv;
        self.bank.default_costs *= inv;
        self.bank.total_loans *= inv;
        self.bank.total_firm_deposits *= inv;
        self.pbar_prev *= inv;
        self.wbar_prev *= inv;
        self.nominal_scale *= pbar;
    }

    /// Marks firms whose debt reached `theta` times their payroll as
    /// inactive, writing off their debt into the returned default costs, and
    /// aggregates the surviving firms' deposits and loans. With
    /// `theta = inf` no firm ever defaults.
    ///
    /// Returns `(default_costs, loans, deposits, bankruptcies)`.
    pub fn resolve_bankruptcies(&mut self, theta: f64) -> (f64, f64, f64, u32) {
        let mut default_costs = 0.0;
        let mut loans = 0.0;
        let mut deposits = 0.0;
        let mut count = 0u32;
        for f in self.firms.iter_mut().filter(|f| f.active) {
            if theta.is_finite() && f.cash <= -theta * f.wage * f.production {
                f.active = false;
                default_costs -= f.cash;
                // The written-off loan leaves the books and the workforce is
                // laid off; the loss is recouped within the step through the
                // interest rates.
                f.cash = 0.0;
                f.production = 0.0;
                f.demand = 0.0;
                count += 1;
            } else {
                deposits += f.cash.max(0.0);
                loans -= f.cash.min(0.0);
            }
        }
        (default_costs, loans, deposits, count)
    }

    /// Executes one full time step and returns its observable row.
    pub fn step(&mut self, params: &ModelParams, policy: &PolicyParams) -> Result<StepRow, StepError> {
        let n = params.n_firms;
        let step_index = self.t + 1;
        let fail = |kind| StepError { step: step_index, kind };

        // (1) Start-of-step aggregates.
        let (epsilon, pbar, wbar) = market::aggregates(&self.firms, n, self.pbar_prev, self.wbar_prev);
        let unemployment = 1.0 - epsilon;
        let pi = market::inflation(pbar, self.pbar_prev);
        let mut labor = core::mem::take(&mut self.labor_available);
        market::allocate_workforce(&self.firms, params.beta, unemployment, wbar, n, &mut labor);

        // (2) Smoothed macro variables (deposit/loan rates are last step's).
        self.smoothed.update(
            policy.ema_weight,
            pi,
            self.bank.deposit_rate,
            self.bank.loan_rate,
            unemployment,
        );

        // (3) Central-bank policy.
        let rho0 = taylor_rate(self.smoothed.inflation, self.smoothed.employment(), policy);
        let gamma = gamma_sensitivity(
            self.smoothed.loan_rate,
            self.smoothed.inflation,
            params.alpha_gamma,
            params.gamma0,
        );
        self.gamma = gamma;

        // (4) Bankruptcies, then firm updates. The wage cap prices interest
        // at the previous step's rates (this step's are not set yet), and
        // every rule sees the start-of-step production-demand gap.
        let (default_costs, loans, deposits, bankruptcies) = self.resolve_bankruptcies(params.theta);
        let (rho_deposit_prev, rho_loan_prev) = (self.bank.deposit_rate, self.bank.loan_rate);
        for (i, f) in self.firms.iter_mut().enumerate() {
            if !f.active {
                continue;
            }
            let y = f.production;
            let d = f.demand;
            let phi = firm::fragility(f.cash, f.wage, y, gamma);
            let (eta_plus, eta_minus) =
                firm::reaction_rates(phi, gamma, params.eta0_minus, params.hire_fire_ratio);
            if y < d {
                if f.profit > 0.0 {
                    f.wage = firm::update_wage(
                        f.wage,
                        y,
                        d,
                        f.profit,
                        f.cash,
                        f.price,
                        phi,
                        gamma,
                        unemployment,
                        params.gamma_w,
                        rho_deposit_prev,
                        rho_loan_prev,
                        self.rng.next_f64(),
                    );
                }
                f.production = firm::update_production(y, d, eta_plus, eta_minus, labor[i]);
                if f.price < pbar {
                    f.price = firm::update_price(f.price, y, d, pbar, params.gamma_p, self.rng.next_f64());
                }
            } else if y > d {
                if f.profit < 0.0 {
                    f.wage = firm::update_wage(
                        f.wage,
                        y,
                        d,
                        f.profit,
                        f.cash,
                        f.price,
                        phi,
                        gamma,
                        unemployment,
                        params.gamma_w,
                        rho_deposit_prev,
                        rho_loan_prev,
                        self.rng.next_f64(),
                    );
                }
                f.production = firm::update_production(y, d, eta_plus, eta_minus, labor[i]);
                if f.price > pbar {
                    f.price = firm::update_price(f.price, y, d, pbar, params.gamma_p, self.rng.next_f64());
                }
            }
        }
        self.labor_available = labor;

        // (5) Mid-step refresh: job losses and price moves now visible.
        let (epsilon_mid, pbar_mid, _) = market::aggregates(&self.firms, n, pbar, wbar);
        let u_mid = 1.0 - epsilon_mid;

        // (6) Bank rates under the no-profit rule.
        let deposits_total = self.households.savings + deposits;
        let (rho_loan, rho_deposit) =
            bank_rates(rho0, default_costs, loans, deposits_total, params.default_share)
                .map_err(|_| fail(StepErrorKind::DrainedDeposits))?;
        let residual = no_profit_residual(rho_loan, rho_deposit, loans, deposits_total, default_costs);
        if residual.abs() > BANK_IDENTITY_TOLERANCE * deposits_total.max(1.0) {
            return Err(fail(StepErrorKind::BankIdentity { residual }));
        }
        self.bank = BankState {
            base_rate: rho0,
            loan_rate: rho_loan,
            deposit_rate: rho_deposit,
            default_costs,
            total_loans: loans,
            total_firm_deposits: deposits,
        };

        // (7) Households: interest and wages in, then the consumption budget
        // is split into demand.
        let total_wages: f64 = self
            .firms
            .iter()
            .filter(|f| f.active)
            .map(|f| f.wage * f.production)
            .sum();
        let (propensity, budget) = consumption_budget(
            self.households.savings,
            total_wages,
            rho_deposit,
            self.smoothed.inflation,
            self.smoothed.deposit_rate,
            params.c0,
            params.alpha_c,
        );
        self.households.savings += rho_deposit * self.households.savings + total_wages;
        if self.households.savings < 0.0 {
            return Err(fail(StepErrorKind::NegativeSavings {
                savings: self.households.savings,
            }));
        }
        self.households.total_wages = total_wages;
        self.households.propensity = propensity;
        self.households.consumption_budget = budget;
        let mut weights = core::mem::take(&mut self.demand_weights);
        market::allocate_demand_with(&mut self.firms, budget, params.beta, pbar_mid, &mut weights);
        self.demand_weights = weights;

        // (8) Accounting and dividends.
        let mut deposits_after = 0.0;
        for f in self.firms.iter_mut().filter(|f| f.active) {
            let sales = f.price * f.production.min(f.demand);
            self.households.savings -= sales;
            let profit = firm::profit(
                f.price,
                f.production,
                f.demand,
                f.wage,
                f.cash,
                rho_deposit,
                rho_loan,
            );
            let dividend = firm::settle(f, profit, params.delta);
            self.households.savings += dividend;
            deposits_after += f.cash.max(0.0);
        }

        // (9) Revivals, funded by cash-positive firms.
        revive_firms(
            &mut self.firms,
            &mut self.rng,
            params.revival_prob,
            u_mid,
            pbar_mid,
            wbar,
            &mut deposits_after,
        );

        // Money conservation is the global accounting invariant; any breach
        // is a simulator bug, not a model state.
        let drift = self.money_drift();
        if drift.abs() > MONEY_TOLERANCE * n as f64 {
            return Err(fail(StepErrorKind::MoneyDrift { drift }));
        }

        self.pbar_prev = pbar;
        self.wbar_prev = wbar;
        self.t = step_index;

        let (mut eplus, mut eminus) = (0.0, 0.0);
        for f in &self.firms {
            eplus += f.cash.max(0.0);
            eminus -= f.cash.min(0.0);
        }
        // Rows report original money units regardless of internal rebasing.
        let scale = self.nominal_scale;
        let row = StepRow {
            t: step_index,
            u: unemployment,
            epsilon,
            pi,
            rho0,
            rho_loan,
            rho_deposit,
            pbar: pbar * scale,
            wbar: wbar * scale,
            savings: self.households.savings * scale,
            firm_deposits: eplus * scale,
            firm_loans: eminus * scale,
            default_costs: default_costs * scale,
            bankruptcies,
            gamma,
            propensity,
        };
        self.maybe_renormalize();
        Ok(row)
    }
}

/// Revives each inactive firm with probability `phi`, at the current average
/// price and wage, with a workforce drawn uniformly below the unemployment
/// rate and just enough cash for its wage bill. The injected cash is then
/// levied proportionally from all cash-positive active firms (the revived
/// ones included), so money is conserved exactly.
///
/// `deposits_after` enters as the total positive firm cash after accounting
/// and leaves updated with the revived balances.
#[allow(clippy::too_many_arguments)]
fn revive_firms<R: Uniform01>(
    firms: &mut [FirmState],
    rng: &mut R,
    phi: f64,
    unemployment: f64,
    pbar: f64,
    wbar: f64,
    deposits_after: &mut f64,
) {
    let mut injected = 0.0;
    for f in firms.iter_mut().filter(|f| !f.active) {
        if rng.next_f64() < phi {
            f.production = unemployment * rng.next_f64();
            f.active = true;
            f.price = pbar;
            f.wage = wbar;
            f.cash = f.wage * f.production;
            injected += f.cash;
            *deposits_after += f.cash.max(0.0);
        }
    }
    if injected > 0.0 && *deposits_after > 0.0 {
        let levy = injected / *deposits_after;
        for f in firms.iter_mut().filter(|f| f.active && f.cash > 0.0) {
            f.cash -= levy * f.cash;
        }
    }
}
