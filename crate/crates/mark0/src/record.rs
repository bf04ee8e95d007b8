//! Per-step time series of macro observables for one run.

use alloc::vec::Vec;

use crate::economy::StepRow;

/// Column-oriented record of every macro observable, one entry per step.
///
/// Conventions: `u`, `epsilon`, `pi`, `pbar` and `wbar` are the
/// start-of-step observables (so `pi` is the inflation realized by the
/// previous step's price changes); rates, `gamma` and `propensity` are the
/// values set and used during the step; `savings`, `firm_deposits` and
/// `firm_loans` are the end-of-step balances, so money conservation
/// `savings + firm_deposits - firm_loans = n_firms` holds row by row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunRecord {
    pub t: Vec<u64>,
    pub u: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub pi: Vec<f64>,
    pub rho0: Vec<f64>,
    pub rho_loan: Vec<f64>,
    pub rho_deposit: Vec<f64>,
    pub pbar: Vec<f64>,
    pub wbar: Vec<f64>,
    pub savings: Vec<f64>,
    pub firm_deposits: Vec<f64>,
    pub firm_loans: Vec<f64>,
    pub default_costs: Vec<f64>,
    pub bankruptcies: Vec<u32>,
    pub gamma: Vec<f64>,
    pub propensity: Vec<f64>,
}

impl RunRecord {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            t: Vec::with_capacity(n),
            u: Vec::with_capacity(n),
            epsilon: Vec::with_capacity(n),
            pi: Vec::with_capacity(n),
            rho0: Vec::with_capacity(n),
            rho_loan: Vec::with_capacity(n),
            rho_deposit: Vec::with_capacity(n),
            pbar: Vec::with_capacity(n),
            wbar: Vec::with_capacity(n),
            savings: Vec::with_capacity(n),
            firm_deposits: Vec::with_capacity(n),
            firm_loans: Vec::with_capacity(n),
            default_costs: Vec::with_capacity(n),
            bankruptcies: Vec::with_capacity(n),
            gamma: Vec::with_capacity(n),
            propensity: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, row: &StepRow) {
        self.t.push(row.t);
        self.u.push(row.u);
        self.epsilon.push(row.epsilon);
        self.pi.push(row.pi);
        self.rho0.push(row.rho0);
        self.rho_loan.push(row.rho_loan);
        self.rho_deposit.push(row.rho_deposit);
        self.pbar.push(row.pbar);
        self.wbar.push(row.wbar);
        self.savings.push(row.savings);
        self.firm_deposits.push(row.firm_deposits);
        self.firm_loans.push(row.firm_loans);
        self.default_costs.push(row.default_costs);
        self.bankruptcies.push(row.bankruptcies);
        self.gamma.push(row.gamma);
        self.propensity.push(row.propensity);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}
