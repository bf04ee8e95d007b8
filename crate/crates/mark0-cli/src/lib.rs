//! Experiment harness and IO for the mark0 simulator: flat key=value
//! configuration files, deterministic single runs and parallel parameter
//! sweeps, the monetary-shock experiment, and plot-ready CSV / grid outputs.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod output;

pub use config::{Config, ConfigError};
pub use experiments::{
    ensemble, locate_critical_r, monetary_shock, run_epsilon_series, run_simulation, sweep,
    AxisSpec, CellStats, EnsembleOutcome, PhaseGrid, RcLocator, RunError, ShockResponse,
    ShockSpec, SweepError, SweepSpec,
};
