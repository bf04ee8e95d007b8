//! Core simulator for the Mark-0 macroeconomic agent-based model, extended
//! with a banking sector and central-bank monetary policy.
//!
//! The model is a closed economy of `N_F` heterogeneous firms and an
//! aggregate household sector. Each time step runs a fixed sequence:
//! bankruptcy resolution, firm price/production/wage updates, interest-rate
//! setting, demand allocation, accounting and dividends, and revival of
//! dead firms. Money is conserved exactly (up to float error) and every run
//! is a pure function of `(params, policy, seed)`.
//!
//! The crate is `no_std`-compatible (`--no-default-features --features libm`)
//! and performs no IO; see the companion CLI crate for configuration files,
//! CSV emission and the experiment harness.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("mark0 requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod bank;
pub mod economy;
pub mod firm;
pub mod household;
pub mod market;
mod math;
pub mod observables;
pub mod params;
pub mod policy;
pub mod record;
pub mod rng;
pub mod spectrum;

pub use economy::{EconomyState, StepError, StepErrorKind, StepRow};
pub use observables::{Phase, PhaseThresholds, RunSummary};
pub use params::{ModelParams, ParamError, PolicyParams};
pub use record::RunRecord;
pub use rng::{derive_seed, SplitMix64, Uniform01, Xoshiro256PlusPlus};
