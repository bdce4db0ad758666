//! Quasi-Monte Carlo toolkit: low-discrepancy sequences and their scrambled
//! variants, uniformity diagnostics, Gaussian path construction, option
//! pricing estimators and a convergence benchmark harness.

pub mod bench;
pub mod lds;
pub mod mix;
pub mod pricing;
pub mod rng;
pub mod stochastic;
pub mod uniformity;
