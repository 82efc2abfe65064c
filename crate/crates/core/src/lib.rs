//! Bayesian estimation of joint tail-risk functionals for paired continuous
//! measurements under one-parameter Archimedean copulas (Clayton, Gumbel).
//!
//! The pipeline runs raw pairs through [`pseudo_obs`] to rank-based
//! pseudo-observations, evaluates the copula likelihood on a parameter grid,
//! combines it with a restricted Jeffreys prior whose Fisher information is
//! estimated by Monte Carlo ([`inference`]), and reports posterior summaries
//! of the lower, upper and conditional joint tail probabilities.
//! [`sim`] runs coverage studies on data simulated by [`sampling`].

pub mod cli;
pub mod copula;
pub mod error;
pub mod inference;
pub mod numeric;
pub mod pseudo_obs;
pub mod sampling;
pub mod sim;

pub use copula::{CopulaModel, Family, TailFunctional, TailSpec, UnitPair};
pub use error::{Error, Result};
