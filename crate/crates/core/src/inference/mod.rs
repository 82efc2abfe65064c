//! Likelihood, Monte-Carlo Fisher information, restricted Jeffreys prior,
//! grid posterior and the posterior summaries of the tail-risk functionals.

mod delta;
mod fisher;
mod grid;
mod likelihood;
mod mle;
mod posterior;
mod prior;
mod report;

use serde::{Deserialize, Serialize};

use crate::copula::Family;
use crate::error::{Error, Result};
use crate::sampling::RngSeed;

pub use delta::{delta_method_ci, z_multiplier};
pub use fisher::{
    fisher_information_mc, score_step, DifferenceScheme, FisherEstimate, FisherTable, FisherTableKey,
    MIN_FISHER_DRAWS,
};
pub use grid::{GridLayout, ThetaGrid, MIN_GRID_SIZE};
pub use likelihood::{log_likelihood, PreparedSample};
pub use mle::{mle, MleResult, BOUNDARY_TOL, MLE_TOL};
pub use posterior::{
    induced_risk_posterior, interpolated_quantile, posterior_grid, posterior_summary_theta,
    CredibleInterval, IntervalMethod, PosteriorGrid, PosteriorSummary,
};
pub use prior::{restricted_jeffreys_prior, RestrictedJeffreysPrior};
pub use report::{
    fit_tail_risk, fit_with_posterior, FitOptions, GridInfo, IndependenceSummary, MleDiagnostic, RiskEntry,
    TailRiskReport, MLE_FISHER_STREAM,
};

pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_GRID_SIZE: usize = 2000;
pub const DEFAULT_FISHER_DRAWS: usize = 20_000;
pub const DEFAULT_FISHER_NODES: usize = 60;
pub const DEFAULT_FD_BASE: f64 = 1e-4;
pub const DEFAULT_PRIOR_SEED: u64 = 20_240_917;
pub const CLAYTON_THETA_MIN: f64 = 1e-4;
pub const GUMBEL_THETA_MIN: f64 = 1.0 + 1e-6;
pub const THETA_MAX: f64 = 50.0;

/// Step rule for finite-difference scores: `h = max(base, base * theta)`
/// when `relative`, otherwise `h = base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdStep {
    pub base: f64,
    pub relative: bool,
}

impl FdStep {
    pub fn at(&self, theta: f64) -> f64 {
        if self.relative {
            self.base.max(self.base * theta)
        } else {
            self.base
        }
    }
}

impl Default for FdStep {
    fn default() -> Self {
        Self {
            base: DEFAULT_FD_BASE,
            relative: true,
        }
    }
}

/// Everything that determines the restricted Jeffreys prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub family: Family,
    pub theta_min: f64,
    pub theta_max: f64,
    pub fisher_draws: usize,
    pub fd_step: FdStep,
    pub fisher_nodes: usize,
    pub seed: RngSeed,
}

impl PriorSpec {
    /// Family defaults: Clayton on `[1e-4, 50]`, Gumbel on `[1 + 1e-6, 50]`,
    /// 60 Fisher nodes with 20 000 draws each.
    pub fn for_family(family: Family) -> Self {
        let theta_min = match family {
            Family::Clayton => CLAYTON_THETA_MIN,
            Family::Gumbel => GUMBEL_THETA_MIN,
        };
        Self {
            family,
            theta_min,
            theta_max: THETA_MAX,
            fisher_draws: DEFAULT_FISHER_DRAWS,
            fd_step: FdStep::default(),
            fisher_nodes: DEFAULT_FISHER_NODES,
            seed: RngSeed(DEFAULT_PRIOR_SEED),
        }
    }

    pub fn with_bounds(mut self, theta_min: f64, theta_max: f64) -> Self {
        self.theta_min = theta_min;
        self.theta_max = theta_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_min.is_finite() && self.theta_max.is_finite()) || self.theta_min >= self.theta_max {
            return Err(Error::InvalidArgument(format!(
                "truncation bounds must satisfy theta_min < theta_max (got [{}, {}])",
                self.theta_min, self.theta_max
            )));
        }
        if !self.family.admits(self.theta_min) {
            return Err(Error::InvalidTheta {
                family: self.family,
                theta: self.theta_min,
            });
        }
        if self.fisher_draws < MIN_FISHER_DRAWS {
            return Err(Error::InvalidArgument(format!(
                "M too small: {} Fisher draws (minimum {MIN_FISHER_DRAWS})",
                self.fisher_draws
            )));
        }
        if self.fisher_nodes < 2 {
            return Err(Error::InvalidArgument("Fisher table needs at least 2 nodes".into()));
        }
        if !(self.fd_step.base > 0.0 && self.fd_step.base.is_finite()) {
            return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
        }
        Ok(())
    }

    /// Default theta-grid layout for this family.
    pub fn layout(&self) -> GridLayout {
        GridLayout::for_family(self.family)
    }
}
