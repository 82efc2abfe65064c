//! Grid posterior for `theta` and the posterior it induces on each
//! tail-risk functional.
//!
//! Node weights are trapezoid masses: the normalized density at a node times
//! half the span to its neighbours, so they sum to one and every posterior
//! moment is a plain weighted sum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PreparedSample, RestrictedJeffreysPrior, ThetaGrid};
use crate::copula::tail_risk_unchecked;
use crate::copula::{Family, TailSpec};
use crate::error::{Error, Result};
use crate::numeric::{trapezoid, trapezoid_cells};
use crate::pseudo_obs::PseudoSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    GridQuantile,
    WeightedQuantile,
    DeltaMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CredibleInterval {
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    pub method: IntervalMethod,
}

impl CredibleInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub variance: f64,
    pub ci: CredibleInterval,
}

#[derive(Debug, Clone)]
pub struct PosteriorGrid {
    family: Family,
    grid: ThetaGrid,
    log_lik: Vec<f64>,
    log_prior: Vec<f64>,
    density: Vec<f64>,
    weights: Vec<f64>,
}

impl PosteriorGrid {
    /// Normalizes `exp(log_lik + log_prior)` on the grid. Subtracting the
    /// maximum first keeps the exponentials in range.
    pub fn from_log_parts(
        family: Family,
        grid: ThetaGrid,
        log_lik: Vec<f64>,
        log_prior: Vec<f64>,
    ) -> Result<Self> {
        let g = grid.len();
        if log_lik.len() != g || log_prior.len() != g {
            return Err(Error::InvalidArgument("log-likelihood/prior length differs from the grid".into()));
        }
        if let Some(bad) = log_lik.iter().chain(&log_prior).find(|x| x.is_nan() || **x == f64::INFINITY) {
            return Err(Error::Numeric(format!("invalid log posterior term {bad}")));
        }
        let log_post: Vec<f64> = log_lik.iter().zip(&log_prior).map(|(l, p)| l + p).collect();
        let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Numeric(
                "posterior vanishes on every grid node; check the grid against the truncation bounds".into(),
            ));
        }
        let raw: Vec<f64> = log_post.iter().map(|lp| (lp - max).exp()).collect();
        let z = if g == 1 { raw[0] } else { trapezoid(grid.nodes(), &raw) };
        if z.is_nan() || z <= 0.0 {
            return Err(Error::Numeric("all posterior weights underflow to zero".into()));
        }
        let density: Vec<f64> = raw.iter().map(|r| r / z).collect();
        let weights: Vec<f64> = density
            .iter()
            .zip(trapezoid_cells(grid.nodes()))
            .map(|(d, c)| d * c)
            .collect();
        Ok(Self {
            family,
            grid,
            log_lik,
            log_prior,
            density,
            weights,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn log_lik(&self) -> &[f64] {
        &self.log_lik
    }

    pub fn log_prior(&self) -> &[f64] {
        &self.log_prior
    }

    /// Posterior density at the nodes (trapezoid integral one).
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Trapezoid masses at the nodes (sum one).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted mean and centred variance of `values` at the nodes.
    pub fn moments(&self, values: &[f64]) -> (f64, f64) {
        let mean: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        let var: f64 = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (v - mean) * (v - mean))
            .sum();
        (mean, var.max(0.0))
    }

    /// `theta` at posterior probability `q` (see [`interpolated_quantile`]).
    pub fn theta_quantile(&self, q: f64) -> f64 {
        interpolated_quantile(self.grid.nodes(), &self.weights, q)
    }

    /// Tail risk at each node.
    pub fn risk_values(&self, spec: &TailSpec) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .map(|&t| tail_risk_unchecked(self.family, t, spec))
            .collect()
    }
}

/// Quantile of a discrete distribution with `masses` at ascending `values`.
///
/// Each positive-mass node sits at its mid-cumulative probability
/// `F(previous) + mass / 2`; levels between two such points are interpolated
/// linearly and levels outside them clamp to the extreme support nodes. A
/// single supporting node therefore returns that node for every level.
pub fn interpolated_quantile(values: &[f64], masses: &[f64], q: f64) -> f64 {
    let support: Vec<(f64, f64)> = values
        .iter()
        .zip(masses)
        .filter(|(_, m)| **m > 0.0)
        .map(|(v, m)| (*v, *m))
        .collect();
    assert!(!support.is_empty(), "quantile of an empty distribution");
    let total: f64 = support.iter().map(|s| s.1).sum();
    let target = q * total;
    let mut cumulative = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &(v, m) in &support {
        let mid = cumulative + 0.5 * m;
        if target <= mid {
            return match prev {
                None => v,
                Some((pv, pmid)) => pv + (target - pmid) / (mid - pmid) * (v - pv),
            };
        }
        prev = Some((v, mid));
        cumulative += m;
    }
    support[support.len() - 1].0
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "level",
            value: level,
            domain: "open interval (0, 1)",
        })
    }
}

/// Posterior on `grid` for `data` under `prior`.
pub fn posterior_grid(
    family: Family,
    data: &PseudoSample,
    prior: &RestrictedJeffreysPrior,
    grid: &ThetaGrid,
) -> Result<PosteriorGrid> {
    if prior.table().family() != family {
        return Err(Error::InvalidArgument(format!(
            "prior was built for {} but the posterior is for {family}",
            prior.table().family()
        )));
    }
    let prepared = PreparedSample::new(data);
    let log_lik: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| prepared.log_likelihood(family, t))
        .collect();
    let log_prior: Vec<f64> = grid.nodes().iter().map(|&t| prior.ln_density(t)).collect();
    PosteriorGrid::from_log_parts(family, grid.clone(), log_lik, log_prior)
}

/// Mean, variance and equal-tailed interval of `theta`.
pub fn posterior_summary_theta(post: &PosteriorGrid, level: f64) -> Result<PosteriorSummary> {
    check_level(level)?;
    let (mean, variance) = post.moments(post.nodes());
    let tail = 0.5 * (1.0 - level);
    Ok(PosteriorSummary {
        mean,
        variance,
        ci: CredibleInterval {
            level,
            lo: post.theta_quantile(tail),
            hi: post.theta_quantile(1.0 - tail),
            method: IntervalMethod::GridQuantile,
        },
    })
}

/// Posterior mean, variance and interval of a tail functional.
///
/// The interval maps the `theta` interval through `R_T` when `R_T` is
/// non-decreasing over the grid; otherwise it falls back to quantiles of
/// the node values under the posterior weights.
pub fn induced_risk_posterior(post: &PosteriorGrid, spec: &TailSpec, level: f64) -> Result<PosteriorSummary> {
    check_level(level)?;
    let values = post.risk_values(spec);
    let (mean, variance) = post.moments(&values);
    let tail = 0.5 * (1.0 - level);
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let ci = if monotone {
        let at = |q: f64| tail_risk_unchecked(post.family(), post.theta_quantile(q), spec);
        CredibleInterval {
            level,
            lo: at(tail),
            hi: at(1.0 - tail),
            method: IntervalMethod::GridQuantile,
        }
    } else {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let masses: Vec<f64> = order.iter().map(|&i| post.weights()[i]).collect();
        CredibleInterval {
            level,
            lo: interpolated_quantile(&sorted, &masses, tail),
            hi: interpolated_quantile(&sorted, &masses, 1.0 - tail),
            method: IntervalMethod::WeightedQuantile,
        }
    };
    Ok(PosteriorSummary { mean, variance, ci })
}
