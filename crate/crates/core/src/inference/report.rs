use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mle::mle_from_scan;
use super::{
    delta_method_ci, fisher_information_mc, induced_risk_posterior, posterior_summary_theta, CredibleInterval,
    FisherTableKey, GridLayout, PosteriorGrid, PosteriorSummary, PreparedSample, RestrictedJeffreysPrior, ThetaGrid,
    DEFAULT_GRID_SIZE, DEFAULT_LEVEL,
};
use crate::copula::{Family, TailFunctional, TailSpec, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::pseudo_obs::PseudoSample;

/// Substream of the prior seed reserved for the Fisher estimate at the MLE.
pub const MLE_FISHER_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub alpha: f64,
    pub level: f64,
    pub grid_size: usize,
    /// Also compute delta-method intervals (costs one Fisher estimate).
    pub delta_intervals: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            level: DEFAULT_LEVEL,
            grid_size: DEFAULT_GRID_SIZE,
            delta_intervals: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEntry {
    pub functional: TailFunctional,
    pub mean: f64,
    pub variance: f64,
    pub sd: f64,
    pub ci: CredibleInterval,
    pub delta_ci: Option<CredibleInterval>,
    /// Value of the functional under independence.
    pub independence_value: f64,
    /// `mean / independence_value`.
    pub independence_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndependenceSummary {
    /// `alpha^2`, the joint tail probability under independence.
    pub baseline: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleDiagnostic {
    pub theta: f64,
    pub log_lik: f64,
    pub at_boundary: bool,
    pub fisher: Option<f64>,
    pub fisher_std_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub size: usize,
    pub layout: Option<GridLayout>,
    pub theta_min: f64,
    pub theta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRiskReport {
    pub family: Family,
    pub n: usize,
    pub alpha: f64,
    pub level: f64,
    pub theta: PosteriorSummary,
    pub risks: Vec<RiskEntry>,
    pub independence: IndependenceSummary,
    pub independence_ratio_upper: f64,
    pub mle: MleDiagnostic,
    pub grid: GridInfo,
    pub prior: FisherTableKey,
}

impl TailRiskReport {
    pub fn risk(&self, functional: TailFunctional) -> &RiskEntry {
        self.risks
            .iter()
            .find(|r| r.functional == functional)
            .expect("every functional is reported")
    }

    pub fn theta_mean(&self) -> f64 {
        self.theta.mean
    }

    pub fn theta_ci(&self) -> CredibleInterval {
        self.theta.ci
    }
}

/// Posterior summaries of `theta` and of all three tail functionals.
pub fn fit_tail_risk(
    family: Family,
    data: &PseudoSample,
    prior: &RestrictedJeffreysPrior,
    opts: &FitOptions,
) -> Result<TailRiskReport> {
    fit_with_posterior(family, data, prior, opts).map(|(report, _)| report)
}

/// As [`fit_tail_risk`], also returning the grid posterior.
pub fn fit_with_posterior(
    family: Family,
    data: &PseudoSample,
    prior: &RestrictedJeffreysPrior,
    opts: &FitOptions,
) -> Result<(TailRiskReport, PosteriorGrid)> {
    let key = *prior.table().key();
    if key.family != family {
        return Err(Error::InvalidArgument(format!(
            "prior was built for {} but the fit is for {family}",
            key.family
        )));
    }
    let spec = key.prior_spec();
    let grid = ThetaGrid::for_family(family, spec.theta_min, spec.theta_max, opts.grid_size)?;
    let prepared = PreparedSample::new(data);
    let log_lik: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| prepared.log_likelihood(family, t))
        .collect();
    let log_prior: Vec<f64> = grid.nodes().iter().map(|&t| prior.ln_density(t)).collect();
    let mle = mle_from_scan(family, &prepared, &spec, &grid, &log_lik)?;
    let post = PosteriorGrid::from_log_parts(family, grid.clone(), log_lik, log_prior)?;
    let theta = posterior_summary_theta(&post, opts.level)?;

    let fisher = if opts.delta_intervals && data.len() >= 30 {
        let mut rng = spec.seed.stream(MLE_FISHER_STREAM);
        Some(fisher_information_mc(family, mle.theta, &spec, &mut rng)?)
    } else {
        None
    };

    let mut risks = Vec::with_capacity(3);
    for functional in TailFunctional::ALL {
        let tail = TailSpec::new(opts.alpha, functional)?;
        let summary = induced_risk_posterior(&post, &tail, opts.level)?;
        let delta_ci = match fisher {
            Some(f) if f.value > 0.0 => {
                Some(delta_method_ci(family, mle.theta, data.len(), f.value, &tail, opts.level)?)
            }
            _ => None,
        };
        let independence_value = tail.independence_value();
        risks.push(RiskEntry {
            functional,
            mean: summary.mean,
            variance: summary.variance,
            sd: summary.variance.sqrt(),
            ci: summary.ci,
            delta_ci,
            independence_value,
            independence_ratio: summary.mean / independence_value,
        });
    }
    let baseline = opts.alpha * opts.alpha;
    let independence = IndependenceSummary {
        baseline,
        ratio_lower: risks[0].mean / baseline,
        ratio_upper: risks[1].mean / baseline,
    };

    let report = TailRiskReport {
        family,
        n: data.len(),
        alpha: opts.alpha,
        level: opts.level,
        theta,
        risks,
        independence,
        independence_ratio_upper: independence.ratio_upper,
        mle: MleDiagnostic {
            theta: mle.theta,
            log_lik: mle.log_lik,
            at_boundary: mle.at_boundary,
            fisher: fisher.map(|f| f.value),
            fisher_std_error: fisher.map(|f| f.std_error),
        },
        grid: GridInfo {
            size: grid.len(),
            layout: grid.layout(),
            theta_min: grid.min(),
            theta_max: grid.max(),
        },
        prior: key,
    };
    Ok((report, post))
}
