//! Coverage study: repeated simulation from a known copula, posterior
//! fitting, and the frequency with which the credible intervals contain the
//! true tail risks.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{CopulaModel, Family, TailFunctional, TailSpec, DEFAULT_ALPHA};
use crate::error::{Error, Result};
use crate::inference::{
    fit_tail_risk, restricted_jeffreys_prior, FitOptions, PriorSpec, RestrictedJeffreysPrior, DEFAULT_GRID_SIZE,
    DEFAULT_LEVEL,
};
use crate::numeric::format_float;
use crate::pseudo_obs::{to_pseudo_observations, PseudoSample, RawPairs};
use crate::sampling::{sample_dataset_stream, RngSeed, RNG_ALGORITHM};

pub const DEFAULT_SIM_N: usize = 500;
pub const DEFAULT_REPLICATES: usize = 50;
pub const DEFAULT_SIM_SEED: u64 = 20_240_501;

/// Column order of [`SimReport::replicates_csv`].
pub const REPLICATE_CSV_COLUMNS: [&str; 16] = [
    "replicate",
    "theta_mean",
    "theta_lo",
    "theta_hi",
    "lower_mean",
    "lower_lo",
    "lower_hi",
    "lower_covered",
    "upper_mean",
    "upper_lo",
    "upper_hi",
    "upper_covered",
    "conditional_mean",
    "conditional_lo",
    "conditional_hi",
    "conditional_covered",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub family: Family,
    pub theta_true: f64,
    pub n: usize,
    pub replicates: usize,
    pub alpha: f64,
    pub level: f64,
    pub grid_size: usize,
    pub base_seed: RngSeed,
    pub prior: PriorSpec,
    /// Re-rank the simulated pairs into pseudo-observations before fitting
    /// instead of using them directly.
    pub apply_reranking: bool,
}

impl SimConfig {
    pub fn new(family: Family, theta_true: f64) -> Self {
        Self {
            family,
            theta_true,
            n: DEFAULT_SIM_N,
            replicates: DEFAULT_REPLICATES,
            alpha: DEFAULT_ALPHA,
            level: DEFAULT_LEVEL,
            grid_size: DEFAULT_GRID_SIZE,
            base_seed: RngSeed(DEFAULT_SIM_SEED),
            prior: PriorSpec::for_family(family),
            apply_reranking: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        CopulaModel::new(self.family, self.theta_true)?;
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be >= 1".into()));
        }
        if self.n < 10 {
            return Err(Error::InvalidArgument(format!("sample size {} is below 10", self.n)));
        }
        if self.prior.family != self.family {
            return Err(Error::InvalidArgument("prior family differs from the simulated family".into()));
        }
        TailSpec::new(self.alpha, TailFunctional::Lower)?;
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Domain {
                what: "level",
                value: self.level,
                domain: "open interval (0, 1)",
            });
        }
        self.prior.validate()
    }

    fn fit_options(&self) -> FitOptions {
        FitOptions {
            alpha: self.alpha,
            level: self.level,
            grid_size: self.grid_size,
            delta_intervals: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRisk {
    pub functional: TailFunctional,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub index: usize,
    pub theta_mean: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub risks: Vec<ReplicateRisk>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSummary {
    pub functional: TailFunctional,
    pub true_value: f64,
    pub average_posterior_mean: f64,
    /// Standard deviation of the posterior means across replicates.
    pub sd_posterior_mean: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub rng: String,
    pub average_theta_mean: f64,
    pub functionals: Vec<FunctionalSummary>,
    pub replicates: Vec<ReplicateRecord>,
    #[serde(skip)]
    pub wall_clock_seconds: f64,
}

impl SimReport {
    pub fn summary(&self, functional: TailFunctional) -> &FunctionalSummary {
        self.functionals
            .iter()
            .find(|s| s.functional == functional)
            .expect("every functional is summarized")
    }

    /// Per-replicate records in [`REPLICATE_CSV_COLUMNS`] order.
    pub fn replicates_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPLICATE_CSV_COLUMNS).expect("in-memory write");
        for r in &self.replicates {
            let mut row = vec![
                r.index.to_string(),
                format_float(r.theta_mean),
                format_float(r.theta_lo),
                format_float(r.theta_hi),
            ];
            for k in &r.risks {
                row.extend([
                    format_float(k.mean),
                    format_float(k.lo),
                    format_float(k.hi),
                    u8::from(k.covered).to_string(),
                ]);
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

/// Simulates replicate `index` on substream `index` of the base seed and
/// fits it.
pub fn run_replicate(cfg: &SimConfig, prior: &RestrictedJeffreysPrior, index: usize) -> Result<ReplicateRecord> {
    let attach = |e: Error| Error::Replicate {
        index,
        source: Box::new(e),
    };
    if cfg.replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be >= 1".into()));
    }
    let model = CopulaModel::new(cfg.family, cfg.theta_true)?;
    let sample = sample_dataset_stream(&model, cfg.n, cfg.base_seed, index as u64).map_err(attach)?;
    let data = if cfg.apply_reranking {
        let (x, y): (Vec<f64>, Vec<f64>) = sample.pairs.iter().map(|p| (p.u(), p.v())).unzip();
        to_pseudo_observations(&RawPairs::new(x, y).map_err(attach)?)
    } else {
        PseudoSample::from_pairs(sample.pairs).map_err(attach)?
    };
    let report = fit_tail_risk(cfg.family, &data, prior, &cfg.fit_options()).map_err(attach)?;
    let risks = report
        .risks
        .iter()
        .map(|r| {
            let truth = model.tail_risk(&TailSpec::new(cfg.alpha, r.functional).expect("alpha validated"));
            ReplicateRisk {
                functional: r.functional,
                mean: r.mean,
                lo: r.ci.lo,
                hi: r.ci.hi,
                covered: r.ci.contains(truth),
            }
        })
        .collect();
    Ok(ReplicateRecord {
        index,
        theta_mean: report.theta.mean,
        theta_lo: report.theta.ci.lo,
        theta_hi: report.theta.ci.hi,
        risks,
    })
}

/// Runs every replicate; the first failure aborts the study.
pub fn coverage_study(cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let prior = restricted_jeffreys_prior(&cfg.prior)?;
    coverage_study_with_prior(cfg, &prior)
}

/// As [`coverage_study`] with a prebuilt prior.
pub fn coverage_study_with_prior(cfg: &SimConfig, prior: &RestrictedJeffreysPrior) -> Result<SimReport> {
    cfg.validate()?;
    if prior.table().key().prior_spec() != cfg.prior {
        return Err(Error::InvalidArgument("prior table does not match the configured prior".into()));
    }
    let start = Instant::now();
    let replicates: Vec<ReplicateRecord> = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| run_replicate(cfg, prior, i))
        .collect::<Result<_>>()?;
    let model = CopulaModel::new(cfg.family, cfg.theta_true)?;
    let count = replicates.len() as f64;
    let functionals = TailFunctional::ALL
        .iter()
        .enumerate()
        .map(|(k, &functional)| {
            let means: Vec<f64> = replicates.iter().map(|r| r.risks[k].mean).collect();
            let avg = means.iter().sum::<f64>() / count;
            let sd = if replicates.len() > 1 {
                (means.iter().map(|m| (m - avg) * (m - avg)).sum::<f64>() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            let covered = replicates.iter().filter(|r| r.risks[k].covered).count();
            FunctionalSummary {
                functional,
                true_value: model.tail_risk(&TailSpec::new(cfg.alpha, functional).expect("alpha validated")),
                average_posterior_mean: avg,
                sd_posterior_mean: sd,
                coverage: covered as f64 / count,
            }
        })
        .collect();
    let average_theta_mean = replicates.iter().map(|r| r.theta_mean).sum::<f64>() / count;
    Ok(SimReport {
        config: *cfg,
        rng: RNG_ALGORITHM.to_string(),
        average_theta_mean,
        functionals,
        replicates,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
