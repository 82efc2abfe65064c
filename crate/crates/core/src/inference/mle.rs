use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PreparedSample, PriorSpec, ThetaGrid};
use crate::copula::Family;
use crate::error::{Error, Result};
use crate::numeric::golden_section_max;
use crate::pseudo_obs::PseudoSample;

/// Width of the final golden-section bracket.
pub const MLE_TOL: f64 = 1e-6;
/// Distance from a truncation bound at which the maximum is flagged.
pub const BOUNDARY_TOL: f64 = 1e-4;
const MIN_MLE_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    pub theta: f64,
    pub log_lik: f64,
    pub at_boundary: bool,
}

/// Maximizes the log-likelihood over `[spec.theta_min, spec.theta_max]`:
/// the best node of `grid` seeds a golden-section search between its
/// neighbours.
pub fn mle(family: Family, data: &PseudoSample, spec: &PriorSpec, grid: &ThetaGrid) -> Result<MleResult> {
    let prepared = PreparedSample::new(data);
    let log_lik: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|&t| prepared.log_likelihood(family, t))
        .collect();
    mle_from_scan(family, &prepared, spec, grid, &log_lik)
}

/// As [`mle`], reusing a grid scan that has already been evaluated.
pub(crate) fn mle_from_scan(
    family: Family,
    prepared: &PreparedSample,
    spec: &PriorSpec,
    grid: &ThetaGrid,
    log_lik: &[f64],
) -> Result<MleResult> {
    if prepared.len() < MIN_MLE_N {
        return Err(Error::InsufficientData(format!(
            "maximum likelihood needs at least {MIN_MLE_N} pairs, got {}",
            prepared.len()
        )));
    }
    let (k, _) = log_lik
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Numeric("log-likelihood is NaN on the whole grid".into()))?;
    let nodes = grid.nodes();
    let lo = nodes[k.saturating_sub(1)].max(spec.theta_min);
    let hi = nodes[(k + 1).min(nodes.len() - 1)].min(spec.theta_max);
    let f = |t: f64| prepared.log_likelihood(family, t);
    let mut theta = if hi - lo > MLE_TOL {
        golden_section_max(f, lo, hi, MLE_TOL)
    } else {
        nodes[k]
    };
    let mut best = f(theta);
    // The bracket interior never reaches the bounds; keep a better endpoint.
    for t in [lo, hi] {
        let l = f(t);
        if l > best {
            theta = t;
            best = l;
        }
    }
    let at_boundary = theta - spec.theta_min < BOUNDARY_TOL || spec.theta_max - theta < BOUNDARY_TOL;
    Ok(MleResult {
        theta,
        log_lik: best,
        at_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copula::CopulaModel;
    use crate::sampling::{sample_dataset, RngSeed};

    fn fit(family: Family, theta: f64, n: usize, seed: u64) -> MleResult {
        let sample = sample_dataset(&CopulaModel::new(family, theta).unwrap(), n, RngSeed(seed)).unwrap();
        let data = PseudoSample::from_pairs(sample.pairs).unwrap();
        let spec = PriorSpec::for_family(family);
        let grid = ThetaGrid::for_family(family, spec.theta_min, spec.theta_max, 400).unwrap();
        mle(family, &data, &spec, &grid).unwrap()
    }

    #[test]
    fn recovers_clayton_parameter() {
        let r = fit(Family::Clayton, 3.0, 2000, 11);
        assert!((r.theta - 3.0).abs() < 0.35, "{}", r.theta);
        assert!(!r.at_boundary);
    }

    #[test]
    fn stationary_point() {
        let sample = sample_dataset(&CopulaModel::gumbel(2.0).unwrap(), 800, RngSeed(5)).unwrap();
        let data = PseudoSample::from_pairs(sample.pairs).unwrap();
        let spec = PriorSpec::for_family(Family::Gumbel);
        let grid = ThetaGrid::for_family(Family::Gumbel, spec.theta_min, spec.theta_max, 500).unwrap();
        let r = mle(Family::Gumbel, &data, &spec, &grid).unwrap();
        let prepared = PreparedSample::new(&data);
        for d in [-1e-3, 1e-3] {
            assert!(prepared.log_likelihood(Family::Gumbel, r.theta + d) <= r.log_lik);
        }
    }

    #[test]
    fn independence_hits_lower_bound() {
        let r = fit(Family::Gumbel, 1.0, 5000, 3);
        assert!(r.theta < 1.05);
        let r = fit(Family::Gumbel, 1.0, 5000, 4);
        assert!(r.theta < 1.05);
    }

    #[test]
    fn needs_ten_pairs() {
        let sample = sample_dataset(&CopulaModel::gumbel(2.0).unwrap(), 9, RngSeed(1)).unwrap();
        let data = PseudoSample::from_pairs(sample.pairs).unwrap();
        let spec = PriorSpec::for_family(Family::Gumbel);
        let grid = ThetaGrid::for_family(Family::Gumbel, spec.theta_min, spec.theta_max, 200).unwrap();
        assert!(matches!(mle(Family::Gumbel, &data, &spec, &grid), Err(Error::InsufficientData(_))));
    }
}
