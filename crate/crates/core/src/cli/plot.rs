use serde::Serialize;

use crate::copula::{CopulaModel, TailSpec};
use crate::inference::PosteriorGrid;
use crate::numeric::format_float;

const HISTOGRAM_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMethod {
    /// `pi(theta) / R'(theta)` at each node.
    ChangeOfVariables,
    /// Posterior masses binned by risk value.
    WeightedHistogram,
    /// Single-node grid; the density column holds the unit mass.
    PointMass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskDensity {
    pub method: DensityMethod,
    /// `(value, density)` sorted by value.
    #[serde(skip)]
    pub rows: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl RiskDensity {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["value", "density"]).expect("in-memory write");
        for (v, d) in &self.rows {
            w.write_record([format_float(*v), format_float(*d)]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

/// Posterior density of the tail functional `spec` implied by `post`.
pub fn risk_density(post: &PosteriorGrid, spec: &TailSpec) -> RiskDensity {
    let values = post.risk_values(spec);
    if values.len() == 1 {
        return RiskDensity {
            method: DensityMethod::PointMass,
            rows: vec![(values[0], 1.0)],
            warnings: vec!["degenerate single-node grid: emitting one point carrying the whole mass".into()],
        };
    }
    if values.windows(2).all(|w| w[1] >= w[0]) {
        let (lo, hi) = (post.grid().min(), post.grid().max());
        let mut rows = Vec::with_capacity(values.len());
        let mut flat = 0;
        for ((&theta, &r), &dens) in post.nodes().iter().zip(&values).zip(post.density()) {
            let slope = CopulaModel::new(post.family(), theta)
                .map(|m| m.tail_risk_derivative_within(spec, lo, hi))
                .unwrap_or(f64::NAN);
            if slope > 0.0 && slope.is_finite() {
                rows.push((r, dens / slope));
            } else {
                flat += 1;
            }
        }
        let mut warnings = Vec::new();
        if flat > 0 {
            warnings.push(format!("{flat} nodes with zero slope (saturated tail) omitted"));
        }
        return RiskDensity {
            method: DensityMethod::ChangeOfVariables,
            rows,
            warnings,
        };
    }
    weighted_histogram(&values, post.weights())
}

fn weighted_histogram(values: &[f64], weights: &[f64]) -> RiskDensity {
    let support = values.iter().zip(weights).filter(|(_, w)| **w > 0.0);
    let lo = support.clone().map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    let hi = support.map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let mut warnings = vec!["tail risk is not monotone over the grid; emitting a weighted histogram".to_string()];
    if hi <= lo {
        warnings.push("posterior mass sits on a single risk value".into());
        return RiskDensity {
            method: DensityMethod::PointMass,
            rows: vec![(lo, 1.0)],
            warnings,
        };
    }
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut mass = vec![0.0; HISTOGRAM_BINS];
    for (v, w) in values.iter().zip(weights) {
        if *w > 0.0 {
            let bin = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            mass[bin] += w;
        }
    }
    let rows = mass
        .iter()
        .enumerate()
        .map(|(i, m)| (lo + (i as f64 + 0.5) * width, m / width))
        .collect();
    RiskDensity {
        method: DensityMethod::WeightedHistogram,
        rows,
        warnings,
    }
}
