//! Monte-Carlo Fisher information with finite-difference scores, and the
//! tabulated version that backs the Jeffreys prior.
//!
//! The table serializes to a plain text file:
//!
//! ```text
//! # tailrisk fisher table
//! format = tailrisk-fisher-table
//! version = 1
//! family = clayton
//! theta_min = 0.0001
//! theta_max = 50
//! nodes = 60
//! layout = log
//! draws = 20000
//! fd_base = 0.0001
//! fd_relative = true
//! seed = 20240917
//! rng = chacha20
//! # theta information std_error
//! 0.0001 1.0003 0.0109
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FdStep, GridLayout, PriorSpec};
use crate::copula::{ln_density_from_logs, CopulaModel, Family};
use crate::error::{Error, Result};
use crate::sampling::{sample_pair, RngSeed, RNG_ALGORITHM};

pub const MIN_FISHER_DRAWS: usize = 100;

const FORMAT_TAG: &str = "tailrisk-fisher-table";
const FORMAT_VERSION: u32 = 1;

/// Which stencil produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceScheme {
    Central,
    Forward,
    Backward,
}

/// Step and stencil for the score at `theta` under the truncation bounds.
pub fn score_step(theta: f64, step: &FdStep, theta_min: f64, theta_max: f64) -> (f64, DifferenceScheme) {
    let h = step.at(theta);
    let scheme = if theta - h < theta_min {
        DifferenceScheme::Forward
    } else if theta + h > theta_max {
        DifferenceScheme::Backward
    } else {
        DifferenceScheme::Central
    };
    (h, scheme)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherEstimate {
    pub theta: f64,
    /// Mean squared score.
    pub value: f64,
    /// Monte-Carlo standard error of `value`.
    pub std_error: f64,
    pub draws: usize,
    pub step: f64,
    pub scheme: DifferenceScheme,
}

/// Per-observation Fisher information at `theta`: the mean of squared
/// finite-difference scores over `spec.fisher_draws` pairs drawn from the
/// copula at `theta`.
pub fn fisher_information_mc<R: Rng + ?Sized>(
    family: Family,
    theta: f64,
    spec: &PriorSpec,
    rng: &mut R,
) -> Result<FisherEstimate> {
    let draws = spec.fisher_draws;
    if draws < MIN_FISHER_DRAWS {
        return Err(Error::InvalidArgument(format!(
            "M too small: {draws} Fisher draws (minimum {MIN_FISHER_DRAWS})"
        )));
    }
    if !(theta >= spec.theta_min && theta <= spec.theta_max) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "truncation interval [theta_min, theta_max]",
        });
    }
    let model = CopulaModel::new(family, theta)?;
    let (h, scheme) = score_step(theta, &spec.fd_step, spec.theta_min, spec.theta_max);
    let (lo, hi, width) = match scheme {
        DifferenceScheme::Central => (theta - h, theta + h, 2.0 * h),
        DifferenceScheme::Forward => (theta, theta + h, h),
        DifferenceScheme::Backward => (theta - h, theta, h),
    };

    // Welford accumulation of s^2 in draw order.
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..draws {
        let p = sample_pair(&model, rng)?;
        let (lu, lv) = (p.u().ln(), p.v().ln());
        let s = (ln_density_from_logs(family, hi, lu, lv) - ln_density_from_logs(family, lo, lu, lv)) / width;
        let s2 = s * s;
        if !s2.is_finite() {
            return Err(Error::Numeric(format!(
                "non-finite score at theta = {theta} (u = {}, v = {})",
                p.u(),
                p.v()
            )));
        }
        let delta = s2 - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (s2 - mean);
    }
    let var = m2 / (draws - 1) as f64;
    Ok(FisherEstimate {
        theta,
        value: mean,
        std_error: (var / draws as f64).sqrt(),
        draws,
        step: h,
        scheme,
    })
}

/// Fields that decide whether a cached table can be reused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherTableKey {
    pub family: Family,
    pub theta_min: f64,
    pub theta_max: f64,
    pub nodes: usize,
    pub layout: GridLayout,
    pub draws: usize,
    pub fd_step: FdStep,
    pub seed: RngSeed,
}

impl FisherTableKey {
    pub fn from_spec(spec: &PriorSpec) -> Self {
        Self {
            family: spec.family,
            theta_min: spec.theta_min,
            theta_max: spec.theta_max,
            nodes: spec.fisher_nodes,
            layout: spec.layout(),
            draws: spec.fisher_draws,
            fd_step: spec.fd_step,
            seed: spec.seed,
        }
    }

    /// The prior specification this key was derived from.
    pub fn prior_spec(&self) -> PriorSpec {
        PriorSpec {
            family: self.family,
            theta_min: self.theta_min,
            theta_max: self.theta_max,
            fisher_draws: self.draws,
            fd_step: self.fd_step,
            fisher_nodes: self.nodes,
            seed: self.seed,
        }
    }
}

/// `I(theta)` tabulated on a node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherTable {
    key: FisherTableKey,
    thetas: Vec<f64>,
    values: Vec<f64>,
    std_errors: Vec<f64>,
}

impl FisherTable {
    /// Estimates every node on its own substream of `spec.seed`, so the
    /// result does not depend on evaluation order.
    pub fn compute(spec: &PriorSpec) -> Result<Self> {
        spec.validate()?;
        let key = FisherTableKey::from_spec(spec);
        let thetas = key.layout.nodes(spec.theta_min, spec.theta_max, spec.fisher_nodes);
        let estimates: Vec<FisherEstimate> = thetas
            .par_iter()
            .enumerate()
            .map(|(i, &theta)| {
                let mut rng = spec.seed.stream(i as u64);
                fisher_information_mc(spec.family, theta, spec, &mut rng)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            key,
            thetas,
            values: estimates.iter().map(|e| e.value).collect(),
            std_errors: estimates.iter().map(|e| e.std_error).collect(),
        })
    }

    /// Table with caller-supplied information values (zero standard errors).
    pub fn from_values(key: FisherTableKey, thetas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if thetas.len() != values.len() || thetas.len() < 2 {
            return Err(Error::InvalidArgument(
                "Fisher table needs matching node/value lists of length >= 2".into(),
            ));
        }
        if thetas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("Fisher nodes must be strictly increasing".into()));
        }
        let std_errors = vec![0.0; thetas.len()];
        Ok(Self {
            key,
            thetas,
            values,
            std_errors,
        })
    }

    pub fn key(&self) -> &FisherTableKey {
        &self.key
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn std_errors(&self) -> &[f64] {
        &self.std_errors
    }

    pub fn family(&self) -> Family {
        self.key.family
    }

    pub fn to_text(&self) -> String {
        let k = &self.key;
        let mut out = String::new();
        out.push_str("# tailrisk fisher table\n");
        let _ = writeln!(out, "format = {FORMAT_TAG}");
        let _ = writeln!(out, "version = {FORMAT_VERSION}");
        let _ = writeln!(out, "family = {}", k.family);
        let _ = writeln!(out, "theta_min = {}", k.theta_min);
        let _ = writeln!(out, "theta_max = {}", k.theta_max);
        let _ = writeln!(out, "nodes = {}", k.nodes);
        let _ = writeln!(out, "layout = {}", k.layout.name());
        let _ = writeln!(out, "draws = {}", k.draws);
        let _ = writeln!(out, "fd_base = {}", k.fd_step.base);
        let _ = writeln!(out, "fd_relative = {}", k.fd_step.relative);
        let _ = writeln!(out, "seed = {}", k.seed.value());
        let _ = writeln!(out, "rng = {RNG_ALGORITHM}");
        out.push_str("# theta information std_error\n");
        for ((t, v), s) in self.thetas.iter().zip(&self.values).zip(&self.std_errors) {
            let _ = writeln!(out, "{t} {v} {s}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::TableFormat(msg);
        let mut header = std::collections::BTreeMap::new();
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((k, v)) = line.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 3 {
                return Err(bad(format!("line {}: expected 3 columns", lineno + 1)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| bad(format!("line {}: invalid number '{s}'", lineno + 1)))
            };
            rows.push((parse(cols[0])?, parse(cols[1])?, parse(cols[2])?));
        }
        let get = |k: &str| {
            header
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| bad(format!("missing header field '{k}'")))
        };
        if get("format")? != FORMAT_TAG {
            return Err(bad("not a Fisher table file".into()));
        }
        let version: u32 = get("version")?.parse().map_err(|_| bad("invalid version".into()))?;
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        if get("rng")? != RNG_ALGORITHM {
            return Err(bad(format!("unsupported rng '{}'", get("rng")?)));
        }
        let num = |k: &str| {
            get(k)?
                .parse::<f64>()
                .map_err(|_| bad(format!("invalid value for '{k}'")))
        };
        let int = |k: &str| {
            get(k)?
                .parse::<u64>()
                .map_err(|_| bad(format!("invalid value for '{k}'")))
        };
        let layout = match get("layout")? {
            "linear" => GridLayout::Linear,
            "log" => GridLayout::Log,
            other => return Err(bad(format!("unknown layout '{other}'"))),
        };
        let relative = match get("fd_relative")? {
            "true" => true,
            "false" => false,
            other => return Err(bad(format!("invalid fd_relative '{other}'"))),
        };
        let key = FisherTableKey {
            family: get("family")?.parse().map_err(|e: Error| bad(e.to_string()))?,
            theta_min: num("theta_min")?,
            theta_max: num("theta_max")?,
            nodes: int("nodes")? as usize,
            layout,
            draws: int("draws")? as usize,
            fd_step: FdStep {
                base: num("fd_base")?,
                relative,
            },
            seed: RngSeed(int("seed")?),
        };
        if rows.len() != key.nodes {
            return Err(bad(format!("expected {} rows, found {}", key.nodes, rows.len())));
        }
        let mut table = Self::from_values(
            key,
            rows.iter().map(|r| r.0).collect(),
            rows.iter().map(|r| r.1).collect(),
        )?;
        table.std_errors = rows.iter().map(|r| r.2).collect();
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_text())
    }

    /// Loads `path` if it exists and carries the same key as `spec`.
    /// `Ok(None)` means missing or stale; a file that exists but does not
    /// parse is an error.
    pub fn load_matching(path: &Path, spec: &PriorSpec) -> Result<Option<Self>> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(_) => return Ok(None),
        };
        let table = Self::from_text(&text)?;
        Ok((table.key == FisherTableKey::from_spec(spec)).then_some(table))
    }
}
