//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use tailrisk::copula::{CopulaModel, Family, UnitPair};
use tailrisk::pseudo_obs::PseudoSample;
use tailrisk::sampling::{sample_dataset, RngSeed};

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = k as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre rule in logit coordinates covering
/// `(eps, 1 - eps)`: `panels * per_panel` nodes `u` with weights that
/// already include the Jacobian `u (1 - u)`.
pub fn logit_rule(eps: f64, panels: usize, per_panel: usize) -> Vec<(f64, f64)> {
    let (g, wg) = gauss_legendre(per_panel);
    let hi = ((1.0 - eps) / eps).ln();
    let width = 2.0 * hi / panels as f64;
    let mut out = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let mid = -hi + (p as f64 + 0.5) * width;
        for (z, w) in g.iter().zip(&wg) {
            let x = mid + 0.5 * width * z;
            let u = 1.0 / (1.0 + (-x).exp());
            out.push((u, 0.5 * width * w * u * (1.0 - u)));
        }
    }
    out
}

/// `ln c` for Clayton written from the closed-form density with a plain
/// log-sum-exp for `ln S`.
pub fn clayton_ln_density(theta: f64, u: f64, v: f64) -> f64 {
    let (a, b) = (-theta * u.ln(), -theta * v.ln());
    let m = a.max(b);
    let ln_s = m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln();
    theta.ln_1p() - (theta + 1.0) * (u.ln() + v.ln()) - (2.0 + 1.0 / theta) * ln_s
}

/// `ln c` for Gumbel from `-phi''(C) phi'(u) phi'(v) / phi'(C)^3` with the
/// generator derivatives written out.
pub fn gumbel_ln_density(theta: f64, u: f64, v: f64) -> f64 {
    let (x, y) = (-u.ln(), -v.ln());
    let w = (x.powf(theta) + y.powf(theta)).powf(1.0 / theta);
    let c = (-w).exp();
    // -phi'(t) = theta (-ln t)^{theta-1} / t
    let ln_ndphi = |t: f64, l: f64| theta.ln() + (theta - 1.0) * l.ln() - t.ln();
    // phi''(t) = theta (-ln t)^{theta-2} (theta - 1 - ln t) / t^2
    let ln_d2 = theta.ln() + (theta - 2.0) * w.ln() + (theta - 1.0 + w).ln() - 2.0 * c.ln();
    ln_d2 + ln_ndphi(u, x) + ln_ndphi(v, y) - 3.0 * ln_ndphi(c, w)
}

pub fn oracle_ln_density(family: Family, theta: f64, u: f64, v: f64) -> f64 {
    match family {
        Family::Clayton => clayton_ln_density(theta, u, v),
        Family::Gumbel => gumbel_ln_density(theta, u, v),
    }
}

/// `C(t, t)` directly from the generator definitions.
pub fn oracle_diagonal(family: Family, theta: f64, t: f64) -> f64 {
    match family {
        Family::Clayton => (2.0 * t.powf(-theta) - 1.0).powf(-1.0 / theta),
        Family::Gumbel => (-(2.0 * (-t.ln()).powf(theta)).powf(1.0 / theta)).exp(),
    }
}

/// Per-observation Fisher information by tensor-product quadrature of
/// `s^2 c` over `(eps, 1 - eps)^2` with `panels * per_panel` nodes per axis.
/// The score is a five-point derivative of the oracle log density.
pub fn fisher_quadrature(family: Family, theta: f64, eps: f64, panels: usize, per_panel: usize) -> f64 {
    let rule = logit_rule(eps, panels, per_panel);
    let h = 1e-3;
    let mut total = 0.0;
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            let f = |t: f64| oracle_ln_density(family, t, u, v);
            let s = (-f(theta + 2.0 * h) + 8.0 * f(theta + h) - 8.0 * f(theta - h) + f(theta - 2.0 * h)) / (12.0 * h);
            total += wu * wv * s * s * f(theta).exp();
        }
    }
    total
}

/// Quadrature of the library density over `(eps, 1 - eps)^2`.
pub fn density_mass(model: &CopulaModel, eps: f64, panels: usize, per_panel: usize) -> f64 {
    let rule = logit_rule(eps, panels, per_panel);
    let mut total = 0.0;
    for &(u, wu) in &rule {
        for &(v, wv) in &rule {
            total += wu * wv * model.density(UnitPair::new(u, v).unwrap());
        }
    }
    total
}

/// Richardson-extrapolated mixed second difference of the copula CDF.
pub fn mixed_difference(model: &CopulaModel, u: f64, v: f64, h: f64) -> f64 {
    let c = |a: f64, b: f64| model.cdf(UnitPair::new(a, b).unwrap());
    let d = |h: f64| (c(u + h, v + h) - c(u + h, v - h) - c(u - h, v + h) + c(u - h, v - h)) / (4.0 * h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// `n` pairs drawn directly from the copula.
pub fn simulated(family: Family, theta: f64, n: usize, seed: u64) -> PseudoSample {
    let sample = sample_dataset(&CopulaModel::new(family, theta).unwrap(), n, RngSeed(seed)).unwrap();
    PseudoSample::from_pairs(sample.pairs).unwrap()
}

pub fn fixture_csv() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/synthetic_glu_ghb.csv")
}

pub fn schema_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema").join(name)
}

/// Location of the prepared NHANES file, if the user supplied one.
pub fn nhanes_csv() -> Option<PathBuf> {
    let candidate = std::env::var_os("TAILRISK_NHANES_CSV")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/nhanes_glu_ghb.csv"));
    candidate.is_file().then_some(candidate)
}

/// Validates `instance` against the schema file `name`, returning the
/// error messages.
pub fn schema_errors(name: &str, instance: &serde_json::Value) -> Vec<String> {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    validator.iter_errors(instance).map(|e| e.to_string()).collect()
}
