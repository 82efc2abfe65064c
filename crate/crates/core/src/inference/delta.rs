use super::{CredibleInterval, IntervalMethod};
use crate::copula::{CopulaModel, Family, TailSpec};
use crate::error::{Error, Result};
use crate::numeric::normal_quantile;

const MIN_DELTA_N: usize = 30;

/// Two-sided standard normal multiplier for `level`.
pub fn z_multiplier(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain {
            what: "level",
            value: level,
            domain: "open interval (0, 1)",
        });
    }
    Ok(normal_quantile(0.5 + 0.5 * level))
}

/// Asymptotic interval `R(theta_hat) +- z |R'(theta_hat)| / sqrt(n I(theta_hat))`,
/// clipped to `[0, 1]`.
pub fn delta_method_ci(
    family: Family,
    theta_hat: f64,
    n: usize,
    fisher: f64,
    spec: &TailSpec,
    level: f64,
) -> Result<CredibleInterval> {
    if !(fisher > 0.0 && fisher.is_finite()) {
        return Err(Error::Numeric(format!(
            "Fisher information {fisher} at theta = {theta_hat} must be positive"
        )));
    }
    if n < MIN_DELTA_N {
        return Err(Error::InsufficientData(format!(
            "delta-method interval needs n >= {MIN_DELTA_N}, got {n}"
        )));
    }
    let z = z_multiplier(level)?;
    let model = CopulaModel::new(family, theta_hat)?;
    let r = model.tail_risk(spec);
    let half = z * model.tail_risk_derivative(spec).abs() / (n as f64 * fisher).sqrt();
    Ok(CredibleInterval {
        level,
        lo: (r - half).max(0.0),
        hi: (r + half).min(1.0),
        method: IntervalMethod::DeltaMethod,
    })
}
