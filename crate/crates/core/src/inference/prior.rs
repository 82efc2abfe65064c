use super::{FisherTable, PriorSpec};
use crate::error::{Error, Result};
use crate::numeric::{interpolate_linear, trapezoid};

/// `sqrt(I(theta))` on `[theta_min, theta_max]`, normalized to unit mass.
///
/// Between table nodes `sqrt(I)` is interpolated linearly, so the
/// trapezoid integral over the nodes is the exact integral of the density.
#[derive(Debug, Clone)]
pub struct RestrictedJeffreysPrior {
    table: FisherTable,
    sqrt_info: Vec<f64>,
    normalizer: f64,
}

impl RestrictedJeffreysPrior {
    pub fn from_table(table: FisherTable) -> Result<Self> {
        if let Some((t, v)) = table
            .thetas()
            .iter()
            .zip(table.values())
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::Numeric(format!(
                "Fisher information estimate {v} at theta = {t} is not a finite non-negative number"
            )));
        }
        let sqrt_info: Vec<f64> = table.values().iter().map(|v| v.sqrt()).collect();
        let normalizer = trapezoid(table.thetas(), &sqrt_info);
        if !(normalizer > 0.0 && normalizer.is_finite()) {
            return Err(Error::Numeric(format!("prior normalizer {normalizer} is not positive")));
        }
        Ok(Self {
            table,
            sqrt_info,
            normalizer,
        })
    }

    pub fn table(&self) -> &FisherTable {
        &self.table
    }

    pub fn theta_min(&self) -> f64 {
        self.table.thetas()[0]
    }

    pub fn theta_max(&self) -> f64 {
        *self.table.thetas().last().expect("table is non-empty")
    }

    /// Prior density; zero outside the truncation interval.
    pub fn density(&self, theta: f64) -> f64 {
        if theta < self.theta_min() || theta > self.theta_max() {
            return 0.0;
        }
        interpolate_linear(self.table.thetas(), &self.sqrt_info, theta) / self.normalizer
    }

    pub fn ln_density(&self, theta: f64) -> f64 {
        self.density(theta).ln()
    }

    /// Interpolated `I(theta)` (square of the interpolated root).
    pub fn information(&self, theta: f64) -> f64 {
        let r = interpolate_linear(self.table.thetas(), &self.sqrt_info, theta);
        r * r
    }

    /// Trapezoid mass of the normalized density over the table nodes.
    pub fn total_mass(&self) -> f64 {
        let dens: Vec<f64> = self.sqrt_info.iter().map(|s| s / self.normalizer).collect();
        trapezoid(self.table.thetas(), &dens)
    }
}

/// Computes the Fisher table for `spec` and normalizes its root.
pub fn restricted_jeffreys_prior(spec: &PriorSpec) -> Result<RestrictedJeffreysPrior> {
    RestrictedJeffreysPrior::from_table(FisherTable::compute(spec)?)
}
