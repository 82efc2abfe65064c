use crate::copula::{ln_density_from_logs, CopulaModel, Family};
use crate::pseudo_obs::PseudoSample;

/// Sample with `ln u` and `ln v` cached for repeated likelihood evaluation.
#[derive(Debug, Clone)]
pub struct PreparedSample {
    ln_u: Vec<f64>,
    ln_v: Vec<f64>,
}

impl PreparedSample {
    pub fn new(data: &PseudoSample) -> Self {
        let (ln_u, ln_v) = data.pairs().iter().map(|p| (p.u().ln(), p.v().ln())).unzip();
        Self { ln_u, ln_v }
    }

    pub fn len(&self) -> usize {
        self.ln_u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_u.is_empty()
    }

    /// Log-likelihood at `theta`, summed in sample order.
    pub fn log_likelihood(&self, family: Family, theta: f64) -> f64 {
        self.ln_u
            .iter()
            .zip(&self.ln_v)
            .map(|(&lu, &lv)| ln_density_from_logs(family, theta, lu, lv))
            .sum()
    }
}

/// `sum_i ln c(u_i, v_i)`.
pub fn log_likelihood(model: &CopulaModel, data: &PseudoSample) -> f64 {
    data.pairs().iter().map(|p| model.ln_density(*p)).sum()
}
