//! Archimedean generators and the family-agnostic assembly of the copula,
//! its `v`-partial and its density from `phi`, `phi^{-1}`, `phi'` and `phi''`.
//!
//! `C(u, v) = phi^{-1}(phi(u) + phi(v))`, `dC/dv = phi'(v) / phi'(C)` and
//! `c(u, v) = -phi''(C) phi'(u) phi'(v) / phi'(C)^3`.

/// A strictly decreasing convex generator with `phi(1) = 0`.
///
/// Arguments are assumed to be in the generator's domain; range checks live
/// in [`super::CopulaModel`].
pub trait Generator {
    fn phi(&self, t: f64) -> f64;

    fn phi_inverse(&self, s: f64) -> f64;

    fn dphi(&self, t: f64) -> f64;

    fn d2phi(&self, t: f64) -> f64;

    /// `ln(-phi'(t))`. Override when the linear-scale value can overflow.
    fn ln_neg_dphi(&self, t: f64) -> f64 {
        (-self.dphi(t)).ln()
    }

    /// `ln(phi''(t))`.
    fn ln_d2phi(&self, t: f64) -> f64 {
        self.d2phi(t).ln()
    }
}

pub fn archimedean_cdf<G: Generator>(g: &G, u: f64, v: f64) -> f64 {
    g.phi_inverse(g.phi(u) + g.phi(v))
}

pub fn archimedean_partial_v<G: Generator>(g: &G, u: f64, v: f64) -> f64 {
    let c = archimedean_cdf(g, u, v);
    (g.ln_neg_dphi(v) - g.ln_neg_dphi(c)).exp()
}

/// Log of the Archimedean density, with every factor taken in log space.
pub fn archimedean_ln_density<G: Generator>(g: &G, u: f64, v: f64) -> f64 {
    let c = archimedean_cdf(g, u, v);
    g.ln_d2phi(c) + g.ln_neg_dphi(u) + g.ln_neg_dphi(v) - 3.0 * g.ln_neg_dphi(c)
}

/// `phi(t) = (t^{-theta} - 1) / theta`, `theta > 0`.
#[derive(Debug, Clone, Copy)]
pub struct ClaytonGenerator {
    theta: f64,
}

impl ClaytonGenerator {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }
}

impl Generator for ClaytonGenerator {
    fn phi(&self, t: f64) -> f64 {
        (-self.theta * t.ln()).exp_m1() / self.theta
    }

    fn phi_inverse(&self, s: f64) -> f64 {
        (-(self.theta * s).ln_1p() / self.theta).exp()
    }

    fn dphi(&self, t: f64) -> f64 {
        -t.powf(-self.theta - 1.0)
    }

    fn d2phi(&self, t: f64) -> f64 {
        (self.theta + 1.0) * t.powf(-self.theta - 2.0)
    }

    fn ln_neg_dphi(&self, t: f64) -> f64 {
        -(self.theta + 1.0) * t.ln()
    }

    fn ln_d2phi(&self, t: f64) -> f64 {
        self.theta.ln_1p() - (self.theta + 2.0) * t.ln()
    }
}

/// `phi(t) = (-ln t)^theta`, `theta >= 1`.
#[derive(Debug, Clone, Copy)]
pub struct GumbelGenerator {
    theta: f64,
}

impl GumbelGenerator {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }
}

impl Generator for GumbelGenerator {
    fn phi(&self, t: f64) -> f64 {
        (-t.ln()).powf(self.theta)
    }

    fn phi_inverse(&self, s: f64) -> f64 {
        (-s.powf(1.0 / self.theta)).exp()
    }

    fn dphi(&self, t: f64) -> f64 {
        -self.theta * (-t.ln()).powf(self.theta - 1.0) / t
    }

    fn d2phi(&self, t: f64) -> f64 {
        let x = -t.ln();
        self.theta * x.powf(self.theta - 2.0) / (t * t) * ((self.theta - 1.0) + x)
    }

    fn ln_neg_dphi(&self, t: f64) -> f64 {
        let x = -t.ln();
        self.theta.ln() + (self.theta - 1.0) * x.ln() + x
    }

    fn ln_d2phi(&self, t: f64) -> f64 {
        let x = -t.ln();
        self.theta.ln() + (self.theta - 2.0) * x.ln() + 2.0 * x + ((self.theta - 1.0) + x).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_roundtrip() {
        let gens: [&dyn Fn(f64) -> (f64, f64); 2] = [
            &|t| {
                let g = ClaytonGenerator::new(2.5);
                (g.phi_inverse(g.phi(t)), t)
            },
            &|t| {
                let g = GumbelGenerator::new(3.0);
                (g.phi_inverse(g.phi(t)), t)
            },
        ];
        for f in gens {
            for t in [0.01, 0.2, 0.5, 0.93] {
                let (back, t) = f(t);
                assert_relative_eq!(back, t, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn log_overrides_match_linear() {
        let c = ClaytonGenerator::new(1.7);
        let g = GumbelGenerator::new(2.3);
        for t in [0.05, 0.4, 0.8] {
            assert_relative_eq!(c.ln_neg_dphi(t), (-c.dphi(t)).ln(), max_relative = 1e-12);
            assert_relative_eq!(c.ln_d2phi(t), c.d2phi(t).ln(), max_relative = 1e-12);
            assert_relative_eq!(g.ln_neg_dphi(t), (-g.dphi(t)).ln(), max_relative = 1e-12);
            assert_relative_eq!(g.ln_d2phi(t), g.d2phi(t).ln(), max_relative = 1e-12);
        }
    }

    #[test]
    fn generic_gumbel_matches_closed_cdf() {
        let g = GumbelGenerator::new(2.0);
        let (u, v) = (0.05f64, 0.05f64);
        let closed = (-((-u.ln()).powi(2) + (-v.ln()).powi(2)).sqrt()).exp();
        assert_relative_eq!(archimedean_cdf(&g, u, v), closed, max_relative = 1e-13);
    }
}
