//! Clayton and Gumbel copulas: generators, distribution functions, densities
//! and the joint tail-risk functionals built on them.
//!
//! Every density evaluation goes through log space. The Clayton family uses
//! its closed form; the Gumbel family assembles the Archimedean density from
//! the generator derivatives. [`generator`] exposes the generic Archimedean
//! route so that a new generator only needs `phi`, its inverse and two
//! derivatives.

mod clayton;
pub mod generator;
mod gumbel;
mod tail;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generator::{ClaytonGenerator, Generator, GumbelGenerator};
pub use tail::{TailFunctional, TailSpec, DEFAULT_ALPHA};
pub(crate) use tail::tail_risk_unchecked;

/// Smallest and largest coordinate accepted when clamping external data.
pub const CLAMP_EPS: f64 = 1e-12;

/// One-parameter Archimedean family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Clayton,
    Gumbel,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::Clayton, Family::Gumbel];

    /// Whether `theta` lies in the family's parameter space
    /// (Clayton: `theta > 0`, Gumbel: `theta >= 1`).
    pub fn admits(self, theta: f64) -> bool {
        theta.is_finite()
            && match self {
                Family::Clayton => theta > 0.0,
                Family::Gumbel => theta >= 1.0,
            }
    }

    /// Infimum of the parameter space.
    pub fn lower_limit(self) -> f64 {
        match self {
            Family::Clayton => 0.0,
            Family::Gumbel => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Clayton => "clayton",
            Family::Gumbel => "gumbel",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clayton" => Ok(Family::Clayton),
            "gumbel" => Ok(Family::Gumbel),
            other => Err(Error::InvalidArgument(format!(
                "unknown copula family '{other}' (expected clayton or gumbel)"
            ))),
        }
    }
}

/// A point strictly inside the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPair {
    u: f64,
    v: f64,
}

impl UnitPair {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        check_interior("u", u)?;
        check_interior("v", v)?;
        Ok(Self { u, v })
    }

    /// Clamps both coordinates to `[CLAMP_EPS, 1 - CLAMP_EPS]`. The flag is
    /// true when either coordinate had to move. Non-finite input is rejected.
    pub fn clamped(u: f64, v: f64) -> Result<(Self, bool)> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::Domain {
                what: "coordinate",
                value: if u.is_finite() { v } else { u },
                domain: "finite reals",
            });
        }
        let cu = u.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
        let cv = v.clamp(CLAMP_EPS, 1.0 - CLAMP_EPS);
        Ok((Self { u: cu, v: cv }, cu != u || cv != v))
    }

    #[inline]
    pub fn u(&self) -> f64 {
        self.u
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }

    /// The pair with coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            u: self.v,
            v: self.u,
        }
    }
}

fn check_interior(what: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: x,
            domain: "open interval (0, 1)",
        })
    }
}

/// A family together with a valid dependence parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CopulaModel {
    family: Family,
    theta: f64,
}

impl CopulaModel {
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        if family.admits(theta) {
            Ok(Self { family, theta })
        } else {
            Err(Error::InvalidTheta { family, theta })
        }
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        Self::new(Family::Clayton, theta)
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        Self::new(Family::Gumbel, theta)
    }

    #[inline]
    pub fn family(&self) -> Family {
        self.family
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Same family, different parameter.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.family, theta)
    }

    fn is_independence(&self) -> bool {
        self.family == Family::Gumbel && self.theta == 1.0
    }

    /// Generator `phi(t)` for `t` in `(0, 1]`.
    pub fn phi(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain {
                what: "t",
                value: t,
                domain: "half-open interval (0, 1]",
            });
        }
        Ok(match self.family {
            Family::Clayton => ClaytonGenerator::new(self.theta).phi(t),
            Family::Gumbel => GumbelGenerator::new(self.theta).phi(t),
        })
    }

    fn check_derivative_arg(&self, t: f64) -> Result<()> {
        let singular_at_one = self.family == Family::Gumbel && self.theta > 1.0;
        let ok = t > 0.0 && (t < 1.0 || (t == 1.0 && !singular_at_one));
        if ok {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "t",
                value: t,
                domain: "open interval (0, 1)",
            })
        }
    }

    /// First derivative of the generator; negative on `(0, 1)`.
    pub fn dphi(&self, t: f64) -> Result<f64> {
        self.check_derivative_arg(t)?;
        Ok(match self.family {
            Family::Clayton => ClaytonGenerator::new(self.theta).dphi(t),
            Family::Gumbel => GumbelGenerator::new(self.theta).dphi(t),
        })
    }

    /// Second derivative of the generator; positive on `(0, 1)`.
    pub fn d2phi(&self, t: f64) -> Result<f64> {
        self.check_derivative_arg(t)?;
        Ok(match self.family {
            Family::Clayton => ClaytonGenerator::new(self.theta).d2phi(t),
            Family::Gumbel => GumbelGenerator::new(self.theta).d2phi(t),
        })
    }

    /// Copula distribution function `C(u, v)`.
    pub fn cdf(&self, p: UnitPair) -> f64 {
        let (lu, lv) = (p.u.ln(), p.v.ln());
        match self.family {
            Family::Clayton => clayton::ln_cdf(self.theta, lu, lv).exp(),
            Family::Gumbel if self.is_independence() => p.u * p.v,
            Family::Gumbel => gumbel::ln_cdf(self.theta, lu, lv).exp(),
        }
    }

    /// `dC/dv`: the conditional distribution function of `U` given `V = v`,
    /// evaluated at `u`.
    pub fn partial_v(&self, p: UnitPair) -> f64 {
        let (lu, lv) = (p.u.ln(), p.v.ln());
        let value = match self.family {
            Family::Clayton => clayton::ln_partial_v(self.theta, lu, lv).exp(),
            Family::Gumbel if self.is_independence() => p.u,
            Family::Gumbel => gumbel::ln_partial_v(self.theta, lu, lv).exp(),
        };
        value.min(1.0)
    }

    /// `dC/du`, i.e. the conditional distribution function of `V` given
    /// `U = u` evaluated at `v`. Both families are exchangeable.
    pub fn partial_u(&self, p: UnitPair) -> f64 {
        self.partial_v(p.swapped())
    }

    /// Copula density, exponentiated from [`CopulaModel::ln_density`].
    pub fn density(&self, p: UnitPair) -> f64 {
        self.ln_density(p).exp()
    }

    /// Log copula density, evaluated without forming the overflow-prone
    /// linear-scale factors.
    pub fn ln_density(&self, p: UnitPair) -> f64 {
        ln_density_from_logs(self.family, self.theta, p.u.ln(), p.v.ln())
    }
}

/// Log density from pre-computed `ln u` and `ln v`. The likelihood loops use
/// this to avoid recomputing the logarithms at every grid node.
#[inline]
pub(crate) fn ln_density_from_logs(family: Family, theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    match family {
        Family::Clayton => clayton::ln_density(theta, ln_u, ln_v),
        Family::Gumbel if theta == 1.0 => 0.0,
        Family::Gumbel => gumbel::ln_density(theta, ln_u, ln_v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(u: f64, v: f64) -> UnitPair {
        UnitPair::new(u, v).unwrap()
    }

    #[test]
    fn family_ranges() {
        assert!(CopulaModel::clayton(0.0).is_err());
        assert!(CopulaModel::clayton(1e-9).is_ok());
        assert!(CopulaModel::gumbel(0.999).is_err());
        assert!(CopulaModel::gumbel(1.0).is_ok());
        assert!(CopulaModel::gumbel(f64::INFINITY).is_err());
        assert!(CopulaModel::clayton(f64::NAN).is_err());
    }

    #[test]
    fn unit_pair_rejects_boundary() {
        assert!(UnitPair::new(0.0, 0.5).is_err());
        assert!(UnitPair::new(0.5, 1.0).is_err());
        assert!(UnitPair::new(f64::NAN, 0.5).is_err());
        let (p, moved) = UnitPair::clamped(0.0, 1.0).unwrap();
        assert!(moved);
        assert_eq!(p.u(), CLAMP_EPS);
        assert_eq!(p.v(), 1.0 - CLAMP_EPS);
        let (_, moved) = UnitPair::clamped(0.3, 0.6).unwrap();
        assert!(!moved);
    }

    #[test]
    fn generator_values() {
        let c1 = CopulaModel::clayton(1.0).unwrap();
        assert_relative_eq!(c1.phi(0.5).unwrap(), 1.0, max_relative = 1e-15);
        let g1 = CopulaModel::gumbel(1.0).unwrap();
        assert_relative_eq!(g1.phi((-1.0f64).exp()).unwrap(), 1.0, max_relative = 1e-15);
        let c2 = CopulaModel::clayton(2.0).unwrap();
        assert_relative_eq!(c2.phi(0.05).unwrap(), 199.5, max_relative = 1e-13);
        assert_eq!(c2.phi(1.0).unwrap(), 0.0);
        assert!(c2.phi(0.0).is_err());
        assert!(c2.phi(1.5).is_err());
    }

    #[test]
    fn generator_derivative_values() {
        let e = std::f64::consts::E;
        let c2 = CopulaModel::clayton(2.0).unwrap();
        assert_relative_eq!(c2.dphi(0.5).unwrap(), -8.0, max_relative = 1e-14);
        assert_relative_eq!(c2.d2phi(0.5).unwrap(), 48.0, max_relative = 1e-14);
        let g2 = CopulaModel::gumbel(2.0).unwrap();
        assert_relative_eq!(g2.dphi(1.0 / e).unwrap(), -2.0 * e, max_relative = 1e-14);
        assert_relative_eq!(g2.d2phi(1.0 / e).unwrap(), 4.0 * e * e, max_relative = 1e-14);
        let g1 = CopulaModel::gumbel(1.0).unwrap();
        assert_relative_eq!(g1.dphi(0.25).unwrap(), -4.0, max_relative = 1e-14);
        // phi(t) = -ln t at theta = 1, so phi''(t) = 1 / t^2.
        assert_relative_eq!(g1.d2phi(0.5).unwrap(), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn generator_derivative_domain() {
        let g2 = CopulaModel::gumbel(2.0).unwrap();
        assert!(g2.dphi(1.0).is_err());
        assert!(g2.dphi(0.0).is_err());
        assert!(g2.d2phi(1.0).is_err());
        let c2 = CopulaModel::clayton(2.0).unwrap();
        assert!(c2.dphi(0.0).is_err());
        assert!(c2.d2phi(-0.1).is_err());
    }

    #[test]
    fn cdf_values() {
        let g1 = CopulaModel::gumbel(1.0).unwrap();
        assert_relative_eq!(g1.cdf(pair(0.3, 0.4)), 0.12, max_relative = 1e-15);
        let c2 = CopulaModel::clayton(2.0).unwrap();
        assert!((c2.cdf(pair(0.05, 0.05)) - 0.035377).abs() < 5e-7);
        let g2 = CopulaModel::gumbel(2.0).unwrap();
        assert!((g2.cdf(pair(0.05, 0.05)) - 0.014457).abs() < 5e-7);
    }

    #[test]
    fn partial_values() {
        let g1 = CopulaModel::gumbel(1.0).unwrap();
        assert_relative_eq!(g1.partial_v(pair(0.3, 0.7)), 0.3, max_relative = 1e-15);
        let c2 = CopulaModel::clayton(2.0).unwrap();
        let expected = 8.0 * 7f64.powf(-1.5);
        assert_relative_eq!(c2.partial_v(pair(0.5, 0.5)), expected, max_relative = 1e-13);
        let c5 = CopulaModel::clayton(5.0).unwrap();
        assert_relative_eq!(c5.partial_v(pair(1.0 - 1e-12, 0.4)), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn partial_matches_cdf_difference() {
        let c2 = CopulaModel::clayton(2.0).unwrap();
        let h = 1e-6;
        let fd = (c2.cdf(pair(0.5, 0.5 + h)) - c2.cdf(pair(0.5, 0.5 - h))) / (2.0 * h);
        assert!((fd - c2.partial_v(pair(0.5, 0.5))).abs() < 1e-8);
    }

    #[test]
    fn density_values() {
        let g1 = CopulaModel::gumbel(1.0).unwrap();
        assert_eq!(g1.density(pair(0.2, 0.9)), 1.0);
        assert_eq!(g1.ln_density(pair(0.5, 0.5)), 0.0);
        let c2 = CopulaModel::clayton(2.0).unwrap();
        let expected = 192.0 / 7f64.powf(2.5);
        assert_relative_eq!(c2.density(pair(0.5, 0.5)), expected, max_relative = 1e-13);
        assert_relative_eq!(c2.ln_density(pair(0.5, 0.5)), expected.ln(), max_relative = 1e-13);
        assert!((c2.ln_density(pair(0.5, 0.5)) - 0.392720).abs() < 5e-6);
    }

    #[test]
    fn density_symmetric() {
        for model in [CopulaModel::clayton(3.3).unwrap(), CopulaModel::gumbel(2.7).unwrap()] {
            let a = model.ln_density(pair(0.13, 0.71));
            let b = model.ln_density(pair(0.71, 0.13));
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn log_density_no_overflow() {
        let c40 = CopulaModel::clayton(40.0).unwrap();
        let ld = c40.ln_density(pair(0.01, 0.01));
        assert!(ld.is_finite());
        // ln(41) + 41 * 2 ln 100 - (2 + 1/40) ln(2 * 100^40 - 1)
        let expected = 41f64.ln() + 82.0 * 100f64.ln() - 2.025 * (2f64.ln() + 40.0 * 100f64.ln());
        assert_relative_eq!(ld, expected, max_relative = 1e-12);
        let c50 = CopulaModel::clayton(50.0).unwrap();
        assert!(c50.ln_density(pair(1e-9, 0.5)).is_finite());
        let g50 = CopulaModel::gumbel(50.0).unwrap();
        assert!(g50.ln_density(pair(1e-9, 1.0 - 1e-9)).is_finite());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("Clayton".parse::<Family>().unwrap(), Family::Clayton);
        assert_eq!(" gumbel ".parse::<Family>().unwrap(), Family::Gumbel);
        assert!("frank".parse::<Family>().is_err());
    }
}
