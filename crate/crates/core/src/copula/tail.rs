use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{clayton, CopulaModel, Family};
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Which joint tail probability is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailFunctional {
    /// `P(U <= alpha, V <= alpha) = C(alpha, alpha)`
    Lower,
    /// `P(U >= 1 - alpha, V >= 1 - alpha) = 2 alpha - 1 + C(1 - alpha, 1 - alpha)`
    Upper,
    /// `P(U <= alpha | V <= alpha) = C(alpha, alpha) / alpha`
    Conditional,
}

impl TailFunctional {
    pub const ALL: [TailFunctional; 3] = [
        TailFunctional::Lower,
        TailFunctional::Upper,
        TailFunctional::Conditional,
    ];

    /// Short label used in file names and tables (`L`, `U`, `C`).
    pub fn code(self) -> &'static str {
        match self {
            TailFunctional::Lower => "L",
            TailFunctional::Upper => "U",
            TailFunctional::Conditional => "C",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TailFunctional::Lower => "lower",
            TailFunctional::Upper => "upper",
            TailFunctional::Conditional => "conditional",
        }
    }
}

impl fmt::Display for TailFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TailFunctional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "lower" => Ok(TailFunctional::Lower),
            "u" | "upper" => Ok(TailFunctional::Upper),
            "c" | "conditional" => Ok(TailFunctional::Conditional),
            other => Err(Error::InvalidArgument(format!(
                "unknown tail functional '{other}'"
            ))),
        }
    }
}

/// Tail level and functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    alpha: f64,
    functional: TailFunctional,
}

impl TailSpec {
    pub fn new(alpha: f64, functional: TailFunctional) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self { alpha, functional })
        } else {
            Err(Error::Domain {
                what: "alpha",
                value: alpha,
                domain: "open interval (0, 1)",
            })
        }
    }

    pub fn lower(alpha: f64) -> Result<Self> {
        Self::new(alpha, TailFunctional::Lower)
    }

    pub fn upper(alpha: f64) -> Result<Self> {
        Self::new(alpha, TailFunctional::Upper)
    }

    pub fn conditional(alpha: f64) -> Result<Self> {
        Self::new(alpha, TailFunctional::Conditional)
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn functional(&self) -> TailFunctional {
        self.functional
    }

    /// The value every functional takes under independence
    /// (`alpha^2` for the joint tails, `alpha` for the conditional one).
    pub fn independence_value(&self) -> f64 {
        match self.functional {
            TailFunctional::Lower | TailFunctional::Upper => self.alpha * self.alpha,
            TailFunctional::Conditional => self.alpha,
        }
    }
}

impl Default for TailSpec {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            functional: TailFunctional::Lower,
        }
    }
}

/// `C(t, t)` on the diagonal for the closed forms.
fn diagonal(family: Family, theta: f64, t: f64) -> f64 {
    let lt = t.ln();
    match family {
        Family::Clayton => (-clayton::ln_s(theta, lt, lt) / theta).exp(),
        // C(t, t) = t^{2^{1/theta}}
        Family::Gumbel => (2f64.powf(1.0 / theta) * lt).exp(),
    }
}

/// Tail risk for a parameter already known to be admissible.
pub(crate) fn tail_risk_unchecked(family: Family, theta: f64, spec: &TailSpec) -> f64 {
    let a = spec.alpha;
    let value = match spec.functional {
        TailFunctional::Lower => diagonal(family, theta, a),
        TailFunctional::Upper => 2.0 * a - 1.0 + diagonal(family, theta, 1.0 - a),
        TailFunctional::Conditional => diagonal(family, theta, a) / a,
    };
    value.clamp(0.0, 1.0)
}

/// Relative step for the numerical derivative of a tail functional.
pub(crate) fn tail_step(theta: f64) -> f64 {
    (1e-5f64).max(1e-5 * theta)
}

impl CopulaModel {
    /// Closed-form tail risk at level `spec.alpha()`.
    pub fn tail_risk(&self, spec: &TailSpec) -> f64 {
        tail_risk_unchecked(self.family, self.theta, spec)
    }

    /// `dR/dtheta` by central difference with step `max(1e-5, 1e-5 theta)`,
    /// switching to a forward difference when `theta - h` leaves the
    /// parameter space.
    pub fn tail_risk_derivative(&self, spec: &TailSpec) -> f64 {
        self.tail_risk_derivative_within(spec, self.family.lower_limit(), f64::INFINITY)
    }

    /// As [`CopulaModel::tail_risk_derivative`], but one-sided within the
    /// step of either truncation bound `[lower, upper]`.
    pub fn tail_risk_derivative_within(&self, spec: &TailSpec, lower: f64, upper: f64) -> f64 {
        let theta = self.theta;
        let h = tail_step(theta);
        let lower = lower.max(self.family.lower_limit());
        let r = |t: f64| tail_risk_unchecked(self.family, t, spec);
        let below_ok = if self.family == Family::Clayton {
            theta - h > lower
        } else {
            theta - h >= lower
        };
        let above_ok = theta + h <= upper;
        match (below_ok, above_ok) {
            (true, true) => (r(theta + h) - r(theta - h)) / (2.0 * h),
            (false, _) => (r(theta + h) - r(theta)) / h,
            (true, false) => (r(theta) - r(theta - h)) / h,
        }
    }
}
