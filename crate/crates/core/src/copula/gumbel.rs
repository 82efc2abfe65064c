//! Gumbel copula on log coordinates, `theta > 1`.
//!
//! With `x = -ln u`, `y = -ln v` and `w = (x^theta + y^theta)^{1/theta}`
//! we have `C = exp(-w)`.

/// `ln w`.
#[inline]
fn ln_w(theta: f64, x: f64, y: f64) -> f64 {
    let a = theta * x.ln();
    let b = theta * y.ln();
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    (hi + (lo - hi).exp().ln_1p()) / theta
}

#[inline]
pub(super) fn ln_cdf(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    -ln_w(theta, -ln_u, -ln_v).exp()
}

/// `ln[C / v * (y / w)^{theta - 1}]`.
#[inline]
pub(super) fn ln_partial_v(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    let (x, y) = (-ln_u, -ln_v);
    let lw = ln_w(theta, x, y);
    -lw.exp() + y + (theta - 1.0) * (y.ln() - lw)
}

/// Archimedean density assembled from `ln(-phi')` and `ln phi''` and
/// simplified in log space: the `ln theta` terms cancel, leaving
/// `x + y - w + (theta-1)(ln x + ln y) + (1 - 2 theta) ln w + ln(theta - 1 + w)`.
#[inline]
pub(super) fn ln_density(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    let (x, y) = (-ln_u, -ln_v);
    let lw = ln_w(theta, x, y);
    let w = lw.exp();
    x + y - w + (theta - 1.0) * (x.ln() + y.ln()) + (1.0 - 2.0 * theta) * lw + (theta - 1.0 + w).ln()
}
