//! Clayton closed forms on log coordinates.

/// `ln(u^{-theta} + v^{-theta} - 1)` from `ln u`, `ln v`.
#[inline]
pub(super) fn ln_s(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    let a = -theta * ln_u;
    let b = -theta * ln_v;
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi < 30.0 {
        // expm1 keeps precision when theta is close to zero.
        (a.exp_m1() + b.exp_m1()).ln_1p()
    } else {
        hi + ((lo - hi).exp() - (-hi).exp()).ln_1p()
    }
}

#[inline]
pub(super) fn ln_cdf(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    -ln_s(theta, ln_u, ln_v) / theta
}

#[inline]
pub(super) fn ln_partial_v(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    -(1.0 / theta + 1.0) * ln_s(theta, ln_u, ln_v) - (theta + 1.0) * ln_v
}

/// `ln[(theta + 1) (uv)^{-theta-1} S^{-(2 + 1/theta)}]`.
#[inline]
pub(super) fn ln_density(theta: f64, ln_u: f64, ln_v: f64) -> f64 {
    theta.ln_1p() - (theta + 1.0) * (ln_u + ln_v) - (2.0 + 1.0 / theta) * ln_s(theta, ln_u, ln_v)
}
