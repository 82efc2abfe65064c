//! Small numerical building blocks: bracketed root finding, golden-section
//! search, trapezoid cell widths and the standard normal quantile.

use statrs::distribution::{ContinuousCDF, Normal};

/// Outcome of [`brent_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootResult {
    Converged(f64),
    /// The iteration budget ran out; carries the last iterate.
    Exhausted(f64),
}

/// Brent's method on a bracket with `f(a)` and `f(b)` of opposite sign (or
/// zero). Terminates when the bracket is narrower than `tol`.
pub fn brent_root<F>(f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> RootResult
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return RootResult::Converged(a);
    }
    if fb == 0.0 {
        return RootResult::Converged(b);
    }
    debug_assert!(fa.signum() != fb.signum(), "root not bracketed");

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return RootResult::Converged(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when a == c
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    RootResult::Exhausted(b)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
/// Returns the abscissa once the bracket is narrower than `tol`.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Trapezoid weight carried by each node: half the span to its neighbours.
/// A single node gets weight one.
pub fn trapezoid_cells(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n)
            .map(|i| {
                let left = if i == 0 { nodes[0] } else { nodes[i - 1] };
                let right = if i + 1 == n { nodes[n - 1] } else { nodes[i + 1] };
                0.5 * (right - left)
            })
            .collect(),
    }
}

/// Trapezoid integral of tabulated `values` over `nodes`.
pub fn trapezoid(nodes: &[f64], values: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// `z` with `P(Z <= z) = p` for a standard normal `Z`.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Piecewise-linear interpolation, constant beyond the end nodes.
pub fn interpolate_linear(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    debug_assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    if n == 1 || x <= nodes[0] {
        return values[0];
    }
    if x >= nodes[n - 1] {
        return values[n - 1];
    }
    let hi = nodes.partition_point(|&t| t < x);
    let lo = hi - 1;
    let frac = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
    values[lo] + frac * (values[hi] - values[lo])
}

/// Shortest round-trip text for `x`, switching to exponent notation for
/// very small or very large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}
