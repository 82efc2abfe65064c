//! Rank-based pseudo-observations `(r_i / (n + 1), s_i / (n + 1))`.
//!
//! Ranks are ascending and computed per margin; ties share the average of
//! the ranks they span.

use std::cmp::Ordering;

use crate::copula::UnitPair;
use crate::error::{Error, Result};

/// Paired raw measurements of equal length, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPairs {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl RawPairs {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!(
                "margins differ in length ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 pairs, got {}",
                x.len()
            )));
        }
        if let Some(bad) = x.iter().chain(y.iter()).find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                what: "measurement",
                value: *bad,
                domain: "finite reals",
            });
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Pairs on the open unit square; the likelihood's input.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSample {
    pairs: Vec<UnitPair>,
}

impl PseudoSample {
    /// Wraps pairs that are already on the copula scale.
    pub fn from_pairs(pairs: Vec<UnitPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InsufficientData("empty sample".into()));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[UnitPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn u(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.u()).collect()
    }

    pub fn v(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.v()).collect()
    }
}

/// Average ranks (1-based) of `values`, ascending.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

pub fn to_pseudo_observations(raw: &RawPairs) -> PseudoSample {
    let scale = (raw.len() + 1) as f64;
    let ru = midranks(&raw.x);
    let rv = midranks(&raw.y);
    let pairs = ru
        .into_iter()
        .zip(rv)
        .map(|(r, s)| UnitPair::new(r / scale, s / scale).expect("ranks lie in [1, n]"))
        .collect();
    PseudoSample { pairs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_ranks() {
        let raw = RawPairs::new(vec![3.0, 1.0, 2.0], vec![10.0, 30.0, 20.0]).unwrap();
        let ps = to_pseudo_observations(&raw);
        assert_eq!(ps.u(), vec![0.75, 0.25, 0.5]);
        assert_eq!(ps.v(), vec![0.25, 0.75, 0.5]);
    }

    #[test]
    fn ties_take_average_rank() {
        let raw = RawPairs::new(vec![5.0, 5.0], vec![1.0, 2.0]).unwrap();
        let ps = to_pseudo_observations(&raw);
        assert_eq!(ps.u(), vec![0.5, 0.5]);
        assert_eq!(ps.v(), vec![1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(midranks(&[2.0, 1.0, 2.0, 2.0]), vec![3.0, 1.0, 3.0, 3.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RawPairs::new(vec![1.0], vec![2.0]).is_err());
        assert!(RawPairs::new(vec![1.0, 2.0], vec![2.0]).is_err());
        assert!(RawPairs::new(vec![1.0, f64::NAN], vec![2.0, 3.0]).is_err());
        assert!(RawPairs::new(vec![1.0, 2.0], vec![f64::INFINITY, 3.0]).is_err());
    }

    #[test]
    fn large_sample_range() {
        let n = 2887;
        let x: Vec<f64> = (0..n).map(|i| ((i * 7919) % n) as f64).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let ps = to_pseudo_observations(&RawPairs::new(x, y).unwrap());
        let lo = 1.0 / 2888.0;
        let hi = 2887.0 / 2888.0;
        for p in ps.pairs() {
            assert!(p.u() >= lo && p.u() <= hi);
            assert!(p.v() >= lo && p.v() <= hi);
        }
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_maps(
            xs in prop::collection::vec(-1e3f64..1e3, 2..60),
            a in 0.01f64..100.0, b in -50.0f64..50.0,
            c in 0.01f64..100.0, d in -50.0f64..50.0,
        ) {
            let ys: Vec<f64> = xs.iter().map(|x| (x * 0.37).sin()).collect();
            let base = to_pseudo_observations(&RawPairs::new(xs.clone(), ys.clone()).unwrap());
            let ax: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let ay: Vec<f64> = ys.iter().map(|y| c * y + d).collect();
            let moved = to_pseudo_observations(&RawPairs::new(ax.clone(), ay.clone()).unwrap());
            let tie_free = |v: &[f64]| {
                let mut s = v.to_vec();
                s.sort_by(|p, q| p.partial_cmp(q).unwrap());
                s.windows(2).all(|w| w[0] < w[1])
            };
            // Rounding may merge distinct values; only compare when the
            // transformed data keep the original tie structure.
            if tie_free(&xs) == tie_free(&ax) && tie_free(&ys) == tie_free(&ay) {
                prop_assert_eq!(base, moved);
            }
        }

        #[test]
        fn tie_free_margins_are_permutations(n in 2usize..200, seed in any::<u64>()) {
            let x: Vec<f64> = (0..n).map(|i| ((i as u64).wrapping_mul(seed | 1) % 1_000_003) as f64 + i as f64 * 1e-7).collect();
            let y: Vec<f64> = (0..n).map(|i| -(i as f64)).collect();
            let ps = to_pseudo_observations(&RawPairs::new(x, y).unwrap());
            let mut u = ps.u();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let expected: Vec<f64> = (1..=n).map(|k| k as f64 / (n + 1) as f64).collect();
            prop_assert_eq!(u, expected);
        }

        #[test]
        fn sorting_x_reorders_u(xs in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let ys: Vec<f64> = (0..xs.len()).map(|i| i as f64).collect();
            let ps = to_pseudo_observations(&RawPairs::new(xs.clone(), ys.clone()).unwrap());
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
            let sx: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
            let sy: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
            let sorted = to_pseudo_observations(&RawPairs::new(sx, sy).unwrap());
            let u = ps.u();
            let reordered: Vec<f64> = idx.iter().map(|&i| u[i]).collect();
            prop_assert_eq!(sorted.u(), reordered);
        }
    }
}
