//! I.i.d. sampling from Clayton and Gumbel copulas by conditional inversion.
//!
//! Draw `u, w ~ U(0, 1)` and solve `dC/du(u, v) = w` for `v`. Clayton has a
//! closed-form inverse; Gumbel uses Brent's method on
//! `[INVERSION_BRACKET, 1 - INVERSION_BRACKET]`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::copula::{CopulaModel, Family, UnitPair};
use crate::error::{Error, Result};
use crate::numeric::{brent_root, RootResult};

/// Identifier of the generator behind [`RngSeed::stream`], stored next to
/// every seeded result.
pub const RNG_ALGORITHM: &str = "chacha20";

pub const INVERSION_TOL: f64 = 1e-12;
pub const INVERSION_MAX_ITER: usize = 200;
pub const INVERSION_BRACKET: f64 = 1e-12;

/// Largest double below one.
const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Seed of a ChaCha20 generator. Independent substreams are addressed by
/// index, so parallel work can be split without coordinating state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn value(self) -> u64 {
        self.0
    }

    /// Generator for substream `index` of this seed.
    pub fn stream(self, index: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }
}

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        Self(seed)
    }
}

/// `n` pairs drawn from `model` with a given seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaSample {
    pub pairs: Vec<UnitPair>,
    pub model: CopulaModel,
    pub seed: RngSeed,
}

impl CopulaSample {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn interior(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, ONE_MINUS_ULP)
}

/// Solves `dC/du(u, v) = w` for `v`.
pub fn conditional_inverse(model: &CopulaModel, u: f64, w: f64) -> Result<f64> {
    for (what, x) in [("u", u), ("w", w)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Domain {
                what,
                value: x,
                domain: "open interval (0, 1)",
            });
        }
    }
    let theta = model.theta();
    match model.family() {
        Family::Clayton => {
            // v = ((w^{-theta/(1+theta)} - 1) u^{-theta} + 1)^{-1/theta}
            let a = (-theta / (1.0 + theta) * w.ln()).exp_m1();
            let ln_ab = a.ln() - theta * u.ln();
            let ln_inner = if ln_ab > 30.0 {
                ln_ab + (-ln_ab).exp().ln_1p()
            } else {
                ln_ab.exp().ln_1p()
            };
            Ok(interior((-ln_inner / theta).exp()))
        }
        Family::Gumbel if theta == 1.0 => Ok(w),
        Family::Gumbel => {
            let lo = INVERSION_BRACKET;
            let hi = 1.0 - INVERSION_BRACKET;
            let f = |v: f64| model.partial_u(UnitPair::new(u, v).expect("bracket is interior")) - w;
            if f(lo) >= 0.0 {
                return Ok(lo);
            }
            if f(hi) <= 0.0 {
                return Ok(hi);
            }
            match brent_root(f, lo, hi, INVERSION_TOL, INVERSION_MAX_ITER) {
                RootResult::Converged(v) => Ok(v),
                RootResult::Exhausted(_) => Err(Error::NonConvergence {
                    theta,
                    u,
                    w,
                    iterations: INVERSION_MAX_ITER,
                }),
            }
        }
    }
}

/// One draw from `model`.
pub fn sample_pair<R: Rng + ?Sized>(model: &CopulaModel, rng: &mut R) -> Result<UnitPair> {
    let u: f64 = rng.sample(Open01);
    let w: f64 = rng.sample(Open01);
    let v = conditional_inverse(model, u, w)?;
    UnitPair::new(u, v)
}

/// `n` draws from an existing generator.
pub fn sample_pairs<R: Rng + ?Sized>(
    model: &CopulaModel,
    n: usize,
    rng: &mut R,
) -> Result<Vec<UnitPair>> {
    (0..n).map(|_| sample_pair(model, rng)).collect()
}

/// `n >= 1` pairs from substream 0 of `seed`.
pub fn sample_dataset(model: &CopulaModel, n: usize, seed: RngSeed) -> Result<CopulaSample> {
    sample_dataset_stream(model, n, seed, 0)
}

/// `n >= 1` pairs from substream `stream` of `seed`.
pub fn sample_dataset_stream(
    model: &CopulaModel,
    n: usize,
    seed: RngSeed,
    stream: u64,
) -> Result<CopulaSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut rng = seed.stream(stream);
    Ok(CopulaSample {
        pairs: sample_pairs(model, n, &mut rng)?,
        model: *model,
        seed,
    })
}
