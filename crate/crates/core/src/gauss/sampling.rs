//! Reproducible Gaussian sampling on counter-based streams.
//!
//! All randomness flows through ChaCha12 seeded from a single `u64`, with the
//! cipher's independent stream index used as a block counter. Work is split
//! into fixed-size blocks; block results are combined in block order, so
//! estimates are bit-identical for any worker count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::{Error, Result};

/// Seed for a reproducible stream family.
pub type Seed = u64;

/// Samples per block; fixed so parallel splits never move block boundaries.
pub const MC_BLOCK: usize = 8192;

/// RNG for one block: seed picks the family, `block` picks the stream.
pub fn block_rng(seed: Seed, block: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Convenience wrapper handing out standard-normal draws from one stream.
pub struct StreamRng(ChaCha12Rng);

impl StreamRng {
    pub fn new(seed: Seed, stream: u64) -> Self {
        Self(block_rng(seed, stream))
    }

    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    #[inline]
    pub fn uniform_index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }
}

/// Deterministic sequence of `count` standard-normal draws.
pub fn sample_normal(seed: Seed, count: usize) -> Vec<f64> {
    let blocks = count.div_ceil(MC_BLOCK);
    let mut out = vec![0.0; count];
    out.par_chunks_mut(MC_BLOCK)
        .enumerate()
        .for_each(|(b, chunk)| {
            debug_assert!(b < blocks);
            let mut rng = block_rng(seed, b as u64);
            for slot in chunk.iter_mut() {
                *slot = rng.sample(StandardNormal);
            }
        });
    out
}

/// Running mean/CI accumulator for Monte Carlo estimates.
#[derive(Debug, Clone, Copy, Default)]
pub struct McAccumulator {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl McAccumulator {
    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, other: &McAccumulator) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// 1.96 * standard error of the mean.
    pub fn half_ci95(&self) -> f64 {
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        1.96 * (var / n).sqrt()
    }
}

/// Parallel Monte Carlo mean with 95% half-width; `f` draws everything it
/// needs from the per-block stream. Deterministic for any thread count.
pub fn mc_mean_ci<F>(seed: Seed, samples: u64, f: F) -> Result<(f64, f64)>
where
    F: Fn(&mut ChaCha12Rng) -> Result<f64> + Sync,
{
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "monte carlo needs at least 2 samples".into(),
        ));
    }
    let blocks = samples.div_ceil(MC_BLOCK as u64);
    let per_block: Vec<Result<McAccumulator>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = block_rng(seed, b);
            let lo = b * MC_BLOCK as u64;
            let hi = ((b + 1) * MC_BLOCK as u64).min(samples);
            let mut acc = McAccumulator::default();
            for _ in lo..hi {
                let v = f(&mut rng)?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteCost(format!("sampled cost {v}")));
                }
                acc.push(v);
            }
            Ok(acc)
        })
        .collect();
    // Fold in block order so the reduction is independent of scheduling.
    let mut total = McAccumulator::default();
    for r in per_block {
        total.merge(&r?);
    }
    Ok((total.mean(), total.half_ci95()))
}
