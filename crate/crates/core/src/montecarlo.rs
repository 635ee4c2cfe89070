//! Reproducible chunked Monte Carlo.
//!
//! Samples are split into fixed chunks of [`CHUNK_SIZE`]. Chunk `c` of run
//! `r` draws from `ChaCha8Rng::seed_from_u64(seed)` with stream
//! `(r << 40) | c`, so the random numbers a chunk sees do not depend on
//! which thread evaluates it. Partial results are collected in chunk order and
//! reduced sequentially, which makes every estimate bit-identical for a given
//! `(seed, n_samples)` regardless of the thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CHUNK_SIZE: u64 = 1 << 16;

/// Sample mean with its standard error `s / sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `|mean - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Running mean and sum of squared deviations (Welford update, Chan merge).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Moments of a sample taking `value` `plus` times and `-value` `minus` times.
    pub fn from_two_point(plus: u64, minus: u64, value: f64) -> Moments {
        let count = plus + minus;
        if count == 0 {
            return Moments::default();
        }
        let mean = value * (plus as f64 - minus as f64) / count as f64;
        let m2 = plus as f64 * (value - mean).powi(2) + minus as f64 * (value + mean).powi(2);
        Moments { count, mean, m2 }
    }

    pub fn estimate(&self, seed: u64) -> McEstimate {
        let n = self.count as f64;
        let std_error = if self.count < 2 {
            0.0
        } else {
            (self.m2.max(0.0) / (n - 1.0) / n).sqrt()
        };
        McEstimate {
            mean: self.mean,
            std_error,
            n_samples: self.count,
            seed,
        }
    }
}

/// Runs `body(rng, len)` once per chunk in parallel and returns the results in chunk order.
pub fn map_chunks<R, F>(n_samples: u64, seed: u64, run: u64, body: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> R + Sync,
{
    if n_samples == 0 {
        return Err(Error::NoSamples);
    }
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    Ok((0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, run, c);
            let len = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
            body(&mut rng, len)
        })
        .collect())
}

pub fn chunk_rng(seed: u64, run: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((run << 40) | chunk);
    rng
}

/// Convenience wrapper: accumulate one scalar per sample and reduce to an estimate.
pub fn estimate<F>(n_samples: u64, seed: u64, run: u64, sample: F) -> Result<McEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let parts = map_chunks(n_samples, seed, run, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sample(rng));
        }
        m
    })?;
    let mut total = Moments::default();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.estimate(seed))
}

/// Uniform point on the unit sphere (Marsaglia: reject `(u, v)` outside the unit disc).
pub fn unit_sphere<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    loop {
        let u = 2.0 * rng.random::<f64>() - 1.0;
        let v = 2.0 * rng.random::<f64>() - 1.0;
        let s = u * u + v * v;
        if s < 1.0 && s > 0.0 {
            let k = 2.0 * (1.0 - s).sqrt();
            return [T::lit(k * u), T::lit(k * v), T::lit(1.0 - 2.0 * s)];
        }
    }
}
