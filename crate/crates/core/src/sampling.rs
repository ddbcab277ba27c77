//! Reproducible parallel Monte Carlo.
//!
//! Work is cut into fixed-size chunks. Chunk `i` draws from its own ChaCha8
//! stream seeded by mixing `(master_seed, i)`, chunks may run on any thread,
//! and partial results are merged strictly in chunk order. The estimate is
//! therefore a function of the plan alone, not of the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_CHUNK: u64 = 65_536;
pub const DEFAULT_SEED: u64 = 0x42D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub master_seed: u64,
    pub n_samples: u64,
    pub chunk_size: u64,
}

impl SamplingPlan {
    pub fn new(master_seed: u64, n_samples: u64) -> Self {
        Self { master_seed, n_samples, chunk_size: DEFAULT_CHUNK }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    /// Same sizes, different stream family.
    pub fn reseeded(&self, master_seed: u64) -> Self {
        Self { master_seed, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.chunk_size == 0 {
            return Err(Error::domain("sampling plan", "n_samples and chunk_size must be at least 1"));
        }
        Ok(())
    }

    pub fn n_chunks(&self) -> u64 {
        self.n_samples.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, chunk: u64) -> u64 {
        (self.n_samples - chunk * self.chunk_size).min(self.chunk_size)
    }
}

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of chunk `chunk` under `master_seed`.
pub fn stream_seed(master_seed: u64, chunk: u64) -> u64 {
    mix64(mix64(master_seed) ^ chunk.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn stream_rng(master_seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master_seed, chunk))
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub stderr: T,
    pub n: u64,
}

impl<T: Real> Estimate<T> {
    /// `|value − reference| <= k·stderr`, with a floor for round-off when
    /// the samples are (nearly) constant.
    pub fn agrees_with(&self, reference: T, k: T) -> bool {
        (self.value - reference).abs() <= k * self.stderr + T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
    }
}

/// Welford accumulator, merged with Chan's pairwise update.
#[derive(Clone, Copy, Debug)]
struct Moments<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn empty() -> Self {
        Self { n: 0, mean: T::zero(), m2: T::zero() }
    }

    fn push(&mut self, x: T) {
        self.n += 1;
        let d = x - self.mean;
        self.mean = self.mean + d / T::lit(self.n as f64);
        self.m2 = self.m2 + d * (x - self.mean);
    }

    fn merge(self, o: Self) -> Self {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let (na, nb, nn) = (T::lit(self.n as f64), T::lit(o.n as f64), T::lit(n as f64));
        let d = o.mean - self.mean;
        Self {
            n,
            mean: self.mean + d * nb / nn,
            m2: self.m2 + o.m2 + d * d * na * nb / nn,
        }
    }
}

/// Mean of `sample(rng)` over the plan, using the rayon pool of the caller.
pub fn monte_carlo<T, F>(plan: &SamplingPlan, sample: F) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    plan.validate()?;
    let chunks: Vec<Result<Moments<T>>> = (0..plan.n_chunks())
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(plan.master_seed, c);
            let mut m = Moments::empty();
            for _ in 0..plan.chunk_len(c) {
                m.push(sample(&mut rng)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::empty();
    for c in chunks {
        total = total.merge(c?);
    }
    let n = T::lit(total.n as f64);
    let stderr = if total.n > 1 {
        (total.m2 / (n - T::one())).max(T::zero()).sqrt() / n.sqrt()
    } else {
        T::zero()
    };
    Ok(Estimate { value: total.mean, stderr, n: total.n })
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;

    fn uniform_mean(plan: &SamplingPlan) -> Estimate<f64> {
        monte_carlo(plan, |rng| Ok(rng.random::<f64>())).unwrap()
    }

    #[test]
    fn estimate_is_independent_of_thread_count() {
        let plan = SamplingPlan::new(9, 300_001).with_chunk_size(4096);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| uniform_mean(&plan));
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| uniform_mean(&plan));
        assert_eq!(one.value.to_bits(), four.value.to_bits());
        assert_eq!(one.stderr.to_bits(), four.stderr.to_bits());
        assert_eq!(one.n, 300_001);
    }

    #[test]
    fn uniform_mean_and_error() {
        let e = uniform_mean(&SamplingPlan::new(1, 200_000));
        let sd = (1.0f64 / 12.0).sqrt();
        assert!((e.stderr - sd / (200_000f64).sqrt()).abs() < 1e-5);
        assert!(e.agrees_with(0.5, 3.0));
    }

    #[test]
    fn seeds_differ_per_chunk_and_master() {
        assert_ne!(stream_seed(1, 0), stream_seed(1, 1));
        assert_ne!(stream_seed(1, 0), stream_seed(2, 0));
        assert_ne!(stream_seed(0, 1), stream_seed(1, 0));
    }

    #[test]
    fn rejects_empty_plan() {
        assert!(monte_carlo::<f64, _>(&SamplingPlan::new(1, 0), |_| Ok(0.0)).is_err());
        assert!(monte_carlo::<f64, _>(&SamplingPlan::new(1, 5).with_chunk_size(0), |_| Ok(0.0)).is_err());
    }

    #[test]
    fn merge_matches_direct_moments() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut a = Moments::empty();
        let mut b = Moments::empty();
        let mut all = Moments::empty();
        for (i, &x) in xs.iter().enumerate() {
            if i < 400 { a.push(x) } else { b.push(x) }
            all.push(x);
        }
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-8);
    }
}
