//! Monte Carlo check of the Gaussian-averaged dephasing channel.
//!
//! A random Z rotation with half-angle `J·δZ`, averaged over `δZ ~ N(0, σ²)`,
//! shrinks the transverse Bloch components by `E[cos 2JδZ] = exp(−2J²σ²)`.
//! The sampler draws `δZ` explicitly and measures that shrink.
//!
//! Sampling is split into fixed chunks of [`CHUNK_SAMPLES`]. Chunk `c` uses
//! a ChaCha8 generator seeded with `seed` on stream `c`, so sample `i` depends
//! only on `(seed, i)`. Chunk statistics are merged in chunk order, which makes
//! every estimate bit-identical for any number of worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::par;
use crate::qubit_state::BlochState;

pub const CHUNK_SAMPLES: usize = 8192;

/// Distribution of the neighbour field fluctuation `δZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fluctuation {
    /// `δZ ~ N(0, variance)`.
    Gaussian { variance: f64 },
    /// `δZ = Σ_k s_k − n·z` for `n` independent ±1 spins with mean `z`.
    /// Diagnostic for how far a handful of neighbours is from the Gaussian limit.
    DiscreteSpins { neighbors: u32, z: f64 },
}

impl Fluctuation {
    pub fn variance(&self) -> f64 {
        match *self {
            Fluctuation::Gaussian { variance } => variance,
            Fluctuation::DiscreteSpins { neighbors, z } => neighbors as f64 * (1.0 - z * z),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            Fluctuation::Gaussian { variance } => {
                let g: f64 = rng.sample(StandardNormal);
                g * variance.sqrt()
            }
            Fluctuation::DiscreteSpins { neighbors, z } => {
                let up = 0.5 * (1.0 + z);
                let mut sum = 0.0;
                for _ in 0..neighbors {
                    sum += if rng.random::<f64>() < up { 1.0 } else { -1.0 };
                }
                sum - neighbors as f64 * z
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// Ising half-angle J.
    pub j: f64,
    pub fluctuation: Fluctuation,
}

impl SamplerConfig {
    pub fn gaussian(n_samples: usize, seed: u64, j: f64, variance: f64) -> Result<Self> {
        Self::new(n_samples, seed, j, Fluctuation::Gaussian { variance })
    }

    pub fn new(n_samples: usize, seed: u64, j: f64, fluctuation: Fluctuation) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::validation("n_samples must be >= 1"));
        }
        if !j.is_finite() {
            return Err(Error::validation("coupling must be finite"));
        }
        match fluctuation {
            Fluctuation::Gaussian { variance } if !(variance >= 0.0 && variance.is_finite()) => {
                return Err(Error::validation(format!(
                    "variance must be >= 0, got {variance}"
                )));
            }
            Fluctuation::DiscreteSpins { z, .. } if !(-1.0..=1.0).contains(&z) => {
                return Err(Error::validation(format!("spin mean {z} outside [-1, 1]")));
            }
            _ => {}
        }
        Ok(SamplerConfig {
            n_samples,
            seed,
            j,
            fluctuation,
        })
    }

    /// Closed-form shrink factor `exp(−2J²σ²)`, i.e. `1 − 2p`.
    pub fn analytic_shrink(&self) -> f64 {
        (-2.0 * self.j * self.j * self.fluctuation.variance()).exp()
    }
}

/// Streaming mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(self, other: Moments) -> Moments {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let nb = other.count as f64 / n as f64;
        Moments {
            count: n,
            mean: self.mean + d * nb,
            m2: self.m2 + other.m2 + d * d * self.count as f64 * nb,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation over √n; zero for fewer than two samples.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let var = self.m2 / (self.count - 1) as f64;
        (var / self.count as f64).sqrt()
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean(),
            stderr: self.stderr(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Runs `per_chunk(rng, count)` for every chunk and returns results in chunk order.
pub(crate) fn sample_chunks<A, F>(n_samples: usize, seed: u64, per_chunk: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> A + Sync + Send,
{
    let chunks = n_samples.div_ceil(CHUNK_SAMPLES);
    par::map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = CHUNK_SAMPLES.min(n_samples - c * CHUNK_SAMPLES);
        per_chunk(&mut rng, count)
    })
}

/// Ensemble-averaged Bloch vector with per-component standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephaseEstimate {
    pub state: BlochState,
    pub stderr: BlochState,
}

/// Applies `exp(iJδZ·Z)` with sampled `δZ` to `s` and averages.
pub fn sample_dephase(s: BlochState, cfg: &SamplerConfig) -> DephaseEstimate {
    let parts = sample_chunks(cfg.n_samples, cfg.seed, |rng, count| {
        let (mut mx, mut my) = (Moments::default(), Moments::default());
        for _ in 0..count {
            let dz = cfg.fluctuation.draw(rng);
            let r = s.rotate_z(cfg.j * dz);
            mx.push(r.x);
            my.push(r.y);
        }
        (mx, my)
    });
    let (mx, my) = parts.into_iter().fold(
        (Moments::default(), Moments::default()),
        |(ax, ay), (bx, by)| (ax.merge(bx), ay.merge(by)),
    );
    DephaseEstimate {
        state: BlochState::new(mx.mean(), my.mean(), s.z),
        stderr: BlochState::new(mx.stderr(), my.stderr(), 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkEstimate {
    /// `E[cos 2JδZ]`, to compare with `1 − 2p`.
    pub shrink: Estimate,
    /// `E[sin 2JδZ]`; zero for a centred symmetric field.
    pub sine: Estimate,
}

pub fn empirical_shrink(cfg: &SamplerConfig) -> ShrinkEstimate {
    let parts = sample_chunks(cfg.n_samples, cfg.seed, |rng, count| {
        let (mut mc, mut ms) = (Moments::default(), Moments::default());
        for _ in 0..count {
            let (s, c) = (2.0 * cfg.j * cfg.fluctuation.draw(rng)).sin_cos();
            mc.push(c);
            ms.push(s);
        }
        (mc, ms)
    });
    let (mc, ms) = parts.into_iter().fold(
        (Moments::default(), Moments::default()),
        |(ac, as_), (bc, bs)| (ac.merge(bc), as_.merge(bs)),
    );
    ShrinkEstimate {
        shrink: mc.estimate(),
        sine: ms.estimate(),
    }
}
