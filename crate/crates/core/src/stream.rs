//! Reproducible parallel Monte-Carlo.
//!
//! Work is cut into fixed-size chunks and chunk `i` always draws from ChaCha
//! stream `i` of the run seed, so results depend on `(seed, n)` only and never on
//! how many threads rayon happens to use. Chunk results are reduced in index
//! order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per chunk.
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Substreams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for work item `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Runs `work(rng, len)` on every chunk of `n` samples in parallel and
    /// returns the chunk results in chunk order.
    pub fn map_chunks<T, F>(&self, n: usize, work: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
    {
        let chunks = n.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let len = CHUNK.min(n - i * CHUNK);
                let mut rng = self.stream(i as u64);
                work(&mut rng, len)
            })
            .collect()
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Running first and second moments, merged in chunk order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(parts: &[Moments]) -> Moments {
        parts.iter().fold(Moments::default(), |acc, m| Moments {
            n: acc.n + m.n,
            sum: acc.sum + m.sum,
            sum_sq: acc.sum_sq + m.sum_sq,
        })
    }

    pub fn estimate(&self) -> McEstimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_error: (var / n).sqrt(),
            samples: self.n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn chunking_covers_every_sample() {
        let s = Substreams::new(7);
        let lens = s.map_chunks(3 * CHUNK + 5, |_, len| len);
        assert_eq!(lens, vec![CHUNK, CHUNK, CHUNK, 5]);
    }

    #[test]
    fn independent_of_thread_count() {
        let s = Substreams::new(42);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| s.map_chunks(5 * CHUNK, |rng, len| (0..len).map(|_| rng.random::<f64>()).sum::<f64>()))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn streams_differ() {
        let s = Substreams::new(1);
        let a: u64 = s.stream(0).random();
        let b: u64 = s.stream(1).random();
        assert_ne!(a, b);
    }

    #[test]
    fn moments_of_constant() {
        let mut m = Moments::default();
        for _ in 0..10 {
            m.push(0.5);
        }
        let e = m.estimate();
        assert_eq!(e.mean, 0.5);
        assert_eq!(e.std_error, 0.0);
    }
}
