//! Reproducible Monte Carlo plumbing: per-sample RNG streams, deterministic
//! pairwise reduction, sample-moment summaries and the two-sample
//! Kolmogorov–Smirnov distance.
//!
//! Sample i always draws from ChaCha8 stream i of the run seed, and all
//! reductions happen on the collected sample vector with a fixed pairwise
//! order, so results are bit-identical no matter how many workers ran.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// The RNG for one logical sample stream of a run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Map sample indices 0..n_samples to values in parallel, one RNG stream per
/// index (offset lets several populations share a seed without collisions).
pub fn par_samples<T, F>(n_samples: usize, seed: u64, stream_offset: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, stream_offset + i as u64);
            f(&mut rng, i)
        })
        .collect()
}

/// Sum with a fixed pairwise split; associativity errors stay O(log n) deep.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Neumaier-compensated accumulator; error stays O(ε) regardless of length.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Raw sample moments 1..=max_order, each a pairwise-summed mean of x^r.
pub fn raw_moments(xs: &[f64], max_order: usize) -> Vec<f64> {
    let n = xs.len() as f64;
    (1..=max_order)
        .map(|r| {
            let powers: Vec<f64> = xs.iter().map(|x| x.powi(r as i32)).collect();
            pairwise_sum(&powers) / n
        })
        .collect()
}

/// Standard error of the mean of `xs`.
pub fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (pairwise_sum(&sq) / (n - 1.0)).sqrt() / n.sqrt()
}

/// Standard error of the r-th raw moment estimate.
pub fn moment_standard_error(xs: &[f64], order: u32) -> f64 {
    let powers: Vec<f64> = xs.iter().map(|x| x.powi(order as i32)).collect();
    standard_error(&powers)
}

/// Summary of one Monte Carlo population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n_samples: usize,
    pub grid_n: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_error: f64,
    /// Raw moments of order 1..=8.
    pub raw_moments: Vec<f64>,
    /// Wall-clock seconds; not part of the determinism contract and zeroed
    /// when timestamps are suppressed.
    pub seconds: f64,
}

impl McReport {
    pub fn from_samples(xs: &[f64], grid_n: usize, seed: u64, seconds: f64) -> Self {
        let n = xs.len();
        McReport {
            n_samples: n,
            grid_n,
            seed,
            mean: pairwise_sum(xs) / n as f64,
            std_error: standard_error(xs),
            raw_moments: raw_moments(xs, 8),
            seconds,
        }
    }
}

/// Two-sample Kolmogorov–Smirnov distance sup |F_a − F_b|.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).expect("no NaN samples"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("no NaN samples"));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
