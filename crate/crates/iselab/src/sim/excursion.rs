//! Discretized Brownian excursions and the ξ/η statistics.
//!
//! Excursions are sampled as a Gaussian bridge on the grid followed by the
//! Vervaat transform: cyclically shift the bridge to start at its grid
//! argmin and subtract the minimum, which leaves a nonnegative path with
//! exact zero endpoints. This route has smaller discretization bias than
//! rescaled random-walk excursions; the walk construction is kept for the
//! discrete snake, where an honest tree is required.

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("an excursion path needs at least 3 grid values (n >= 2)")]
    GridTooSmall,
    #[error("excursion endpoints must be exactly zero")]
    NonzeroEndpoints,
    #[error("excursion values must be nonnegative (found {0})")]
    NegativeValue(f64),
}

/// A nonnegative path on the uniform grid 0, 1/n, …, 1 with zero endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionPath {
    values: Vec<f64>,
}

impl ExcursionPath {
    /// Wrap explicit grid values, enforcing the excursion invariants.
    pub fn from_values(values: Vec<f64>) -> Result<Self, SimError> {
        if values.len() < 3 {
            return Err(SimError::GridTooSmall);
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(SimError::NonzeroEndpoints);
        }
        if let Some(&bad) = values.iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(SimError::NegativeValue(bad));
        }
        Ok(ExcursionPath { values })
    }

    /// Grid size n; the path has n + 1 values.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Sample a discretized normalized excursion: Gaussian bridge + Vervaat.
pub fn sample_excursion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ExcursionPath {
    assert!(n >= 2, "grid size must be at least 2");
    let step = (1.0 / n as f64).sqrt();
    // random walk W_1..W_n, then de-trend into a bridge (B_n becomes exactly 0)
    let mut bridge = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        acc += step * z;
        bridge.push(acc);
    }
    let w_n = bridge[n - 1];
    for (j, b) in bridge.iter_mut().enumerate() {
        *b -= (j + 1) as f64 / n as f64 * w_n;
    }
    // grid argmin over the cyclic bridge (B_0 = B_n = 0 is index n-1 here)
    let mut argmin = n - 1; // the zero at the seam
    let mut min = 0.0f64;
    for (j, &b) in bridge.iter().enumerate() {
        if b < min {
            min = b;
            argmin = j;
        }
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    for j in 1..n {
        let idx = (argmin + j) % n;
        values.push(bridge[idx] - min);
    }
    values.push(0.0);
    ExcursionPath { values }
}

/// ξ̂ = 2 × trapezoid rule over the path.
pub fn xi_stat(path: &ExcursionPath) -> f64 {
    let n = path.n() as f64;
    let v = path.values();
    // endpoints are exactly zero, so the trapezoid rule is a plain sum
    2.0 * v[1..path.n()].iter().sum::<f64>() / n
}

/// η̂ by the literal double loop: all grid pairs i < j, the minimum over
/// [i, j], Riemann weight 1/n², times the constant 4. Compensated summation
/// keeps the O(n²) accumulation comparable to the fast route at 1e−12.
pub fn eta_stat_naive(path: &ExcursionPath) -> f64 {
    let v = path.values();
    let n = path.n() as f64;
    let mut acc = crate::stats::KahanSum::new();
    for i in 0..v.len() {
        let mut min = v[i];
        for &x in &v[i + 1..] {
            min = min.min(x);
            acc.add(min);
        }
    }
    4.0 * acc.total() / (n * n)
}

/// η̂ in O(n): sum of subarray minimums by monotonic stack, restricted to
/// subarrays of length ≥ 2 (same pairs as the naive double loop).
pub fn eta_stat_fast(path: &ExcursionPath) -> f64 {
    let v = path.values();
    let n = path.n() as f64;
    // spans where v[i] is the minimum: previous strictly-smaller element on
    // the left, next smaller-or-equal on the right, so ties are attributed
    // exactly once
    let mut stack: Vec<usize> = Vec::with_capacity(v.len());
    let mut all_subarrays = crate::stats::KahanSum::new();
    for i in 0..=v.len() {
        while let Some(&top) = stack.last() {
            let pop = if i == v.len() { true } else { v[i] < v[top] };
            if !pop {
                break;
            }
            stack.pop();
            let left = stack.last().map_or(top + 1, |&p| top - p);
            let right = i - top;
            all_subarrays.add(v[top] * (left * right) as f64);
        }
        if i < v.len() {
            stack.push(i);
        }
    }
    let mut singletons = crate::stats::KahanSum::new();
    for &x in v {
        singletons.add(x);
    }
    4.0 * (all_subarrays.total() - singletons.total()) / (n * n)
}

/// One draw of the center of mass given the excursion: conditionally on e,
/// S is centered Gaussian with variance η, so S = √η̂ · N.
pub fn sample_s_conditional<R: Rng + ?Sized>(path: &ExcursionPath, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    eta_stat_fast(path).sqrt() * z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::stream_rng;

    fn triangle(n: usize, h: f64) -> ExcursionPath {
        let values = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                h * (1.0 - (2.0 * t - 1.0).abs())
            })
            .collect();
        ExcursionPath::from_values(values).unwrap()
    }

    #[test]
    fn from_values_guards() {
        assert_eq!(
            ExcursionPath::from_values(vec![0.0, 0.0]),
            Err(SimError::GridTooSmall)
        );
        assert_eq!(
            ExcursionPath::from_values(vec![0.1, 0.0, 0.0]),
            Err(SimError::NonzeroEndpoints)
        );
        assert_eq!(
            ExcursionPath::from_values(vec![0.0, -0.5, 0.0]),
            Err(SimError::NegativeValue(-0.5))
        );
        let zero = ExcursionPath::from_values(vec![0.0; 11]).unwrap();
        assert_eq!(zero.n(), 10);
    }

    #[test]
    fn vervaat_invariants() {
        for n in [2usize, 3, 17, 256] {
            for s in 0..20 {
                let mut rng = stream_rng(99, s);
                let p = sample_excursion(n, &mut rng);
                let v = p.values();
                assert_eq!(v.len(), n + 1);
                assert_eq!(v[0], 0.0);
                assert_eq!(v[n], 0.0);
                assert!(v.iter().all(|&x| x >= 0.0));
                // the grid minimum is exactly zero somewhere
                assert!(v.contains(&0.0));
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_excursion(64, &mut stream_rng(5, 1));
        let b = sample_excursion(64, &mut stream_rng(5, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn xi_on_triangle_and_zero() {
        // triangle with peak h has area h/2, so ξ = h (trapezoid is exact on
        // piecewise-linear paths with even n)
        let p = triangle(10, 0.7);
        assert!((xi_stat(&p) - 0.7).abs() < 1e-15);
        let zero = ExcursionPath::from_values(vec![0.0; 5]).unwrap();
        assert_eq!(xi_stat(&zero), 0.0);
        assert_eq!(eta_stat_naive(&zero), 0.0);
        assert_eq!(eta_stat_fast(&zero), 0.0);
        assert_eq!(sample_s_conditional(&zero, &mut stream_rng(1, 1)), 0.0);
    }

    #[test]
    fn eta_on_plateau() {
        // interior constant h: every interior pair has min h, so the double
        // loop gives 4h·C(n−1, 2)/n² → 2h
        let n = 40;
        let h = 0.3;
        let mut values = vec![h; n + 1];
        values[0] = 0.0;
        values[n] = 0.0;
        let p = ExcursionPath::from_values(values).unwrap();
        let expect = 4.0 * h * ((n - 1) * (n - 2) / 2) as f64 / (n * n) as f64;
        assert!((eta_stat_naive(&p) - expect).abs() < 1e-12);
        assert!((eta_stat_fast(&p) - expect).abs() < 1e-12);
        assert!((expect - 2.0 * h).abs() < 0.05);
    }

    #[test]
    fn eta_fast_equals_naive_on_random_paths() {
        for s in 0..40 {
            let n = 2 + (s as usize * 13) % 120;
            let p = sample_excursion(n, &mut stream_rng(1234, s));
            let naive = eta_stat_naive(&p);
            let fast = eta_stat_fast(&p);
            assert!(
                (fast - naive).abs() <= 1e-12 * naive.max(1e-300),
                "n = {n}: {fast} vs {naive}"
            );
        }
    }

    #[test]
    fn eta_fast_handles_ties() {
        // repeated values exercise the tie-attribution convention
        let p = ExcursionPath::from_values(vec![0.0, 0.5, 0.5, 0.2, 0.2, 0.5, 0.0]).unwrap();
        let naive = eta_stat_naive(&p);
        let fast = eta_stat_fast(&p);
        assert!((fast - naive).abs() < 1e-15);
    }

    #[test]
    fn eta_bounded_by_peak() {
        for s in 0..10 {
            let p = sample_excursion(128, &mut stream_rng(777, s));
            let eta = eta_stat_fast(&p);
            assert!(eta >= 0.0);
            assert!(eta <= 2.0 * p.max());
        }
    }
}
