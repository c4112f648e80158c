//! Discrete Brownian snake over a uniform random plane tree.
//!
//! The contour of the tree is a uniform Dyck path of 2n steps obtained by the
//! cycle lemma: shuffle n+1 up-steps and n down-steps, rotate to start just
//! after the last minimum of the partial sums (the unique rotation that is
//! strictly positive), and drop the leading up-step. Each tree edge carries
//! an independent centered Gaussian displacement of variance 2/√(2n), so a
//! node at depth d sits at a position with variance 2d/√(2n) — the discrete
//! counterpart of a head value with variance equal to the lifetime 2e. The
//! center of mass estimate is the contour average of the head values. None
//! of this uses the conditional-Gaussian representation of S, which is what
//! makes it an independent check of that identity.

use super::excursion::ExcursionPath;
use crate::stats::{ks_distance, moment_standard_error, par_samples, pairwise_sum, raw_moments};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

/// One sampled snake: the contour (rescaled to excursion normalization), the
/// head value at every contour time, and the contour average of the heads.
#[derive(Debug, Clone, PartialEq)]
pub struct SnakeSample {
    pub excursion: ExcursionPath,
    pub heads: Vec<f64>,
    pub s_value: f64,
}

impl SnakeSample {
    /// Head position at a uniform random contour time (the Ŵ_U statistic).
    pub fn head_at_uniform_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.heads[rng.random_range(0..self.heads.len())]
    }
}

/// Uniform Dyck path of 2n steps (true = up), by shuffle + cycle lemma.
fn sample_dyck_path<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    let mut steps: Vec<bool> = std::iter::repeat_n(true, n + 1)
        .chain(std::iter::repeat_n(false, n))
        .collect();
    steps.shuffle(rng);
    // last argmin of the partial sums S_0..S_{2n}; the rotation starting one
    // step later is strictly positive, begins with an up-step, and dropping
    // that step leaves a Dyck path
    let mut sum = 0i64;
    let mut min = 0i64;
    let mut argmin = 0usize; // position in 0..=2n of the last minimal prefix sum
    for (idx, &up) in steps.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum <= min {
            min = sum;
            argmin = idx + 1;
        }
    }
    let len = steps.len();
    let rotated = |j: usize| steps[(argmin + j) % len];
    debug_assert!(rotated(0), "dominating rotation starts with an up-step");
    (1..len).map(rotated).collect()
}

/// Sample the discrete snake over a uniform plane tree with n edges.
pub fn sample_discrete_snake<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SnakeSample {
    assert!(n >= 1, "the tree needs at least one edge");
    let dyck = sample_dyck_path(n, rng);
    let contour_scale = 1.0 / (2.0 * n as f64).sqrt();
    let disp_sigma = (2.0 / (2.0 * n as f64).sqrt()).sqrt();

    let len = 2 * n + 1;
    let mut contour = Vec::with_capacity(len);
    let mut heads = Vec::with_capacity(len);
    let mut depth = 0i64;
    let mut stack: Vec<f64> = vec![0.0];
    contour.push(0.0);
    heads.push(0.0);
    for &up in &dyck {
        if up {
            depth += 1;
            let z: f64 = rng.sample(StandardNormal);
            let head = stack.last().unwrap() + disp_sigma * z;
            stack.push(head);
        } else {
            depth -= 1;
            stack.pop();
        }
        contour.push(depth as f64 * contour_scale);
        heads.push(*stack.last().expect("contour stays nonnegative"));
    }
    debug_assert_eq!(depth, 0);
    // trapezoid mean over the contour grid; both endpoints are the root at 0
    let s_value = pairwise_sum(&heads[1..2 * n]) / (2 * n) as f64;
    let excursion =
        ExcursionPath::from_values(contour).expect("Dyck path scales to a valid excursion");
    SnakeSample {
        excursion,
        heads,
        s_value,
    }
}

/// Moment comparison between two sample populations.
#[derive(Debug, Clone, Serialize)]
pub struct MomentGap {
    pub order: u32,
    pub snake: f64,
    pub conditional: f64,
    pub gap: f64,
    pub combined_se: f64,
}

/// Report for the distributional check S =law √η·N.
#[derive(Debug, Clone, Serialize)]
pub struct IdloiReport {
    pub grid_n: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub gaps: Vec<MomentGap>,
    pub ks_distance: f64,
}

impl IdloiReport {
    /// All moment gaps within 3 combined standard errors and the KS distance
    /// within `ks_budget`.
    pub fn passes(&self, ks_budget: f64) -> bool {
        self.gaps.iter().all(|g| g.gap.abs() < 3.0 * g.combined_se)
            && self.ks_distance < ks_budget
    }
}

/// Sample population A from discrete snakes and population B from √η̂·N over
/// fresh excursions, and compare moments of orders 1, 2, 4, 6 plus the
/// two-sample KS distance.
pub fn verify_idloi(grid_n: usize, n_samples: usize, seed: u64) -> IdloiReport {
    let snake: Vec<f64> = par_samples(n_samples, seed, 0, |rng, _| {
        sample_discrete_snake(grid_n, rng).s_value
    });
    let conditional: Vec<f64> = par_samples(n_samples, seed, n_samples as u64, |rng, _| {
        let path = super::excursion::sample_excursion(grid_n, rng);
        super::excursion::sample_s_conditional(&path, rng)
    });
    let ma = raw_moments(&snake, 6);
    let mb = raw_moments(&conditional, 6);
    let gaps = [1u32, 2, 4, 6]
        .into_iter()
        .map(|order| {
            let sa = moment_standard_error(&snake, order);
            let sb = moment_standard_error(&conditional, order);
            MomentGap {
                order,
                snake: ma[order as usize - 1],
                conditional: mb[order as usize - 1],
                gap: ma[order as usize - 1] - mb[order as usize - 1],
                combined_se: (sa * sa + sb * sb).sqrt(),
            }
        })
        .collect();
    IdloiReport {
        grid_n,
        n_samples,
        seed,
        gaps,
        ks_distance: ks_distance(&snake, &conditional),
    }
}
