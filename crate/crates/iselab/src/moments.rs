//! The integer sequence a_k, its normalized form b_k, and the exact moments
//! of η and S they generate.
//!
//! The driving recursion is a_1 = 1 and
//! a_k = 2(5k−4)(5k−6)·a_{k−1} + Σ_{i=1}^{k−1} a_i·a_{k−i},
//! with b_k = a_k / (50^{k−1}·((k−1)!)²). Moments come out as
//! E[η^k] = k!·√π·a_k / (2^{(7k−4)/2}·Γ((5k−1)/2)) and
//! E[S^{2k}] = (2k)!·√π·a_k / (2^{(9k−4)/2}·Γ((5k−1)/2)); odd moments of S
//! vanish by symmetry, and E[S^{2k}] = E[η^k]·E[N^{2k}] factorizes exactly.

use crate::exact::{factorial, half_gamma, ExactConstant};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("gaussian moments of odd order are not even moments (got {0})")]
    OddOrder(u64),
}

/// a_1..a_max_k.
pub fn compute_a(max_k: usize) -> Vec<BigInt> {
    assert!(max_k >= 1, "max_k must be at least 1");
    let mut a: Vec<BigInt> = Vec::with_capacity(max_k);
    a.push(BigInt::one());
    for k in 2..=max_k {
        let kk = k as i64;
        let mut next = BigInt::from(2 * (5 * kk - 4) * (5 * kk - 6)) * &a[k - 2];
        for i in 1..k {
            next += &a[i - 1] * &a[k - i - 1];
        }
        a.push(next);
    }
    a
}

/// b_1..b_max_k with b_k = a_k / (50^{k−1}·((k−1)!)²).
pub fn compute_b(max_k: usize) -> Vec<BigRational> {
    let a = compute_a(max_k);
    b_from_a(&a)
}

fn b_from_a(a: &[BigInt]) -> Vec<BigRational> {
    let mut b = Vec::with_capacity(a.len());
    let mut denom = BigInt::one(); // 50^{k-1}·((k-1)!)²
    for (idx, ak) in a.iter().enumerate() {
        let k = idx + 1;
        if k > 1 {
            denom *= BigInt::from(50 * ((k - 1) * (k - 1)) as u64);
        }
        b.push(BigRational::new(ak.clone(), denom.clone()));
    }
    b
}

/// E[N^m] for a standard Gaussian and even m: m!/(2^{m/2}·(m/2)!).
pub fn gaussian_even_moment(m: u64) -> Result<BigRational, MomentError> {
    if !m.is_multiple_of(2) {
        return Err(MomentError::OddOrder(m));
    }
    let half = m / 2;
    Ok(BigRational::new(
        factorial(m),
        BigInt::from(2u32).pow(half as u32) * factorial(half),
    ))
}

/// Precomputed table of a_k, b_k, E[η^k] and E[S^{2k}] for k ≤ max_k.
///
/// Construction is pure: two tables built with the same `max_k` are
/// identical. Entries are immutable afterwards and freely shareable.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    max_k: usize,
    a: Vec<BigInt>,
    b: Vec<BigRational>,
    eta: Vec<ExactConstant>,
    s_even: Vec<ExactConstant>,
}

impl MomentTable {
    pub fn new(max_k: usize) -> Self {
        assert!(max_k >= 1, "max_k must be at least 1");
        let a = compute_a(max_k);
        let b = b_from_a(&a);
        let mut eta = Vec::with_capacity(max_k + 1);
        let mut s_even = Vec::with_capacity(max_k + 1);
        eta.push(ExactConstant::one());
        s_even.push(ExactConstant::one());
        // running k!, (2k)! and two interleaved Γ((5k−1)/2) chains, advanced
        // by Γ(x+5) = (x+4)(x+3)(x+2)(x+1)x·Γ(x); keeps construction O(max_k)
        // big multiplications instead of a fresh factorial per entry
        let mut fact_k = BigInt::one();
        let mut fact_2k = BigInt::one();
        let mut gammas: Vec<ExactConstant> = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            fact_k *= k;
            fact_2k *= (2 * k - 1) * (2 * k);
            let gamma = match k {
                1 => half_gamma(4).expect("positive"),
                2 => half_gamma(9).expect("positive"),
                _ => {
                    let mut step = BigRational::one();
                    for j in 0..5u64 {
                        let num = BigInt::from((5 * k - 11) as u64 + 2 * j);
                        step *= BigRational::new(num, BigInt::from(2));
                    }
                    gammas[k - 3].mul_rational(&step)
                }
            };
            gammas.push(gamma);
            let common = ExactConstant::from_bigint(&a[k - 1] * &fact_k)
                .try_mul(&ExactConstant::sqrt_pi())
                .expect("only √π so far")
                .try_div(&gammas[k - 1])
                .expect("√π cancels or survives");
            eta.push(
                common
                    .try_mul(&ExactConstant::two_pow_half(-(7 * k as i64 - 4)))
                    .expect("powers of two are always representable"),
            );
            // (2k)!/k! upgrades the η numerator to the S numerator
            let ratio = BigRational::new(fact_2k.clone(), fact_k.clone());
            s_even.push(
                common
                    .mul_rational(&ratio)
                    .try_mul(&ExactConstant::two_pow_half(-(9 * k as i64 - 4)))
                    .expect("powers of two are always representable"),
            );
        }
        MomentTable {
            max_k,
            a,
            b,
            eta,
            s_even,
        }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    /// a_k, 1-based.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.a[k - 1]
    }

    /// b_k, 1-based.
    pub fn b(&self, k: usize) -> &BigRational {
        &self.b[k - 1]
    }

    /// E[η^k]; k = 0 gives 1.
    pub fn eta_moment(&self, k: usize) -> &ExactConstant {
        &self.eta[k]
    }

    /// E[S^m]; zero for odd m.
    pub fn s_moment(&self, m: usize) -> ExactConstant {
        if !m.is_multiple_of(2) {
            ExactConstant::zero()
        } else {
            self.s_even[m / 2].clone()
        }
    }
}

/// E[η^k] without building a table.
pub fn eta_moment(k: usize) -> ExactConstant {
    if k == 0 {
        return ExactConstant::one();
    }
    MomentTable::new(k).eta_moment(k).clone()
}

/// E[S^m] without building a table; zero for odd m.
pub fn s_moment(m: usize) -> ExactConstant {
    if !m.is_multiple_of(2) {
        return ExactConstant::zero();
    }
    if m == 0 {
        return ExactConstant::one();
    }
    MomentTable::new(m / 2).s_moment(m)
}
