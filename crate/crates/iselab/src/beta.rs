//! Certified rational enclosures of β = lim b_k.
//!
//! Two certificates are available. The coarse one is the closed-form sandwich
//! b_n < β < b_n + (1/75)(n−2)^{−3}. The refined one splits each increment
//! s_k = b_k − b_{k−1} into its two leading convolution terms plus a
//! θ-bracketed remainder,
//!
//!   s_k = b_2·b_{k−2}/(25(k−1)²(k−2)²)
//!       + 4·b_3·b_{k−3}/(25(k−1)²(k−2)²(k−3)²)
//!       + θ·36(k−7)/(25(k−1)²(k−2)²(k−3)²(k−4)²),   0 ≤ θ ≤ 1,
//!
//! sums the brackets exactly over n < k ≤ n + 800 with the unknown b_j
//! pinched between b_{n−2} and the coarse upper bound, and closes the
//! infinite tail with telescoping products of consecutive integers. Every
//! step is exact rational arithmetic; no floating point touches the
//! certificate.

use crate::exact::rational_to_f64;
use crate::moments::MomentTable;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BetaError {
    #[error("s_k is defined for k >= 3 (got {0})")]
    KTooSmall(usize),
    #[error("cut {n} below the minimum {min} for this method")]
    CutTooSmall { n: usize, min: usize },
    #[error("moment table holds k <= {have} but the certificate needs {need}")]
    TableTooSmall { need: usize, have: usize },
    #[error("bracket failed to close (upper < lower); this is a bug")]
    BracketFailed,
    #[error("refined interval escaped the coarse interval; this is a bug")]
    OutsideCoarse,
}

/// Exact rational interval [lo, hi] certifying a real constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RationalInterval { lo, hi }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn midpoint_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMethod {
    Coarse,
    Refined,
}

/// A certified enclosure of β together with how it was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaCertificate {
    pub n_cut: usize,
    pub interval: RationalInterval,
    pub method: BetaMethod,
}

/// Wire form: arbitrary-precision endpoints as decimal strings.
#[derive(Debug, Serialize, Deserialize)]
struct CertificateJson {
    n_cut: usize,
    lo_numerator: String,
    lo_denominator: String,
    hi_numerator: String,
    hi_denominator: String,
    method: BetaMethod,
}

impl Serialize for BetaCertificate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CertificateJson {
            n_cut: self.n_cut,
            lo_numerator: self.interval.lo.numer().to_string(),
            lo_denominator: self.interval.lo.denom().to_string(),
            hi_numerator: self.interval.hi.numer().to_string(),
            hi_denominator: self.interval.hi.denom().to_string(),
            method: self.method,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BetaCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = CertificateJson::deserialize(deserializer)?;
        let parse = |s: &str| -> Result<BigInt, D::Error> {
            s.parse().map_err(|_| D::Error::custom("bad integer"))
        };
        let lo = BigRational::new(parse(&raw.lo_numerator)?, parse(&raw.lo_denominator)?);
        let hi = BigRational::new(parse(&raw.hi_numerator)?, parse(&raw.hi_denominator)?);
        if lo > hi {
            return Err(D::Error::custom("interval endpoints out of order"));
        }
        Ok(BetaCertificate {
            n_cut: raw.n_cut,
            interval: RationalInterval::new(lo, hi),
            method: raw.method,
        })
    }
}

fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// s_k = Σ_{i=2}^{k−2} a_i·a_{k−i} / (50^{k−1}·((k−1)!)²), the exact increment
/// b_k − b_{k−1} for k ≥ 3 (the sum is empty at k = 3 and 4 has one term).
pub fn s_k_exact(k: usize, table: &MomentTable) -> Result<BigRational, BetaError> {
    if k < 3 {
        return Err(BetaError::KTooSmall(k));
    }
    if table.max_k() < k {
        return Err(BetaError::TableTooSmall {
            need: k,
            have: table.max_k(),
        });
    }
    let mut conv = BigInt::from(0);
    for i in 2..=k.saturating_sub(2) {
        conv += table.a(i) * table.a(k - i);
    }
    let mut denom = BigInt::one();
    for j in 1..k {
        denom *= BigInt::from(50 * (j * j) as u64);
    }
    Ok(BigRational::new(conv, denom))
}

/// [b_n, b_n + (1/75)(n−2)^{−3}], valid for n ≥ 3.
pub fn beta_coarse(n: usize, table: &MomentTable) -> Result<BetaCertificate, BetaError> {
    if n < 3 {
        return Err(BetaError::CutTooSmall { n, min: 3 });
    }
    if table.max_k() < n {
        return Err(BetaError::TableTooSmall {
            need: n,
            have: table.max_k(),
        });
    }
    let bn = table.b(n).clone();
    let gap = rat(1, 75) / rat(((n - 2) as i128).pow(3), 1);
    let hi = &bn + gap;
    Ok(BetaCertificate {
        n_cut: n,
        interval: RationalInterval::new(bn, hi),
        method: BetaMethod::Coarse,
    })
}

/// Explicit bracketed terms are summed up to n + TAIL_TERMS; the telescoping
/// remainder bounds below then contribute less than 1e-10.
const TAIL_TERMS: usize = 800;

/// Refined enclosure of β at cut n ≥ 7.
pub fn beta_refined(n: usize, table: &MomentTable) -> Result<BetaCertificate, BetaError> {
    if n < 7 {
        return Err(BetaError::CutTooSmall { n, min: 7 });
    }
    if table.max_k() < n {
        return Err(BetaError::TableTooSmall {
            need: n,
            have: table.max_k(),
        });
    }
    let coarse = beta_coarse(n, table)?;
    let b2 = table.b(2);
    let b3 = table.b(3);
    let low2 = table.b(n - 1); // lower bracket for b_{k−2}, k > n
    let low3 = table.b(n - 2); // lower bracket for b_{k−3}
    let upper = coarse.interval.hi(); // β itself is below the coarse bound

    let mut lo = table.b(n).clone();
    let mut hi = table.b(n).clone();
    let m_cut = n + TAIL_TERMS;
    for k in (n + 1)..=m_cut {
        let k = k as i128;
        let c2 = rat(1, 25 * (k - 1).pow(2) * (k - 2).pow(2));
        let c3 = rat(4, 25 * (k - 1).pow(2) * (k - 2).pow(2) * (k - 3).pow(2));
        let theta = rat(
            36 * (k - 7),
            25 * (k - 1).pow(2) * (k - 2).pow(2) * (k - 3).pow(2) * (k - 4).pow(2),
        );
        lo += &c2 * b2 * low2 + &c3 * b3 * low3;
        hi += &c2 * b2 * upper + &c3 * b3 * upper + theta;
    }

    // Tails over k > M. With products of consecutive integers,
    //   Σ_{j≥m} 1/(j(j+1)…(j+r)) = (1/r)·1/(m(m+1)…(m+r−1)),
    // and (k−1)²(k−2)² is sandwiched between (k−2)(k−1)k(k+1) and
    // (k−3)(k−2)(k−1)k; the longer products below are handled the same way.
    let m = m_cut as i128;
    let t2_lo = rat(1, 3 * (m - 1) * m * (m + 1));
    let t2_hi = rat(1, 3 * (m - 2) * (m - 1) * m);
    let t3_lo = rat(1, 5 * (m - 2) * (m - 1) * m * (m + 1) * (m + 2));
    let t3_hi = rat(1, 5 * (m - 4) * (m - 3) * (m - 2) * (m - 1) * m);
    let th_hi = rat(1, 6 * (m - 5) * (m - 4) * (m - 3) * (m - 2) * (m - 1) * m);
    lo += rat(1, 25) * b2 * low2 * t2_lo + rat(4, 25) * b3 * low3 * t3_lo;
    hi += rat(1, 25) * b2 * upper * t2_hi + rat(4, 25) * b3 * upper * t3_hi + rat(36, 25) * th_hi;

    if lo > hi {
        return Err(BetaError::BracketFailed);
    }
    let interval = RationalInterval::new(lo, hi);
    if !coarse.interval.contains_interval(&interval) {
        return Err(BetaError::OutsideCoarse);
    }
    Ok(BetaCertificate {
        n_cut: n,
        interval,
        method: BetaMethod::Refined,
    })
}

/// f64 midpoint of the refined certificate at the canonical cut n = 10.
pub fn certified_beta_f64(table: &MomentTable) -> Result<f64, BetaError> {
    Ok(beta_refined(10, table)?.interval.midpoint_f64())
}
