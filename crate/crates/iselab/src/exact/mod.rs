//! Exact arithmetic for constants of the form q · 2^(h/2) · π^(p/2).
//!
//! Every closed-form value produced by the moment formulas lives in this
//! family: an arbitrary-precision rational times an optional √2 and an
//! optional √π. Values are normalized so that the even part of the power of
//! two is folded into the rational, leaving `two_half_exp ∈ {0, 1}` and
//! `pi_half_exp ∈ {0, 1}`; equality is then plain field equality (√2 and √π
//! are irrational and no rational multiple of one equals the other, so
//! distinct canonical forms denote distinct reals).

mod decimal;

pub use decimal::{ceil_decimal, floor_decimal, round_decimal, DecimalApprox};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("half-gamma argument must be >= 1")]
    NonpositiveGamma,
    #[error("result would carry pi^({0}/2), which is outside the representable range {{0, 1}}")]
    PiPowerOutOfRange(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("requested {0} digits; supported range is 1..=10000")]
    DigitsOutOfRange(usize),
}

/// An exact constant q · 2^(h/2) · π^(p/2).
///
/// Canonical form: `q == 0` implies `h == p == 0`; otherwise `h ∈ {0, 1}` and
/// `p ∈ {0, 1}`. Multiplication and division stay inside the family as long
/// as the π half-exponents do not add up past 1; the moment formulas never
/// produce more than one √π, so the fallible operations are total on the
/// values this crate actually builds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactConstant {
    q: BigRational,
    two_half_exp: i64,
    pi_half_exp: u8,
}

impl ExactConstant {
    pub fn new(q: BigRational, two_half_exp: i64, sqrt_pi: bool) -> Self {
        let mut c = ExactConstant {
            q,
            two_half_exp,
            pi_half_exp: u8::from(sqrt_pi),
        };
        c.normalize();
        c
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new(q, 0, false)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rational(BigRational::from_integer(n))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_bigint(BigInt::from(n))
    }

    /// √π.
    pub fn sqrt_pi() -> Self {
        Self::new(BigRational::one(), 0, true)
    }

    /// 2^(h/2) for any integer h.
    pub fn two_pow_half(h: i64) -> Self {
        Self::new(BigRational::one(), h, false)
    }

    fn normalize(&mut self) {
        if self.q.is_zero() {
            self.two_half_exp = 0;
            self.pi_half_exp = 0;
            return;
        }
        let whole = self.two_half_exp.div_euclid(2);
        self.two_half_exp = self.two_half_exp.rem_euclid(2);
        if whole != 0 {
            let two = BigInt::from(2);
            let pow = two.pow(whole.unsigned_abs() as u32);
            if whole > 0 {
                self.q *= BigRational::from_integer(pow);
            } else {
                self.q /= BigRational::from_integer(pow);
            }
        }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.q
    }

    /// Canonical half-exponent of 2; always 0 or 1.
    pub fn two_half_exp(&self) -> i64 {
        self.two_half_exp
    }

    /// Canonical half-exponent of π; always 0 or 1.
    pub fn pi_half_exp(&self) -> u8 {
        self.pi_half_exp
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    /// True when the value is a plain rational (no √2, no √π factor).
    pub fn is_rational(&self) -> bool {
        self.two_half_exp == 0 && self.pi_half_exp == 0
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        let p = i64::from(self.pi_half_exp) + i64::from(rhs.pi_half_exp);
        if self.q.is_zero() || rhs.q.is_zero() {
            return Ok(Self::zero());
        }
        if p > 1 {
            return Err(ExactError::PiPowerOutOfRange(p));
        }
        Ok(Self::new(
            &self.q * &rhs.q,
            self.two_half_exp + rhs.two_half_exp,
            p == 1,
        ))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.q.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.q.is_zero() {
            return Ok(Self::zero());
        }
        let p = i64::from(self.pi_half_exp) - i64::from(rhs.pi_half_exp);
        if !(0..=1).contains(&p) {
            return Err(ExactError::PiPowerOutOfRange(p));
        }
        Ok(Self::new(
            &self.q / &rhs.q,
            self.two_half_exp - rhs.two_half_exp,
            p == 1,
        ))
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        Self::new(&self.q * r, self.two_half_exp, self.pi_half_exp == 1)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.q.clone(), self.two_half_exp, self.pi_half_exp == 1)
    }

    pub fn abs(&self) -> Self {
        Self::new(self.q.abs(), self.two_half_exp, self.pi_half_exp == 1)
    }

    pub fn signum(&self) -> i32 {
        if self.q.is_zero() {
            0
        } else if self.q.is_positive() {
            1
        } else {
            -1
        }
    }

    /// ln of the absolute value; −∞ for zero. Accurate to ~1e−13 relative,
    /// which is all the floating-point consumers need.
    pub fn ln_abs(&self) -> f64 {
        if self.q.is_zero() {
            return f64::NEG_INFINITY;
        }
        rational_ln_abs(&self.q)
            + self.two_half_exp as f64 * 0.5 * std::f64::consts::LN_2
            + f64::from(self.pi_half_exp) * 0.5 * std::f64::consts::PI.ln()
    }

    /// Nearest f64; overflows to ±∞ for values outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.q.is_zero() {
            return 0.0;
        }
        let v = self.ln_abs().exp();
        if self.q.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Decimal string with a guaranteed absolute error below 10^(−digits),
    /// built from rigorous rational enclosures of √2 and √π.
    pub fn to_decimal(&self, digits: usize) -> Result<DecimalApprox, ExactError> {
        if digits == 0 || digits > 10_000 {
            return Err(ExactError::DigitsOutOfRange(digits));
        }
        decimal::render(self, digits)
    }

    /// Canonical exact rendering: "7/5", "√(π/8)", "√2", "3/2·√(2π)", ...
    ///
    /// A value with a √π factor is written as a pure surd when the square of
    /// its rational part keeps the radicand readable, i.e. sign·√(mπ/n) with
    /// m/n = q²·2^h.
    pub fn canonical_string(&self) -> String {
        if self.q.is_zero() {
            return "0".to_string();
        }
        let sign = if self.q.is_negative() { "-" } else { "" };
        let aq = self.q.abs();
        match (self.two_half_exp, self.pi_half_exp) {
            (0, 0) => format!("{}{}", sign, fmt_rational(&aq)),
            (h, 0) => {
                // sign·√(2^h·q²)
                let m = &aq * &aq * BigRational::from_integer(BigInt::from(1 << h));
                format!("{}√({})", sign, fmt_rational(&m))
                    .replace("√(2)", "√2")
            }
            (h, _) => {
                let m = &aq * &aq * BigRational::from_integer(BigInt::from(1 << h));
                if m.is_one() {
                    format!("{sign}√π")
                } else if m.numer().is_one() {
                    format!("{}√(π/{})", sign, m.denom())
                } else if m.denom().is_one() {
                    format!("{}√({}π)", sign, m.numer())
                } else {
                    format!("{}√({}π/{})", sign, m.numer(), m.denom())
                }
            }
        }
    }
}

impl fmt::Display for ExactConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Γ(two_x/2) exactly: a factorial for even arguments, a rational multiple of
/// √π for odd ones via Γ(m + 1/2) = (2m)!/(4^m·m!)·√π.
pub fn half_gamma(two_x: u64) -> Result<ExactConstant, ExactError> {
    if two_x == 0 {
        return Err(ExactError::NonpositiveGamma);
    }
    if two_x.is_multiple_of(2) {
        Ok(ExactConstant::from_bigint(factorial(two_x / 2 - 1)))
    } else {
        let m = (two_x - 1) / 2;
        let q = BigRational::new(
            factorial(2 * m),
            BigInt::from(4u32).pow(m as u32) * factorial(m),
        );
        Ok(ExactConstant::new(q, 0, true))
    }
}

pub(crate) fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// ln|x| of a rational whose numerator or denominator may be far outside the
/// double range.
pub fn rational_ln_abs(x: &BigRational) -> f64 {
    bigint_ln_abs(x.numer()) - bigint_ln_abs(x.denom())
}

fn bigint_ln_abs(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 63 {
        return (n.abs().to_f64().expect("fits")).ln();
    }
    let shift = (bits - 63) as usize;
    let top = (n.abs() >> shift).to_f64().expect("63 bits fit in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Nearest f64 of a rational with arbitrarily large components.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let num = x.numer();
    let den = x.denom();
    // Scale so the integer quotient has ~120 significant bits, convert, then
    // undo the scaling in the float exponent.
    let shift = 120 + den.bits() as i64 - num.bits() as i64;
    let t = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let tf = t.to_f64().unwrap_or(if num.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    });
    scale_pow2(tf, -shift)
}

fn scale_pow2(x: f64, e: i64) -> f64 {
    // 2^e in two factors so |e| up to ~4000 cannot overflow an intermediate;
    // beyond that the result saturates to ±∞ or 0, which is what callers want.
    let e = e.clamp(-4400, 4400);
    let h = (e / 2) as i32;
    let r = (e - 2 * i64::from(h)) as i32;
    x * 2f64.powi(h) * 2f64.powi(h) * 2f64.powi(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn half_gamma_small_values() {
        // Γ(1) = 0! and Γ(1/2) = √π
        assert_eq!(half_gamma(2).unwrap(), ExactConstant::one());
        assert_eq!(half_gamma(1).unwrap(), ExactConstant::sqrt_pi());
        // Γ(9/2) = (105/16)√π, reached from Γ(1/2) by four recurrence steps
        let mut expect = ExactConstant::sqrt_pi();
        for twice_x in [1u64, 3, 5, 7] {
            expect = expect.mul_rational(&rat(twice_x as i64, 2));
        }
        assert_eq!(half_gamma(9).unwrap(), expect);
        assert_eq!(
            half_gamma(9).unwrap(),
            ExactConstant::new(rat(105, 16), 0, true)
        );
        assert_eq!(half_gamma(0), Err(ExactError::NonpositiveGamma));
    }

    #[test]
    fn half_gamma_recurrence_exact() {
        // Γ(x+1) = x·Γ(x) for two_x in 1..=200
        for two_x in 1u64..=200 {
            let lhs = half_gamma(two_x + 2).unwrap();
            let rhs = half_gamma(two_x)
                .unwrap()
                .mul_rational(&rat(two_x as i64, 2));
            assert_eq!(lhs, rhs, "two_x = {two_x}");
        }
    }

    #[test]
    fn normalization_folds_even_two_powers() {
        let a = ExactConstant::new(rat(3, 1), 4, false);
        assert_eq!(a, ExactConstant::from_integer(12));
        let b = ExactConstant::new(rat(3, 1), -3, false);
        assert_eq!(b.two_half_exp(), 1);
        assert_eq!(b.rational_part(), &rat(3, 4));
        // normalize twice is the same as once: constructors always canonicalize
        let c = ExactConstant::new(b.rational_part().clone(), b.two_half_exp(), false);
        assert_eq!(b, c);
    }

    #[test]
    fn mul_div_closure_and_pi_guard() {
        let s2 = ExactConstant::two_pow_half(1);
        let sp = ExactConstant::sqrt_pi();
        let prod = s2.try_mul(&sp).unwrap();
        assert_eq!(prod.two_half_exp(), 1);
        assert_eq!(prod.pi_half_exp(), 1);
        // √2·√2 = 2 folds into the rational
        assert_eq!(s2.try_mul(&s2).unwrap(), ExactConstant::from_integer(2));
        // √π·√π = π leaves the family
        assert!(matches!(
            sp.try_mul(&sp),
            Err(ExactError::PiPowerOutOfRange(2))
        ));
        // 1/√π leaves the family too
        assert!(matches!(
            ExactConstant::one().try_div(&sp),
            Err(ExactError::PiPowerOutOfRange(-1))
        ));
        assert_eq!(
            sp.try_div(&sp).unwrap(),
            ExactConstant::one(),
            "√π/√π cancels"
        );
        assert!(matches!(
            sp.try_div(&ExactConstant::zero()),
            Err(ExactError::DivisionByZero)
        ));
    }

    #[test]
    fn canonical_strings() {
        assert_eq!(ExactConstant::from_integer(0).to_string(), "0");
        assert_eq!(ExactConstant::from_rational(rat(7, 5)).to_string(), "7/5");
        assert_eq!(ExactConstant::from_rational(rat(-7, 5)).to_string(), "-7/5");
        assert_eq!(ExactConstant::two_pow_half(1).to_string(), "√2");
        assert_eq!(ExactConstant::sqrt_pi().to_string(), "√π");
        // √(π/8) = 2^(-3/2)·√π
        let v = ExactConstant::new(BigRational::one(), -3, true);
        assert_eq!(v.to_string(), "√(π/8)");
        let w = ExactConstant::new(rat(1, 1), 1, true);
        assert_eq!(w.to_string(), "√(2π)");
        let x = ExactConstant::new(rat(-1, 2), 0, true);
        assert_eq!(x.to_string(), "-√(π/4)");
    }

    #[test]
    fn f64_and_ln_roundtrip() {
        let v = ExactConstant::new(BigRational::one(), -3, true); // √(π/8)
        let expect = (std::f64::consts::PI / 8.0).sqrt();
        assert!((v.to_f64() - expect).abs() < 1e-14);
        assert!((v.ln_abs() - expect.ln()).abs() < 1e-13);
        assert_eq!(ExactConstant::zero().to_f64(), 0.0);
        let neg = ExactConstant::from_rational(rat(-3, 2));
        assert!((neg.to_f64() + 1.5).abs() < 1e-15);
    }

    #[test]
    fn rational_to_f64_handles_huge_components() {
        let big = factorial(400); // ~870 digits
        let x = BigRational::new(&big * 98, &big * 100);
        assert!((rational_to_f64(&x) - 0.98).abs() < 1e-15);
        assert_eq!(rational_to_f64(&BigRational::zero()), 0.0);
        assert!((rational_to_f64(&rat(-1, 3)) + 1.0 / 3.0).abs() < 1e-16);
    }
}
