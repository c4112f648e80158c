//! Rigorous decimal rendering.
//!
//! The only irrationals in play are √2 and √π. Both get exact rational
//! enclosures: π from Machin's formula evaluated in scaled integer
//! arithmetic with explicit floor-error accounting, square roots from the
//! integer square root of outward-scaled numerators and denominators. The
//! final string is the rounded midpoint of the resulting interval together
//! with a proven absolute error bound.

use super::{ExactConstant, ExactError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A decimal string plus a bound on how far it can be from the true value.
#[derive(Debug, Clone, PartialEq)]
pub struct DecimalApprox {
    pub text: String,
    /// Guaranteed: |rendered − exact| ≤ abs_error < 10^(−digits).
    pub abs_error: BigRational,
}

fn pow10(n: usize) -> BigInt {
    BigInt::from(10u32).pow(n as u32)
}

/// Scaled arctan(1/x)·scale as an integer, with the number of summed terms.
///
/// Each term is floor(scale / (x^(2k+1)·(2k+1))), which is exact because
/// nested floor divisions by positive integers compose; the returned sum is
/// within ±(terms + 1) of the true value of atan(1/x)·scale.
fn atan_inv_scaled(x: u64, scale: &BigInt) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut power = scale / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut terms = 0u64;
    let mut k = 0u64;
    loop {
        let term = &power / BigInt::from(2 * k + 1);
        if term.is_zero() {
            break;
        }
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power = &power / &x2;
        terms += 1;
        k += 1;
    }
    (sum, terms)
}

/// Rational enclosure of π with width well below 10^(−prec).
pub(crate) fn pi_enclosure(prec: usize) -> (BigRational, BigRational) {
    let guard = 8;
    let scale = pow10(prec + guard);
    let (a, ta) = atan_inv_scaled(5, &scale);
    let (b, tb) = atan_inv_scaled(239, &scale);
    let ea = BigInt::from(ta + 2);
    let eb = BigInt::from(tb + 2);
    // π = 16·atan(1/5) − 4·atan(1/239)
    let lo = 16 * (&a - &ea) - 4 * (&b + &eb);
    let hi = 16 * (&a + &ea) - 4 * (&b - &eb);
    (
        BigRational::new(lo, scale.clone()),
        BigRational::new(hi, scale),
    )
}

/// Outward rational enclosure of √x for a positive rational interval.
pub(crate) fn sqrt_enclosure(
    lo: &BigRational,
    hi: &BigRational,
    prec: usize,
) -> (BigRational, BigRational) {
    let p = pow10(prec);
    let p2 = &p * &p;
    let lo_scaled = (lo.numer() * &p2).div_floor(lo.denom());
    let hi_scaled = (hi.numer() * &p2).div_ceil(hi.denom());
    let lo_root = lo_scaled.sqrt();
    let hi_root = hi_scaled.sqrt() + 1;
    (
        BigRational::new(lo_root, p.clone()),
        BigRational::new(hi_root, p),
    )
}

pub(crate) fn sqrt2_enclosure(prec: usize) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(BigInt::from(2));
    sqrt_enclosure(&two, &two, prec)
}

pub(crate) fn sqrt_pi_enclosure(prec: usize) -> (BigRational, BigRational) {
    let (lo, hi) = pi_enclosure(prec + 1);
    sqrt_enclosure(&lo, &hi, prec)
}

fn format_scaled(n: &BigInt, digits: usize) -> String {
    let neg = n.is_negative();
    let mut s = n.abs().to_string();
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let split = s.len() - digits;
    format!(
        "{}{}.{}",
        if neg { "-" } else { "" },
        &s[..split],
        &s[split..]
    )
}

/// Nearest decimal with `digits` fractional digits (ties away from zero).
pub fn round_decimal(x: &BigRational, digits: usize) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let n = if x.is_negative() {
        (scaled - half).ceil().to_integer()
    } else {
        (scaled + half).floor().to_integer()
    };
    format_scaled(&n, digits)
}

/// Largest decimal with `digits` fractional digits that is ≤ x.
pub fn floor_decimal(x: &BigRational, digits: usize) -> String {
    let n = (x * BigRational::from_integer(pow10(digits)))
        .floor()
        .to_integer();
    format_scaled(&n, digits)
}

/// Smallest decimal with `digits` fractional digits that is ≥ x.
pub fn ceil_decimal(x: &BigRational, digits: usize) -> String {
    let n = (x * BigRational::from_integer(pow10(digits)))
        .ceil()
        .to_integer();
    format_scaled(&n, digits)
}

pub(super) fn render(c: &ExactConstant, digits: usize) -> Result<DecimalApprox, ExactError> {
    let half_ulp = BigRational::new(BigInt::one(), 2 * pow10(digits));
    if c.is_zero() {
        return Ok(DecimalApprox {
            text: format_scaled(&BigInt::zero(), digits),
            abs_error: BigRational::zero(),
        });
    }
    if c.is_rational() {
        return Ok(DecimalApprox {
            text: round_decimal(c.rational_part(), digits),
            abs_error: half_ulp,
        });
    }
    // Interval for the surd part, then scale by the (signed) rational part.
    let q = c.rational_part();
    let mag_digits = (q.numer().bits() as i64 - q.denom().bits() as i64).max(0) as usize / 3;
    let prec = digits + mag_digits + 6;
    let (mut lo, mut hi) = (BigRational::one(), BigRational::one());
    if c.two_half_exp() == 1 {
        let (l, h) = sqrt2_enclosure(prec);
        lo *= l;
        hi *= h;
    }
    if c.pi_half_exp() == 1 {
        let (l, h) = sqrt_pi_enclosure(prec);
        lo *= l;
        hi *= h;
    }
    let (lo, hi) = if q.is_negative() {
        (q * hi, q * lo)
    } else {
        (q * lo, q * hi)
    };
    let mid = (&lo + &hi) / BigRational::from_integer(BigInt::from(2));
    let abs_error = (&hi - &lo) / BigRational::from_integer(BigInt::from(2)) + &half_ulp;
    let ulp = BigRational::new(BigInt::one(), pow10(digits));
    assert!(
        abs_error < ulp,
        "enclosure not tight enough: requested {digits} digits"
    );
    Ok(DecimalApprox {
        text: round_decimal(&mid, digits),
        abs_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn pi_enclosure_is_correct_and_tight() {
        let (lo, hi) = pi_enclosure(30);
        assert!(lo < hi);
        let width = &hi - &lo;
        assert!(width < BigRational::new(BigInt::one(), pow10(28)));
        // straddles the true value: 3.14159265358979323 < π < 3.14159265358979324
        let below = rat(314_159_265_358_979_323i64, 100_000_000_000_000_000i64);
        let above = rat(314_159_265_358_979_324i64, 100_000_000_000_000_000i64);
        assert!(below < lo && hi < above);
    }

    #[test]
    fn sqrt_enclosure_brackets() {
        let (lo, hi) = sqrt2_enclosure(25);
        let two = rat(2, 1);
        assert!(&lo * &lo < two && two < &hi * &hi);
        assert!(&hi - &lo < BigRational::new(BigInt::from(3), pow10(25)));
    }

    #[test]
    fn rounding_and_outward_rounding() {
        assert_eq!(round_decimal(&rat(7, 5), 3), "1.400");
        assert_eq!(round_decimal(&rat(-1, 3), 4), "-0.3333");
        assert_eq!(round_decimal(&rat(1, 2), 1), "0.5");
        assert_eq!(round_decimal(&rat(5, 1000), 2), "0.01"); // tie away from zero
        assert_eq!(floor_decimal(&rat(199, 100), 1), "1.9");
        assert_eq!(ceil_decimal(&rat(191, 100), 1), "2.0");
        assert_eq!(floor_decimal(&rat(-191, 100), 1), "-2.0");
        assert_eq!(ceil_decimal(&rat(-199, 100), 1), "-1.9");
    }

    #[test]
    fn render_known_values() {
        // √(π/8) to six digits
        let v = ExactConstant::new(BigRational::one(), -3, true);
        let d = v.to_decimal(6).unwrap();
        assert_eq!(d.text, "0.626657");
        assert!(d.abs_error < BigRational::new(BigInt::one(), pow10(6)));
        // plain rational
        let r = ExactConstant::from_rational(rat(7, 5));
        assert_eq!(r.to_decimal(3).unwrap().text, "1.400");
        // zero pads out
        assert_eq!(ExactConstant::zero().to_decimal(4).unwrap().text, "0.0000");
        // digits guard
        assert!(matches!(
            ExactConstant::one().to_decimal(0),
            Err(ExactError::DigitsOutOfRange(0))
        ));
        assert!(matches!(
            ExactConstant::one().to_decimal(10_001),
            Err(ExactError::DigitsOutOfRange(_))
        ));
        // negative surd
        let neg = ExactConstant::new(rat(-1, 1), -3, true);
        assert_eq!(neg.to_decimal(6).unwrap().text, "-0.626657");
    }

    #[test]
    fn render_large_rational_factor_stays_within_bound() {
        // q = 10^30/7 times √2: the magnitude guard has to stretch precision
        let q = BigRational::new(pow10(30), BigInt::from(7));
        let v = ExactConstant::new(q, 1, false);
        let d = v.to_decimal(8).unwrap();
        assert!(d.abs_error < BigRational::new(BigInt::one(), pow10(8)));
        let expect = 1e30 / 7.0 * std::f64::consts::SQRT_2;
        let got: f64 = d.text.parse().unwrap();
        assert!((got / expect - 1.0).abs() < 1e-12);
    }
}
