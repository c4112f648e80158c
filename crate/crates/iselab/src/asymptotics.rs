//! Asymptotic formulas, moment generating functions and tail bounds.
//!
//! Everything here is evaluated in the log domain: the moment asymptotes grow
//! like k^{3k/2}, which leaves the double range near k ≈ 120, and the MGF
//! asymptotes carry exp(t²/10)-sized factors. Linear-scale convenience
//! wrappers saturate to ∞ where the value genuinely overflows.

use crate::exact::ExactConstant;
use crate::moments::MomentTable;
use serde::Serialize;
use thiserror::Error;

/// Default tail-bound prefactor for η, ≈ 2π^{3/2}β/5^{1/2}.
pub const DEFAULT_K1: f64 = 4.9;
/// Default tail-bound prefactor for S, ≈ 10^{1/6}βπ^{3/2}/5.
pub const DEFAULT_K2: f64 = 1.6;
/// Safety multiplier applied by domination checks; the prefactors are proven
/// only for large x, so checks run with K·1.05.
pub const SAFETY_FACTOR: f64 = 1.05;

#[derive(Debug, Error, PartialEq)]
pub enum AsymError {
    #[error("tail bounds are only stated for x >= 1 (got {0})")]
    TailDomain(f64),
    #[error("parameter out of the convergent range: {0}")]
    Divergent(String),
    #[error("the c constant requires p > 1 (got p = {0})")]
    CRequiresPAboveOne(f64),
    #[error("constants must be positive")]
    NonpositiveConstant,
    #[error("cannot certify series truncation: {0}")]
    CannotCertify(String),
}

fn ln_pi() -> f64 {
    std::f64::consts::PI.ln()
}

/// ln of the common prefactor 2π^{3/2}β/5 in the moment asymptotics.
fn ln_moment_prefactor(beta: f64) -> f64 {
    (2.0 * beta / 5.0).ln() + 1.5 * ln_pi()
}

/// β·50^{k−1}·((k−1)!)², the a_k asymptote. Exact to ~1e−13 relative; returns
/// ∞ once the value leaves the double range (k ≳ 95).
pub fn a_asymptote(k: usize, beta: f64) -> f64 {
    a_asymptote_ln(k, beta).exp()
}

pub fn a_asymptote_ln(k: usize, beta: f64) -> f64 {
    assert!(k >= 1);
    beta.ln() + (k as f64 - 1.0) * 50f64.ln() + 2.0 * ln_factorial(k as u64 - 1)
}

/// ln k! by direct summation; exact f64 products below 21!.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 21 {
        return ((1..=n).product::<u64>().max(1) as f64).ln();
    }
    let mut acc = ln_factorial(20);
    for i in 21..=n {
        acc += (i as f64).ln();
    }
    acc
}

/// ln of the E[η^k] asymptote (2π^{3/2}β/5)·k^{1/2}·(5e)^{−k/2}·k^{k/2}.
pub fn eta_moment_asymptote_ln(k: usize, beta: f64) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    ln_moment_prefactor(beta) + 0.5 * kf.ln() + 0.5 * kf * (kf.ln() - 5f64.ln() - 1.0)
}

pub fn eta_moment_asymptote(k: usize, beta: f64) -> f64 {
    eta_moment_asymptote_ln(k, beta).exp()
}

/// ln of the E[S^{2k}] asymptote with m = 2k:
/// (2π^{3/2}β/5)·m^{1/2}·(10e³)^{−m/4}·m^{3m/4}.
pub fn s_moment_asymptote_ln(two_k: usize, beta: f64) -> f64 {
    assert!(two_k >= 2 && two_k.is_multiple_of(2));
    let m = two_k as f64;
    ln_moment_prefactor(beta) + 0.5 * m.ln() + 0.75 * m * m.ln()
        - 0.25 * m * (10f64.ln() + 3.0)
}

pub fn s_moment_asymptote(two_k: usize, beta: f64) -> f64 {
    s_moment_asymptote_ln(two_k, beta).exp()
}

/// ln of the E[ξ^k] asymptote 3√2·k·(3e)^{−k/2}·k^{k/2}.
pub fn xi_moment_asymptote_ln(k: usize) -> f64 {
    assert!(k >= 1);
    let kf = k as f64;
    (3.0 * std::f64::consts::SQRT_2).ln() + kf.ln() + 0.5 * kf * (kf.ln() - 3f64.ln() - 1.0)
}

pub fn xi_moment_asymptote(k: usize) -> f64 {
    xi_moment_asymptote_ln(k).exp()
}

/// ln of the MGF asymptote for η: (2π)^{3/2}β/5^{3/2}·t·e^{t²/10}.
pub fn mgf_asymptote_eta_ln(t: f64, beta: f64) -> f64 {
    assert!(t > 0.0);
    1.5 * (2.0 * std::f64::consts::PI).ln() + beta.ln() - 1.5 * 5f64.ln() + t.ln() + t * t / 10.0
}

pub fn mgf_asymptote_eta(t: f64, beta: f64) -> f64 {
    mgf_asymptote_eta_ln(t, beta).exp()
}

/// ln of the MGF asymptote for S: 2^{1/2}π^{3/2}β/5^{3/2}·t²·e^{t⁴/40}.
pub fn mgf_asymptote_s_ln(t: f64, beta: f64) -> f64 {
    assert!(t > 0.0);
    0.5 * 2f64.ln() + 1.5 * ln_pi() + beta.ln() - 1.5 * 5f64.ln()
        + 2.0 * t.ln()
        + t.powi(4) / 40.0
}

pub fn mgf_asymptote_s(t: f64, beta: f64) -> f64 {
    mgf_asymptote_s_ln(t, beta).exp()
}

/// Which moment family a series belongs to; picks the growth majorant used to
/// certify truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgfKind {
    Eta,
    S,
}

/// A certified partial MGF sum.
#[derive(Debug, Clone, Serialize)]
pub struct MgfSeries {
    pub ln_value: f64,
    pub terms_used: usize,
    /// Certified bound on (true − partial)/partial.
    pub rel_error_bound: f64,
}

impl MgfSeries {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Σ_k m_k·t^k/k! over the supplied moments (m_k = moments[k]; odd entries of
/// an S list are zero and drop out). The unsummed tail is majorized by twice
/// the closed-form moment asymptote — the exact/asymptote ratio is checked to
/// stay below 2 for every k in the tests — and the call fails if that bound
/// cannot be pushed under `tol` relative to the partial sum.
// negated comparisons so a NaN bound fails certification
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn mgf_series(
    moments: &[ExactConstant],
    t: f64,
    tol: f64,
    kind: MgfKind,
    beta: f64,
) -> Result<MgfSeries, AsymError> {
    assert!(t >= 0.0, "series is used for t ≥ 0");
    assert!(tol > 0.0);
    if moments.is_empty() {
        return Err(AsymError::CannotCertify("no moments supplied".into()));
    }
    let k_max = moments.len() - 1;
    let ln_t = if t > 0.0 { t.ln() } else { f64::NEG_INFINITY };
    let mut terms = Vec::with_capacity(moments.len());
    let mut ln_fact = 0.0;
    for (k, m) in moments.iter().enumerate() {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        if m.is_zero() || (k > 0 && t == 0.0) {
            continue;
        }
        assert!(m.signum() > 0, "moments of nonnegative powers are positive");
        let ln_power = if k > 0 { k as f64 * ln_t } else { 0.0 };
        terms.push(m.ln_abs() + ln_power - ln_fact);
    }
    let ln_partial = log_sum_exp(&terms);
    if t == 0.0 {
        return Ok(MgfSeries {
            ln_value: ln_partial,
            terms_used: terms.len(),
            rel_error_bound: 0.0,
        });
    }

    // Tail bound: Σ_{k>k_max} 2·asym(k)·t^k/k!, summed in the log domain while
    // the terms decrease; if they are still growing at k_max the series peak
    // lies beyond the supplied moments and nothing can be certified.
    let asym_term_ln = |k: usize, ln_fact_k: f64| -> f64 {
        let ln_m = match kind {
            MgfKind::Eta => eta_moment_asymptote_ln(k, beta),
            MgfKind::S => {
                if !k.is_multiple_of(2) {
                    return f64::NEG_INFINITY;
                }
                s_moment_asymptote_ln(k, beta)
            }
        };
        2f64.ln() + ln_m + k as f64 * ln_t - ln_fact_k
    };
    let mut ln_fact_k = ln_factorial(k_max as u64);
    let mut prev = asym_term_ln(k_max.max(1), ln_fact_k);
    let mut tail_terms = Vec::new();
    let mut k = k_max;
    loop {
        k += 1;
        ln_fact_k += (k as f64).ln();
        let cur = asym_term_ln(k, ln_fact_k);
        if cur.is_finite() {
            if cur >= prev && k <= k_max + 2 {
                return Err(AsymError::CannotCertify(format!(
                    "terms still growing at order {k_max}; supply more moments"
                )));
            }
            tail_terms.push(cur);
            if cur < ln_partial + tol.ln() - 35.0 {
                break;
            }
            prev = cur;
        }
        if k > k_max + 200_000 {
            return Err(AsymError::CannotCertify(
                "tail did not decay within the iteration budget".into(),
            ));
        }
    }
    let ln_tail = log_sum_exp(&tail_terms);
    let rel = (ln_tail - ln_partial).exp();
    if !(rel < tol) {
        return Err(AsymError::CannotCertify(format!(
            "certified tail bound {rel:.3e} exceeds tol {tol:.3e} at order {k_max}"
        )));
    }
    Ok(MgfSeries {
        ln_value: ln_partial,
        terms_used: terms.len(),
        rel_error_bound: rel,
    })
}

fn log_sum_exp(ls: &[f64]) -> f64 {
    let m = ls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + ls.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// K₁·x·exp(−(5/2)x²), stated for x ≥ 1.
pub fn tail_bound_eta(x: f64, k1: f64) -> Result<f64, AsymError> {
    if x < 1.0 {
        return Err(AsymError::TailDomain(x));
    }
    Ok(k1 * x * (-2.5 * x * x).exp())
}

/// K₂·x^{2/3}·exp(−(3/4)·10^{1/3}·x^{4/3}), stated for x ≥ 1.
pub fn tail_bound_s(x: f64, k2: f64) -> Result<f64, AsymError> {
    if x < 1.0 {
        return Err(AsymError::TailDomain(x));
    }
    Ok(k2 * x.powf(2.0 / 3.0) * (-0.75 * 10f64.cbrt() * x.powf(4.0 / 3.0)).exp())
}

/// The Kasahara–Davies constants tying together moment growth b, tail
/// exponent a and MGF growth c at index p (with conjugate q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailConstants {
    pub p: f64,
    /// Conjugate exponent, defined for p > 1.
    pub q: Option<f64>,
    pub a: f64,
    pub b: f64,
    /// MGF growth constant, defined for p > 1.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnownConstant {
    A(f64),
    B(f64),
    C(f64),
}

/// Complete the (a, b, c) triple from p and any one member, via
/// a = 1/(p·e·b^p), c = q^{−1}(pa)^{−(q−1)} and (pa)^q(qc)^p = 1.
// negated comparison so NaN parameters are rejected
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn kasahara_convert(p: f64, known: KnownConstant) -> Result<TailConstants, AsymError> {
    if !(p > 0.0) {
        return Err(AsymError::Divergent(format!("p must be positive, got {p}")));
    }
    let e = std::f64::consts::E;
    let q = if p > 1.0 { Some(p / (p - 1.0)) } else { None };
    let positive = |v: f64| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(AsymError::NonpositiveConstant)
        }
    };
    let (a, b) = match known {
        KnownConstant::B(b) => {
            let b = positive(b)?;
            (1.0 / (p * e * b.powf(p)), b)
        }
        KnownConstant::A(a) => {
            let a = positive(a)?;
            (a, (p * e * a).powf(-1.0 / p))
        }
        KnownConstant::C(c) => {
            let c = positive(c)?;
            let q = q.ok_or(AsymError::CRequiresPAboveOne(p))?;
            // (pa)^q (qc)^p = 1  ⇒  a = (qc)^{−p/q} / p
            let a = (q * c).powf(-p / q) / p;
            (a, (p * e * a).powf(-1.0 / p))
        }
    };
    let c = q.map(|q| (p * a).powf(-(q - 1.0)) / q);
    Ok(TailConstants { p, q, a, b, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L1Case {
    /// Σ k^b·k^{−γk}·x^k, convergent for γ > 0.
    PowerDecay,
    /// Σ k^b·k^{γk}·x^k/k!, convergent for γ < 1.
    Factorial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    All,
    Even,
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Eval {
    pub log_sum: f64,
    pub log_asymptote: f64,
    pub ratio: f64,
    pub terms: usize,
}

/// Numerically sum one of the two standard series and compare with its
/// closed-form asymptote; even-parity sums are compared against half the full
/// asymptote.
// negated comparison so a NaN argument is rejected
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn l1_sum(
    case: L1Case,
    gamma: f64,
    b_exp: f64,
    x: f64,
    parity: Parity,
) -> Result<L1Eval, AsymError> {
    if !(x > 0.0) {
        return Err(AsymError::Divergent(format!("x must be positive, got {x}")));
    }
    match case {
        L1Case::PowerDecay if gamma <= 0.0 => {
            return Err(AsymError::Divergent(format!(
                "case (i) needs gamma > 0, got {gamma}"
            )));
        }
        L1Case::Factorial if gamma >= 1.0 => {
            return Err(AsymError::Divergent(format!(
                "case (ii) needs gamma < 1, got {gamma}"
            )));
        }
        _ => {}
    }
    let ln_x = x.ln();
    let mut terms = Vec::new();
    let mut ln_fact = 0.0;
    let mut peak = f64::NEG_INFINITY;
    let mut running = f64::NEG_INFINITY;
    for k in 1..=20_000_000usize {
        let kf = k as f64;
        ln_fact += kf.ln();
        let lt = match case {
            L1Case::PowerDecay => b_exp * kf.ln() - gamma * kf * kf.ln() + kf * ln_x,
            L1Case::Factorial => b_exp * kf.ln() + gamma * kf * kf.ln() + kf * ln_x - ln_fact,
        };
        let counted = parity == Parity::All || k % 2 == 0;
        if counted {
            terms.push(lt);
            running = log_sum_exp_pair(running, lt);
        }
        peak = peak.max(lt);
        // relative contribution below 1e−16 and past the peak
        if lt < peak && lt < running + (1e-16f64).ln() {
            break;
        }
    }
    let log_sum = log_sum_exp(&terms);
    let mut log_asymptote = match case {
        L1Case::PowerDecay => {
            0.5 * ((2.0 * std::f64::consts::PI) / gamma).ln()
                + ((b_exp + 0.5) / gamma) * (ln_x - gamma)
                + gamma * ((ln_x - gamma) / gamma).exp()
        }
        L1Case::Factorial => {
            -0.5 * (1.0 - gamma).ln()
                + (b_exp / (1.0 - gamma)) * (gamma + ln_x)
                + (1.0 - gamma) * ((gamma + ln_x) / (1.0 - gamma)).exp()
        }
    };
    if parity == Parity::Even {
        log_asymptote -= 2f64.ln();
    }
    Ok(L1Eval {
        log_sum,
        log_asymptote,
        ratio: (log_sum - log_asymptote).exp(),
        terms: terms.len(),
    })
}

fn log_sum_exp_pair(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// One comparison row: an argument, the exact (or series) value when one
/// exists, the asymptote, and their ratio computed in the log domain.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticEval {
    pub argument: f64,
    pub exact: Option<f64>,
    pub asymptote: f64,
    pub ratio: Option<f64>,
}

impl AsymptoticEval {
    fn from_ln(argument: f64, ln_exact: Option<f64>, ln_asym: f64) -> Self {
        AsymptoticEval {
            argument,
            exact: ln_exact.map(f64::exp),
            asymptote: ln_asym.exp(),
            ratio: ln_exact.map(|le| (le - ln_asym).exp()),
        }
    }
}

/// a_k against β·50^{k−1}((k−1)!)².
pub fn eval_a(k: usize, table: &MomentTable, beta: f64) -> AsymptoticEval {
    let ln_exact = crate::exact::rational_ln_abs(
        &num_rational::BigRational::from_integer(table.a(k).clone()),
    );
    AsymptoticEval::from_ln(k as f64, Some(ln_exact), a_asymptote_ln(k, beta))
}

/// E[η^k] against its asymptote.
pub fn eval_eta_moment(k: usize, table: &MomentTable, beta: f64) -> AsymptoticEval {
    AsymptoticEval::from_ln(
        k as f64,
        Some(table.eta_moment(k).ln_abs()),
        eta_moment_asymptote_ln(k, beta),
    )
}

/// E[S^{2k}] against its asymptote.
pub fn eval_s_moment(k: usize, table: &MomentTable, beta: f64) -> AsymptoticEval {
    AsymptoticEval::from_ln(
        k as f64,
        Some(table.s_moment(2 * k).ln_abs()),
        s_moment_asymptote_ln(2 * k, beta),
    )
}

/// The ξ asymptote alone; the exact moments are outside this crate's scope.
pub fn eval_xi_moment(k: usize) -> AsymptoticEval {
    AsymptoticEval::from_ln(k as f64, None, xi_moment_asymptote_ln(k))
}
