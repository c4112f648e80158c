//! Cross-module validation: simulation against closed forms and the series
//! machinery against simulation, at desk scales with documented budgets.

use iselab::asymptotics::{mgf_series, MgfKind};
use iselab::beta::certified_beta_f64;
use iselab::moments::MomentTable;
use iselab::sim::{
    eta_stat_fast, sample_discrete_snake, sample_excursion, sample_s_conditional,
};
use iselab::stats::{moment_standard_error, par_samples, raw_moments, standard_error};
use iselab::trees::{wiener_scaling_report, Convention};

const SEED: u64 = 42;

#[test]
fn mgf_series_matches_monte_carlo() {
    let table = MomentTable::new(50);
    let beta = certified_beta_f64(&table).expect("beta");
    let moments: Vec<_> = (0..=50).map(|k| table.eta_moment(k).clone()).collect();
    let series = mgf_series(&moments, 1.0, 1e-8, MgfKind::Eta, beta).expect("certifies");

    let grid_n = 1000usize;
    let n_samples = 30_000usize;
    let exp_eta: Vec<f64> = par_samples(n_samples, SEED, 0, |rng, _| {
        eta_stat_fast(&sample_excursion(grid_n, rng)).exp()
    });
    let mc_mean = raw_moments(&exp_eta, 1)[0];
    // d/dη e^η ≈ e^η near the mean, so the grid allowance carries over with
    // an O(1) factor; the measured η̂ bias is far below it anyway
    let budget = 3.0 * standard_error(&exp_eta) + 2.0 / (grid_n as f64).sqrt();
    assert!(
        (series.value() - mc_mean).abs() < budget,
        "series {} vs MC {} (budget {budget})",
        series.value(),
        mc_mean
    );
}

#[test]
fn odd_s_moments_vanish() {
    let s: Vec<f64> = par_samples(30_000, SEED, 0, |rng, _| {
        let p = sample_excursion(500, rng);
        sample_s_conditional(&p, rng)
    });
    let m = raw_moments(&s, 3);
    assert!(m[0].abs() < 3.0 * moment_standard_error(&s, 1), "mean {}", m[0]);
    assert!(m[2].abs() < 3.0 * moment_standard_error(&s, 3), "third {}", m[2]);
}

#[test]
fn snake_variance_hits_eta_mean_with_grid_allowance() {
    let n = 2000usize;
    let s: Vec<f64> = par_samples(30_000, SEED, 0, |rng, _| {
        sample_discrete_snake(n, rng).s_value
    });
    let m2 = raw_moments(&s, 2)[1];
    let target = (std::f64::consts::PI / 8.0).sqrt();
    let budget = 3.0 * moment_standard_error(&s, 2) + 1.0 / (n as f64).sqrt();
    assert!(
        (m2 - target).abs() < budget,
        "Var(s_value) = {m2} vs {target} (budget {budget})"
    );
}

#[test]
fn wiener_mean_trends_toward_target() {
    let mut prev: Option<(f64, f64)> = None;
    for n in [250usize, 500, 1000, 2000] {
        let rep = wiener_scaling_report(n, 3000, SEED, Convention::Ordered);
        let (mean, se) = (rep.report.mean, rep.report.std_error);
        if let Some((m0, se0)) = prev {
            assert!(
                mean >= m0 - 3.0 * (se + se0),
                "mean did not trend up: {m0} -> {mean} at n = {n}"
            );
        }
        prev = Some((mean, se));
    }
    let (last_mean, last_se) = prev.unwrap();
    let target = (std::f64::consts::PI / 8.0).sqrt();
    assert!((last_mean - target).abs() < 3.0 * last_se + 2.0 / (2000f64).sqrt());
}

#[test]
fn head_at_random_time_has_decaying_tails() {
    // qualitative decay only; the tail constant is outside this crate's scope
    let w: Vec<f64> = par_samples(40_000, SEED, 0, |rng, _| {
        sample_discrete_snake(500, rng).head_at_uniform_time(rng)
    });
    let p = |x: f64| w.iter().filter(|&&v| v > x).count() as f64 / w.len() as f64;
    let (p05, p10, p15, p20) = (p(0.5), p(1.0), p(1.5), p(2.0));
    assert!(p05 > p10 && p10 > p15 && p15 > p20, "{p05} {p10} {p15} {p20}");
    // faster-than-geometric decay across equal steps; the stretched
    // exponential keeps the far tail visible much longer than a Gaussian
    assert!(p15 / p10 < p10 / p05);
    assert!(p(3.0) < 0.01);
}
