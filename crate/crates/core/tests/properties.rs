use std::f64::consts::PI;

use proptest::prelude::*;

use rss_reflect::detector::{prob_detection, prob_false_alarm, roc_point, threshold_for_pf};
use rss_reflect::energy::{average_energy, channel_energy, energy, ChannelSet, EnergyMode};
use rss_reflect::model::{signal_power, zeta, LinkGeometry, Point, ReflectionParams, ZetaMode, E_HAT};
use rss_reflect::specfun::{dilog, inv_reg_upper_gamma, reg_lower_gamma, reg_upper_gamma};

/// Mean of `f` over one period of `phase` by the midpoint rule, which is
/// exact for trigonometric polynomials of degree below `n`.
fn period_mean<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    (0..n).map(|k| f(2.0 * PI * (k as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_and_series_forms_agree(gamma in 0.0f64..0.7, delta in 0.0f64..6.0, beta in 7.0f64..9.0) {
        let p = ReflectionParams::new(gamma, 3.0, delta).unwrap();
        let a = zeta(&p, 3.0, beta, ZetaMode::Closed);
        let b = zeta(&p, 3.0, beta, ZetaMode::Series(200));
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn power_over_a_period_is_dilog(gamma in 0.05f64..0.7, d in 1.0f64..10.0) {
        // Parseval: P_ζ sums squared cosine amplitudes, so the period mean of
        // ζ² is half of it.
        let p = ReflectionParams::new(gamma, 3.0, 1.0).unwrap();
        let mean_sq = period_mean(|phase| {
            zeta(&p, d, phase / (2.0 * PI * p.delta()), ZetaMode::Closed).powi(2)
        }, 4096);
        let power = signal_power(&p, d);
        prop_assert!((2.0 * mean_sq - power).abs() < 1e-9 * power);
    }

    #[test]
    fn harmonic_coefficients_by_projection(gamma in 0.05f64..0.7, i in 1u32..6) {
        let p = ReflectionParams::new(gamma, 3.0, 1.0).unwrap();
        let coef = 2.0 * period_mean(|phase| {
            zeta(&p, 3.0, phase / (2.0 * PI), ZetaMode::Closed) * (i as f64 * phase).cos()
        }, 4096);
        prop_assert!((coef - p.harmonic(3.0, i)).abs() < 1e-10);
        // ζ carries no DC component.
        let dc = period_mean(|phase| zeta(&p, 3.0, phase / (2.0 * PI), ZetaMode::Closed), 4096);
        prop_assert!(dc.abs() < 1e-10);
    }

    #[test]
    fn excess_path_symmetric_about_los(x in -2.0f64..5.0, y in 0.0f64..3.0) {
        let g = LinkGeometry::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0)).unwrap();
        let up = g.excess_path_length(Point::new(x, y));
        let down = g.excess_path_length(Point::new(x, -y));
        prop_assert!((up - down).abs() < 1e-12);
        prop_assert!(up >= 0.0);
    }

    #[test]
    fn two_term_closed_form_matches_channel_sum(gamma in 0.1f64..0.7, delta in 0.001f64..4.0, count in 1usize..17) {
        let ch = ChannelSet::uniform(2.405e9, 5e6, count, 3e8).unwrap();
        let p = ReflectionParams::new(gamma, 3.0, delta).unwrap();
        let brute = channel_energy(&p, 3.0, &ch, ZetaMode::TwoTerm);
        let closed = energy(&p, 3.0, &ch, EnergyMode::ClosedTwoTerm).unwrap().value;
        prop_assert!((closed - brute).abs() <= 1e-9 * brute.max(1e-12));
    }

    #[test]
    fn average_energy_monotone(gamma in 0.1f64..0.7, delta in 0.0f64..4.0, d in 0.5f64..20.0) {
        let p = ReflectionParams::new(gamma, 3.0, delta).unwrap();
        prop_assert!(average_energy(&p, d * 1.01, 16) >= average_energy(&p, d, 16));
        let farther = p.with_delta(delta + 0.1).unwrap();
        prop_assert!(average_energy(&farther, d, 16) <= average_energy(&p, d, 16));
    }

    #[test]
    fn threshold_round_trip(c in 1usize..33, sigma in 0.05f64..5.0, lpf in -10.0f64..-0.5) {
        let pf = 10f64.powf(lpf);
        let x = threshold_for_pf(c, sigma, pf).unwrap();
        let back = prob_false_alarm(c, sigma, x).unwrap();
        prop_assert!((back - pf).abs() <= 1e-8 * pf);
    }

    #[test]
    fn detection_monotone(c in 1usize..17, e in 0.0f64..50.0, lpf in -8.0f64..-1.0) {
        let pf = 10f64.powf(lpf);
        let lo = roc_point(c, 1.0, e, pf).unwrap();
        let hi = roc_point(c, 1.0, e + 1.0, pf).unwrap();
        prop_assert!(hi >= lo);
        prop_assert!(lo >= pf * (1.0 - 1e-8));
        let x = threshold_for_pf(c, 1.0, pf).unwrap();
        let looser = prob_detection(c, 1.0, e, 0.9 * x).unwrap();
        prop_assert!(looser >= lo);
    }

    #[test]
    fn incomplete_gamma_complement(s in 0.1f64..40.0, x in 0.0f64..80.0) {
        let sum = reg_lower_gamma(s, x).unwrap() + reg_upper_gamma(s, x).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_gamma_round_trip(s in 0.5f64..20.0, lp in -12.0f64..-0.01) {
        let p = 10f64.powf(lp);
        let x = inv_reg_upper_gamma(s, p).unwrap();
        prop_assert!((reg_upper_gamma(s, x).unwrap() - p).abs() <= 1e-9 * p);
    }

    #[test]
    fn dilog_series(x in 0.0f64..0.9) {
        let series: f64 = (1..2000).map(|k| x.powi(k) / (k as f64).powi(2)).sum();
        prop_assert!((dilog(x).unwrap() - series).abs() < 1e-13);
    }
}

#[test]
fn ripple_scale_factor() {
    assert!((E_HAT - 4.342_944_819_032_518).abs() < 1e-14);
}
