//! Special functions checked against an independent implementation.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma;

use rss_reflect::specfun::{ln_gamma, normal_quantile, reg_lower_gamma, reg_upper_gamma};

#[test]
fn log_gamma() {
    for x in [0.1, 0.5, 1.0, 2.5, 8.0, 33.3, 170.0] {
        assert!((ln_gamma(x) - gamma::ln_gamma(x)).abs() < 1e-12 * gamma::ln_gamma(x).abs().max(1.0));
    }
}

#[test]
fn incomplete_gamma() {
    for s in [0.5, 1.0, 4.0, 8.0, 15.5] {
        for x in [0.01, 0.7, 3.0, 12.0, 26.8] {
            let lower = gamma::gamma_lr(s, x);
            let upper = gamma::gamma_ur(s, x);
            assert!((reg_lower_gamma(s, x).unwrap() - lower).abs() < 1e-12);
            assert!((reg_upper_gamma(s, x).unwrap() - upper).abs() <= 1e-10 * upper.max(1e-300));
        }
    }
}

#[test]
fn central_chi_square_tail() {
    let chi = ChiSquared::new(16.0).unwrap();
    let want = chi.sf(53.6117);
    let got = reg_upper_gamma(8.0, 53.6117 / 2.0).unwrap();
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn normal_inverse() {
    let n = Normal::new(0.0, 1.0).unwrap();
    for p in [1e-10, 1e-4, 0.02, 0.5, 0.9, 0.999] {
        assert!((normal_quantile(p) - n.inverse_cdf(p)).abs() < 1e-8);
    }
}
