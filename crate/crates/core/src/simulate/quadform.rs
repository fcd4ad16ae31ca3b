//! Distribution of `y = Σ x_i²` for independent `x_i ~ N(m_i, σ_i²)` via its
//! characteristic function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Default absolute tolerance for [`sf_via_cf_inversion`].
pub const DEFAULT_CF_TOLERANCE: f64 = 1e-8;

/// Hard cap on half-period panels before giving up.
const MAX_PANELS: usize = 2_000_000;

/// Means and variances of the independent Gaussian components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormSpec {
    means: Vec<f64>,
    variances: Vec<f64>,
}

impl QuadraticFormSpec {
    pub fn new(means: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::invalid("means", "at least one component required"));
        }
        if means.len() != variances.len() {
            return Err(Error::LengthMismatch {
                expected: means.len(),
                actual: variances.len(),
            });
        }
        if variances.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid("variances", "must be positive and finite"));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::invalid("means", "must be finite"));
        }
        Ok(QuadraticFormSpec { means, variances })
    }

    /// Equal variance `sigma²` for every component.
    pub fn isotropic(means: Vec<f64>, sigma: f64) -> Result<Self> {
        let variances = vec![sigma * sigma; means.len()];
        Self::new(means, variances)
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    fn ln_cf(&self, omega: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&m, &v) in self.means.iter().zip(&self.variances) {
            let denom = Complex64::new(1.0, -2.0 * omega * v);
            acc += Complex64::new(0.0, omega * m * m) / denom - 0.5 * denom.ln();
        }
        acc
    }
}

/// `ψ(ω) = Π exp(jω m_i² / (1 − j2ωσ_i²)) · (1 − j2ωσ_i²)^{−1/2}`.
pub fn quadratic_cf(spec: &QuadraticFormSpec, omega: f64) -> Complex64 {
    spec.ln_cf(omega).exp()
}

/// `P{y > x}` by Gil-Pelaez inversion with the default tolerance.
pub fn sf_via_cf_inversion(spec: &QuadraticFormSpec, x: f64) -> Result<f64> {
    sf_via_cf_inversion_with_tol(spec, x, DEFAULT_CF_TOLERANCE)
}

/// `P{y > x} = ½ + (1/π)·∫₀^∞ Im[e^{−jωx}ψ(ω)]/ω dω`.
///
/// The range is cut at `W` where the envelope bound on the remaining tail
/// drops below `tol/2`; `[0, W]` is split into panels of at most half an
/// oscillation period, each integrated adaptively.
pub fn sf_via_cf_inversion_with_tol(spec: &QuadraticFormSpec, x: f64, tol: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("{x} must be positive")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let cutoff = truncation_point(spec, 0.5 * tol)?;
    let max_var = spec.variances.iter().cloned().fold(0.0, f64::max);
    let width = (PI / x).min(0.5 / max_var);
    let panels = (cutoff / width).ceil() as usize;
    if panels > MAX_PANELS {
        return Err(Error::NoConvergence {
            routine: "sf_via_cf_inversion",
            detail: format!("truncation at ω={cutoff:.3e} needs {panels} panels"),
        });
    }
    let integrand = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        let z = (spec.ln_cf(w) + Complex64::new(0.0, -w * x)).exp();
        z.im / w
    };
    let panel_tol = 0.5 * tol * PI / panels as f64;
    let mut total = 0.0;
    let mut failed = 0usize;
    for k in 0..panels {
        let a = k as f64 * width;
        let b = ((k + 1) as f64 * width).min(cutoff);
        let r = integrate(&integrand, a, b, panel_tol, 40);
        if !r.converged {
            failed += 1;
        }
        total += r.value;
    }
    if failed > 0 {
        return Err(Error::NoConvergence {
            routine: "sf_via_cf_inversion",
            detail: format!("{failed} of {panels} panels missed tolerance"),
        });
    }
    Ok((0.5 + total / PI).clamp(0.0, 1.0))
}

/// Smallest `W` (found by doubling then bisection) with
/// `(1/π)·Π(2σ_i²)^{−1/2}·exp(−Σ 2W²σ_i²m_i²/(1+4W²σ_i⁴))·W^{−N/2}/(N/2) ≤ tol`.
fn truncation_point(spec: &QuadraticFormSpec, tol: f64) -> Result<f64> {
    let half_n = 0.5 * spec.len() as f64;
    let ln_bound = |w: f64| {
        let mut ln = -PI.ln() - half_n.ln() - half_n * w.ln();
        for (&m, &v) in spec.means.iter().zip(&spec.variances) {
            ln -= 0.5 * (2.0 * v).ln();
            ln -= 2.0 * w * w * v * m * m / (1.0 + 4.0 * w * w * v * v);
        }
        ln
    };
    let target = tol.ln();
    let mut hi = 1.0;
    while ln_bound(hi) > target {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::NoConvergence {
                routine: "sf_via_cf_inversion",
                detail: "tail bound does not decay".into(),
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid > 0.0 && ln_bound(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Seeded Monte Carlo estimate of `P{y > x}` over `draws` samples.
pub fn sample_exceedance(spec: &QuadraticFormSpec, x: f64, draws: u64, seed: u64) -> f64 {
    const CHUNK: u64 = 1 << 16;
    let chunks = draws.div_ceil(CHUNK);
    let sds: Vec<f64> = spec.variances.iter().map(|v| v.sqrt()).collect();
    let counts: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let n = CHUNK.min(draws - c * CHUNK);
            let mut hits = 0;
            for _ in 0..n {
                let y: f64 = spec
                    .means
                    .iter()
                    .zip(&sds)
                    .map(|(m, s)| {
                        let g: f64 = rng.sample(StandardNormal);
                        (m + s * g).powi(2)
                    })
                    .sum();
                if y > x {
                    hits += 1;
                }
            }
            hits
        })
        .collect();
    counts.iter().sum::<u64>() as f64 / draws as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{noncentral_chi2_sf, reg_upper_gamma, Chi2Spec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn cf_at_origin() {
        let spec = QuadraticFormSpec::new(vec![1.0, -2.0], vec![0.5, 3.0]).unwrap();
        let v = quadratic_cf(&spec, 0.0);
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cf_central_reduction() {
        let spec = QuadraticFormSpec::isotropic(vec![0.0; 4], 1.0).unwrap();
        let got = quadratic_cf(&spec, 0.1);
        let want = Complex64::new(1.0, -0.2).powi(-2);
        assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-14);
        assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(QuadraticFormSpec::new(vec![0.0], vec![0.0]).is_err());
        assert!(QuadraticFormSpec::new(vec![0.0, 1.0], vec![1.0]).is_err());
        let spec = QuadraticFormSpec::isotropic(vec![0.0; 2], 1.0).unwrap();
        assert!(sf_via_cf_inversion(&spec, 0.0).is_err());
    }

    #[test]
    fn central_threshold_anchor() {
        let spec = QuadraticFormSpec::isotropic(vec![0.0; 16], 1.0).unwrap();
        let sf = sf_via_cf_inversion(&spec, 53.6117).unwrap();
        let direct = reg_upper_gamma(8.0, 53.6117 / 2.0).unwrap();
        assert_abs_diff_eq!(sf, direct, epsilon = 1e-8);
        assert_abs_diff_eq!(sf, 6e-6, epsilon = 1e-7);
    }

    #[test]
    fn noncentral_agrees_with_poisson_mixture() {
        let means = vec![0.3, -0.1, 0.8, 0.5, 0.0, 0.2];
        let sigma = 0.5;
        let spec = QuadraticFormSpec::isotropic(means.clone(), sigma).unwrap();
        let mu: f64 = means.iter().map(|m| m * m).sum();
        let chi = Chi2Spec::new(6, sigma * sigma, mu).unwrap();
        for x in [0.5, 1.5, 3.0, 6.0] {
            let a = sf_via_cf_inversion(&spec, x).unwrap();
            assert_abs_diff_eq!(a, noncentral_chi2_sf(&chi, x), epsilon = 1e-6);
        }
    }

    #[test]
    fn unequal_variances_vs_sampling() {
        let spec = QuadraticFormSpec::new(vec![0.0; 3], vec![1.0, 2.0, 3.0]).unwrap();
        let sf = sf_via_cf_inversion(&spec, 5.0).unwrap();
        let n = 400_000;
        let rate = sample_exceedance(&spec, 5.0, n, 11);
        let sd = (sf * (1.0 - sf) / n as f64).sqrt();
        assert!((rate - sf).abs() < 4.0 * sd, "{rate} vs {sf}");
    }
}
