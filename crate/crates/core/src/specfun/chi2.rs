//! Scaled central and non-central chi-square distributions.
//!
//! `Y = Σ_{l=1}^{C} (m_l + ν_l)²` with `ν_l ~ N(0, σ²)` i.i.d. has `C`
//! degrees of freedom, scale `σ²` and non-centrality `μ = Σ m_l²`.

use serde::Serialize;

use super::gamma::{ln_gamma, reg_lower_gamma, reg_upper_gamma};
use crate::error::{Error, Result};

/// Poisson tail mass below which the mixture series is truncated.
const MIXTURE_TAIL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Chi2Spec {
    dof: u32,
    scale: f64,
    noncentrality: f64,
}

impl Chi2Spec {
    /// `dof ≥ 1`, `scale = σ² > 0`, `noncentrality = μ ≥ 0`.
    pub fn new(dof: u32, scale: f64, noncentrality: f64) -> Result<Self> {
        if dof == 0 {
            return Err(Error::invalid("dof", "must be at least 1"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::invalid("scale", format!("{scale} must be positive")));
        }
        if !(noncentrality >= 0.0) || !noncentrality.is_finite() {
            return Err(Error::invalid(
                "noncentrality",
                format!("{noncentrality} must be >= 0"),
            ));
        }
        Ok(Chi2Spec {
            dof,
            scale,
            noncentrality,
        })
    }

    pub fn dof(&self) -> u32 {
        self.dof
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn noncentrality(&self) -> f64 {
        self.noncentrality
    }

    pub fn mean(&self) -> f64 {
        self.dof as f64 * self.scale + self.noncentrality
    }
}

/// Sums `Σ_j Pois(j; λ)·term(C/2 + j)` outward from the Poisson mode, stopping
/// each direction once the remaining Poisson mass is below `MIXTURE_TAIL`.
fn poisson_mixture(lambda: f64, shape: f64, term: impl Fn(f64) -> f64) -> f64 {
    if lambda == 0.0 {
        return term(shape);
    }
    let log_weight = |j: f64| -lambda + j * lambda.ln() - ln_gamma(j + 1.0);
    let mode = lambda.floor();
    let mut sum = 0.0;

    let mut j = mode;
    loop {
        let w = log_weight(j).exp();
        sum += w * term(shape + j);
        // Weights above the mode fall at least geometrically with ratio λ/(j+1).
        let ratio = lambda / (j + 1.0);
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < MIXTURE_TAIL {
            break;
        }
        j += 1.0;
    }

    let mut j = mode - 1.0;
    while j >= 0.0 {
        let w = log_weight(j).exp();
        sum += w * term(shape + j);
        // Below the mode the ratio w_{j-1}/w_j = j/λ.
        let ratio = j / lambda;
        if ratio < 1.0 && w * ratio / (1.0 - ratio) < MIXTURE_TAIL {
            break;
        }
        j -= 1.0;
    }
    sum
}

/// Survival function `P{Y > x}`.
///
/// Evaluated as the Poisson mixture
/// `Σ_j e^{−λ}λʲ/j! · Q(C/2 + j, x/2σ²)` with `λ = μ/2σ²`, which holds for
/// every integer `C ≥ 1`. With `μ = 0` this is exactly `Q(C/2, x/2σ²)`.
pub fn noncentral_chi2_sf(spec: &Chi2Spec, x: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    let half = x / (2.0 * spec.scale);
    let lambda = spec.noncentrality / (2.0 * spec.scale);
    let sum = poisson_mixture(lambda, 0.5 * spec.dof as f64, |s| {
        reg_upper_gamma(s, half).expect("valid gamma arguments")
    });
    sum.clamp(0.0, 1.0)
}

/// Distribution function `P{Y ≤ x}`, summed directly rather than as `1 − sf`.
pub fn noncentral_chi2_cdf(spec: &Chi2Spec, x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let half = x / (2.0 * spec.scale);
    let lambda = spec.noncentrality / (2.0 * spec.scale);
    let sum = poisson_mixture(lambda, 0.5 * spec.dof as f64, |s| {
        reg_lower_gamma(s, half).expect("valid gamma arguments")
    });
    sum.clamp(0.0, 1.0)
}

/// Central density
/// `x^{C/2−1} e^{−x/2σ²} / ((2σ²)^{C/2} Γ(C/2))`.
pub fn central_chi2_pdf(dof: u32, scale: f64, x: f64) -> f64 {
    let k = 0.5 * dof as f64;
    if x <= 0.0 {
        return match dof {
            1 => f64::INFINITY,
            2 => 1.0 / (2.0 * scale),
            _ => 0.0,
        };
    }
    ((k - 1.0) * x.ln() - x / (2.0 * scale) - k * (2.0 * scale).ln() - ln_gamma(k)).exp()
}

/// `ln I_v(z)` from the ascending series, summed in log space.
fn ln_bessel_i(v: f64, z: f64) -> f64 {
    let ln_half = (0.5 * z).ln();
    let ln_term = |k: f64| (2.0 * k + v) * ln_half - ln_gamma(k + 1.0) - ln_gamma(k + v + 1.0);
    // Terms peak near k ≈ z/2.
    let peak = (0.5 * z).floor().max(0.0);
    let max = ln_term(peak);
    let mut sum = 0.0;
    let mut k = peak;
    loop {
        let t = (ln_term(k) - max).exp();
        sum += t;
        if t < 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    let mut k = peak - 1.0;
    while k >= 0.0 {
        let t = (ln_term(k) - max).exp();
        sum += t;
        if t < 1e-17 * sum {
            break;
        }
        k -= 1.0;
    }
    max + sum.ln()
}

/// Density of `Y`:
/// `(x/μ)^{(C−2)/4} / (2σ²) · e^{−(x+μ)/2σ²} · I_{C/2−1}(√(μx)/σ²)`,
/// reducing to [`central_chi2_pdf`] when `μ = 0`.
pub fn noncentral_chi2_pdf(spec: &Chi2Spec, x: f64) -> f64 {
    let (c, s2, mu) = (spec.dof as f64, spec.scale, spec.noncentrality);
    if mu == 0.0 {
        return central_chi2_pdf(spec.dof, s2, x);
    }
    if x <= 0.0 {
        return match spec.dof {
            1 => f64::INFINITY,
            2 => (-mu / (2.0 * s2)).exp() / (2.0 * s2),
            _ => 0.0,
        };
    }
    let v = 0.5 * c - 1.0;
    let z = (mu * x).sqrt() / s2;
    let ln_pdf = 0.5 * v * (x / mu).ln() - (2.0 * s2).ln() - (x + mu) / (2.0 * s2)
        + ln_bessel_i(v, z);
    ln_pdf.exp()
}
