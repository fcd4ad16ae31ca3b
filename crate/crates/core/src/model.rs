//! Single-bounce reflection model in the log-power domain.
//!
//! A person near (but not on) the line of sight adds a reflected component
//! whose excess path length `Δ` sets the period of an RSS ripple across
//! carrier frequency. In dB the ripple is
//!
//! ```text
//! ζ(β) = ê·ln(1 + A²) + ê·ln(1 − κ·cos(2πΔβ)),   κ = 2A / (1 + A²)
//!      = −2ê · Σ_{i≥1} (Aⁱ / i) · cos(2πiΔβ)
//! ```
//!
//! with `A = Γ·(1 + Δ/d)^(−η/2)` and `ê = 10·log₁₀(e)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::dilog;

/// `ê = 10·log₁₀(e)`, converts natural log to dB.
pub const E_HAT: f64 = 10.0 * std::f64::consts::LOG10_E;

/// Propagation speed used by default, m/s.
pub const DEFAULT_PROPAGATION_SPEED: f64 = 3.0e8;

/// Default path-loss exponent.
pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 3.0;

/// Default number of harmonics for [`ZetaMode::Series`].
pub const DEFAULT_SERIES_TERMS: usize = 60;

/// Range of reflection coefficients for which the model was validated.
pub const GAMMA_WORKING_BAND: (f64, f64) = (0.2, 0.7);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Transmitter and receiver positions in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkGeometry {
    tx: Point,
    rx: Point,
    distance: f64,
}

impl LinkGeometry {
    pub fn new(tx: Point, rx: Point) -> Result<Self> {
        let distance = tx.distance(&rx);
        if !(distance > 0.0) || !distance.is_finite() {
            return Err(Error::invalid(
                "geometry",
                "transmitter and receiver must be distinct finite points",
            ));
        }
        Ok(LinkGeometry { tx, rx, distance })
    }

    pub fn tx(&self) -> Point {
        self.tx
    }

    pub fn rx(&self) -> Point {
        self.rx
    }

    /// Line-of-sight distance `d`.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Extra length travelled by a wave bouncing off `p`:
    /// `|p − tx| + |p − rx| − d`, clamped at zero against rounding.
    pub fn excess_path_length(&self, p: Point) -> f64 {
        (p.distance(&self.tx) + p.distance(&self.rx) - self.distance).max(0.0)
    }
}

/// Reflection coefficient `Γ`, path-loss exponent `η` and excess path `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionParams {
    gamma: f64,
    eta: f64,
    delta: f64,
}

impl ReflectionParams {
    /// Requires `0 ≤ Γ < 1`, `η > 0` and `Δ ≥ 0`. Values of `Γ` outside the
    /// working band `[0.2, 0.7]` are accepted with a logged warning.
    pub fn new(gamma: f64, eta: f64, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::invalid("gamma", format!("{gamma} not in [0, 1)")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::invalid("eta", format!("{eta} must be positive")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid("delta", format!("{delta} must be >= 0")));
        }
        let (lo, hi) = GAMMA_WORKING_BAND;
        if gamma != 0.0 && !(lo..=hi).contains(&gamma) {
            log::warn!("reflection coefficient {gamma} outside the working band [{lo}, {hi}]");
        }
        Ok(ReflectionParams { gamma, eta, delta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same `Γ`, `η` with a different excess path length.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.gamma, self.eta, delta)
    }

    /// Reflected-to-LoS amplitude ratio `A = Γ(1 + Δ/d)^(−η/2)`.
    pub fn amplitude(&self, d: f64) -> f64 {
        debug_assert!(d > 0.0);
        self.gamma * (1.0 + self.delta / d).powf(-0.5 * self.eta)
    }

    /// Depth of the cosine term in linear power, `κ = 2A / (1 + A²)`.
    pub fn kappa(&self, d: f64) -> f64 {
        let a = self.amplitude(d);
        2.0 * a / (1.0 + a * a)
    }

    /// Amplitude of the `i`-th cosine harmonic of `ζ` in dB, `−2ê·Aⁱ/i`.
    pub fn harmonic(&self, d: f64, i: u32) -> f64 {
        assert!(i >= 1, "harmonic index starts at 1");
        -2.0 * E_HAT * self.amplitude(d).powi(i as i32) / i as f64
    }
}

/// Inverse wavelength `β = f_c / c₀` in cycles per metre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseWavelength {
    beta: f64,
    propagation_speed: f64,
}

impl InverseWavelength {
    pub fn from_frequency(frequency_hz: f64, propagation_speed: f64) -> Result<Self> {
        if !(frequency_hz > 0.0) || !frequency_hz.is_finite() {
            return Err(Error::invalid("frequency", "must be positive"));
        }
        if !(propagation_speed > 0.0) || !propagation_speed.is_finite() {
            return Err(Error::invalid("propagation_speed", "must be positive"));
        }
        Ok(InverseWavelength {
            beta: frequency_hz / propagation_speed,
            propagation_speed,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn propagation_speed(&self) -> f64 {
        self.propagation_speed
    }
}

/// How `ζ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMode {
    /// Logarithmic closed form.
    Closed,
    /// Fourier series truncated to the given number of harmonics.
    Series(usize),
    /// First and second harmonic only.
    TwoTerm,
}

/// Reflection-induced RSS perturbation in dB at inverse wavelength `beta`
/// (cycles per metre) for LoS distance `d`.
pub fn zeta(params: &ReflectionParams, d: f64, beta: f64, mode: ZetaMode) -> f64 {
    let a = params.amplitude(d);
    if a == 0.0 {
        return 0.0;
    }
    let phase = 2.0 * PI * params.delta * beta;
    match mode {
        ZetaMode::Closed => {
            let kappa = 2.0 * a / (1.0 + a * a);
            E_HAT * ((1.0 + a * a).ln() + (1.0 - kappa * phase.cos()).ln())
        }
        ZetaMode::Series(terms) => harmonic_sum(a, phase, terms),
        ZetaMode::TwoTerm => harmonic_sum(a, phase, 2),
    }
}

fn harmonic_sum(a: f64, phase: f64, terms: usize) -> f64 {
    assert!(terms >= 1, "series needs at least one term");
    let mut power = 1.0;
    let mut sum = 0.0;
    for i in 1..=terms {
        power *= a;
        sum += power / i as f64 * (i as f64 * phase).cos();
    }
    -2.0 * E_HAT * sum
}

/// Signal power `P_ζ = 4ê²·Σ (Aⁱ/i)² = 4ê²·Li₂(A²)`, twice the mean of `ζ²` over one period in `β`.
pub fn signal_power(params: &ReflectionParams, d: f64) -> f64 {
    let a = params.amplitude(d);
    4.0 * E_HAT * E_HAT * dilog(a * a).expect("A² lies in [0, 1)")
}

/// Share of `P_ζ` carried by the first two harmonics,
/// `(A² + A⁴/4) / Li₂(A²)`. Tends to 1 as `A → 0`.
pub fn harmonic_power_fraction(params: &ReflectionParams, d: f64) -> f64 {
    let a2 = params.amplitude(d).powi(2);
    if a2 == 0.0 {
        return 1.0;
    }
    (a2 + 0.25 * a2 * a2) / dilog(a2).expect("A² lies in [0, 1)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(gamma: f64, eta: f64, delta: f64) -> ReflectionParams {
        ReflectionParams::new(gamma, eta, delta).unwrap()
    }

    fn link() -> LinkGeometry {
        LinkGeometry::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0)).unwrap()
    }

    #[test]
    fn excess_path_examples() {
        let g = link();
        assert_abs_diff_eq!(
            g.excess_path_length(Point::new(1.5, 1.0)),
            2.0 * 3.25f64.sqrt() - 3.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(g.excess_path_length(Point::new(1.5, 1.0)), 0.605551, epsilon = 1e-6);
        assert_eq!(g.excess_path_length(Point::new(1.5, 0.0)), 0.0);
        assert_eq!(g.excess_path_length(Point::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn coincident_endpoints_rejected() {
        let p = Point::new(1.0, 2.0);
        assert!(LinkGeometry::new(p, p).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ReflectionParams::new(1.0, 3.0, 0.0).is_err());
        assert!(ReflectionParams::new(-0.1, 3.0, 0.0).is_err());
        assert!(ReflectionParams::new(0.5, 0.0, 0.0).is_err());
        assert!(ReflectionParams::new(0.5, 3.0, -1.0).is_err());
        assert!(ReflectionParams::new(0.9, 3.0, 0.0).is_ok());
    }

    #[test]
    fn amplitude_examples() {
        assert_abs_diff_eq!(params(0.7, 3.0, 0.0).amplitude(5.0), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(params(0.7, 3.0, 3.0).amplitude(3.0), 0.247487, epsilon = 1e-6);
        assert_abs_diff_eq!(params(0.35, 3.0, 1.0).amplitude(2.0), 0.190516, epsilon = 1e-6);
    }

    #[test]
    fn kappa_examples() {
        assert_abs_diff_eq!(params(0.7, 3.0, 0.0).kappa(3.0), 1.4 / 1.49, epsilon = 1e-12);
        assert_abs_diff_eq!(params(0.7, 3.0, 0.0).kappa(3.0), 0.939597, epsilon = 1e-6);
        assert_eq!(params(0.0, 3.0, 0.0).kappa(3.0), 0.0);
        assert_abs_diff_eq!(params(0.2, 3.0, 0.0).kappa(3.0), 0.384615, epsilon = 1e-6);
    }

    #[test]
    fn kappa_matches_definition_in_gamma() {
        // κ = 2Γ(1+Δ/d)^{η/2} / (Γ² + (1+Δ/d)^η)
        let p = params(0.45, 2.5, 1.3);
        let r: f64 = 1.0 + 1.3 / 2.7;
        let direct = 2.0 * 0.45 * r.powf(1.25) / (0.45 * 0.45 + r.powf(2.5));
        assert_abs_diff_eq!(p.kappa(2.7), direct, epsilon = 1e-14);
    }

    #[test]
    fn zeta_vanishes_without_reflector() {
        let p = params(0.0, 3.0, 0.8);
        for mode in [ZetaMode::Closed, ZetaMode::Series(60), ZetaMode::TwoTerm] {
            for beta in [7.9, 8.1417, 8.4] {
                assert_eq!(zeta(&p, 3.0, beta, mode), 0.0);
            }
        }
    }

    #[test]
    fn zeta_at_zero_excess_path() {
        let p = params(0.5, 3.0, 0.0);
        let closed = zeta(&p, 3.0, 8.0, ZetaMode::Closed);
        assert_abs_diff_eq!(closed, -6.0206, epsilon = 1e-4);
        assert_abs_diff_eq!(closed, 10.0 * 1.25f64.log10() + 10.0 * 0.2f64.log10(), epsilon = 1e-12);
        assert_abs_diff_eq!(closed, 2.0 * E_HAT * 0.5f64.ln(), epsilon = 1e-12);
        let series = zeta(&p, 3.0, 8.0, ZetaMode::Series(200));
        assert_abs_diff_eq!(series, closed, epsilon = 1e-12);
    }

    #[test]
    fn closed_and_series_agree() {
        let p = params(0.7, 3.0, 0.5);
        let beta = 8.1417;
        let closed = zeta(&p, 3.0, beta, ZetaMode::Closed);
        let series = zeta(&p, 3.0, beta, ZetaMode::Series(DEFAULT_SERIES_TERMS));
        assert!((closed - series).abs() < 1e-6, "{closed} vs {series}");
    }

    #[test]
    fn signal_power_examples() {
        assert_eq!(signal_power(&params(0.0, 3.0, 1.0), 3.0), 0.0);
        let p = params(0.7, 3.0, 0.0);
        assert_abs_diff_eq!(harmonic_power_fraction(&p, 3.0), 0.9676, epsilon = 1e-4);
        assert_abs_diff_eq!(signal_power(&p, 3.0), 42.884, epsilon = 2e-3);
    }

    #[test]
    fn kappa_form_of_fourier_coefficients() {
        // b_i = −2κⁱ / (i(1+√(1−κ²))ⁱ) must equal −2Aⁱ/i.
        let p = params(0.6, 3.0, 0.4);
        let (a, k) = (p.amplitude(3.0), p.kappa(3.0));
        let root = 1.0 + (1.0 - k * k).sqrt();
        for i in 1..8 {
            let from_kappa = -2.0 * k.powi(i) / (i as f64 * root.powi(i));
            let from_a = -2.0 * a.powi(i) / i as f64;
            assert_abs_diff_eq!(from_kappa, from_a, epsilon = 1e-14);
        }
        // b_0 = ln(½ + ½√(1−κ²)) cancels ln(1 + A²).
        let b0 = (0.5 + 0.5 * (1.0 - k * k).sqrt()).ln();
        assert_abs_diff_eq!(b0, -(1.0 + a * a).ln(), epsilon = 1e-14);
    }
}
