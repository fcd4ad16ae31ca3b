//! Neyman–Pearson energy detector over `C` baseline-subtracted channels.
//!
//! Under the vacant hypothesis the energy `Σ z_l²` is `σ²·χ²_C`; with a
//! reflector present it is non-central with `μ` equal to the signal
//! energy. The threshold is fixed by the false-alarm target.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{inv_reg_upper_gamma, noncentral_chi2_sf, reg_upper_gamma, Chi2Spec};

/// False-alarm probability used throughout the reference evaluation.
pub const DEFAULT_TARGET_PF: f64 = 6e-6;

fn check_channels(channels: usize) -> Result<()> {
    if channels == 0 {
        return Err(Error::invalid("channels", "at least one channel required"));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma", format!("{sigma} must be positive")));
    }
    Ok(())
}

fn check_pf(pf: f64) -> Result<()> {
    if !(pf > 0.0 && pf < 1.0) {
        return Err(Error::invalid("pf", format!("{pf} not in (0, 1)")));
    }
    Ok(())
}

/// Channel count, noise level and false-alarm target with the derived
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    channels: usize,
    sigma: f64,
    target_pf: f64,
    threshold: f64,
}

impl DetectorConfig {
    pub fn new(channels: usize, sigma: f64, target_pf: f64) -> Result<Self> {
        let threshold = threshold_for_pf(channels, sigma, target_pf)?;
        Ok(DetectorConfig {
            channels,
            sigma,
            target_pf,
            threshold,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn target_pf(&self) -> f64 {
        self.target_pf
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Detection probability for a signal of energy `signal_energy`.
    pub fn prob_detection(&self, signal_energy: f64) -> Result<f64> {
        prob_detection(self.channels, self.sigma, signal_energy, self.threshold)
    }

    pub fn decide(&self, z: &[f64]) -> Result<Decision> {
        if z.len() != self.channels {
            return Err(Error::LengthMismatch {
                expected: self.channels,
                actual: z.len(),
            });
        }
        Ok(decide(z, self.threshold))
    }
}

/// Outcome of one energy test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decision {
    pub energy: f64,
    pub threshold: f64,
    pub occupied: bool,
}

/// `X = 2σ²·Q⁻¹(C/2, P_f)`.
pub fn threshold_for_pf(channels: usize, sigma: f64, pf: f64) -> Result<f64> {
    check_channels(channels)?;
    check_sigma(sigma)?;
    check_pf(pf)?;
    Ok(2.0 * sigma * sigma * inv_reg_upper_gamma(0.5 * channels as f64, pf)?)
}

/// `P_f = Q(C/2, X/2σ²)`.
pub fn prob_false_alarm(channels: usize, sigma: f64, threshold: f64) -> Result<f64> {
    check_channels(channels)?;
    check_sigma(sigma)?;
    if !(threshold >= 0.0) {
        return Err(Error::invalid("threshold", "must be >= 0"));
    }
    reg_upper_gamma(0.5 * channels as f64, threshold / (2.0 * sigma * sigma))
}

/// `P_d = P{E > X}` for a non-central chi-square energy with `μ = signal_energy`.
/// Equivalent to the Marcum function `Q_{C/2}(√(E/σ²), √(X/σ²))` but valid
/// for odd `C` as well.
pub fn prob_detection(channels: usize, sigma: f64, signal_energy: f64, threshold: f64) -> Result<f64> {
    check_channels(channels)?;
    check_sigma(sigma)?;
    if !(threshold >= 0.0) {
        return Err(Error::invalid("threshold", "must be >= 0"));
    }
    let spec = Chi2Spec::new(channels as u32, sigma * sigma, signal_energy)?;
    Ok(noncentral_chi2_sf(&spec, threshold))
}

/// Detection probability at false-alarm rate `pf`.
pub fn roc_point(channels: usize, sigma: f64, signal_energy: f64, pf: f64) -> Result<f64> {
    let threshold = threshold_for_pf(channels, sigma, pf)?;
    prob_detection(channels, sigma, signal_energy, threshold)
}

/// Energy test on a measurement vector. Ties go to vacant.
pub fn decide(z: &[f64], threshold: f64) -> Decision {
    let energy = z.iter().map(|v| v * v).sum();
    Decision {
        energy,
        threshold,
        occupied: energy > threshold,
    }
}
