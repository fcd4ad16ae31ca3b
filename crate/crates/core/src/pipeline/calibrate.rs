//! Noise calibration with tail-covering variance inflation.

use std::path::Path;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::inv_reg_upper_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    /// Sample standard deviation of the residuals, dB.
    pub sigma: f64,
    /// Inflated standard deviation used to set the threshold, dB.
    pub sigma_hat: f64,
    pub channels: usize,
    pub target_pf: f64,
    /// Non-overlapping windows the residuals were split into.
    pub windows: usize,
    /// Windows above the threshold at `sigma_hat`.
    pub exceedances: usize,
}

impl CalibrationResult {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let r: CalibrationResult = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !(r.sigma_hat >= r.sigma && r.sigma >= 0.0) {
            return Err(Error::Config("sigma_hat must be >= sigma >= 0".into()));
        }
        Ok(r)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// Smallest `σ̂ ≥ σ` whose threshold lets at most `⌊P_f·W⌋` of the `W`
/// non-overlapping `C`-length residual windows through.
///
/// With `q = 2·Q⁻¹(C/2, P_f)` the threshold is `σ̂²q`, so the answer is
/// `max(σ, √(X*/q))` where `X*` is the `(⌊P_f·W⌋+1)`-th largest window energy.
pub fn calibrate_sigma(residuals: &[f64], channels: usize, target_pf: f64) -> Result<CalibrationResult> {
    if channels == 0 {
        return Err(Error::invalid("channels", "at least one channel required"));
    }
    if !(target_pf > 0.0 && target_pf < 1.0) {
        return Err(Error::invalid("pf", format!("{target_pf} not in (0, 1)")));
    }
    let windows = residuals.len() / channels;
    if windows == 0 || residuals.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} residuals do not fill one {channels}-channel window",
            residuals.len()
        )));
    }
    if residuals.len() < 100 * channels {
        warn!(
            "only {} residuals for {channels} channels; calibration will be coarse",
            residuals.len()
        );
    }
    let n = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / n;
    let sigma = (residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();

    let mut energies: Vec<f64> = residuals
        .chunks_exact(channels)
        .map(|w| w.iter().map(|v| v * v).sum())
        .collect();
    energies.sort_by(|a, b| b.total_cmp(a));
    let allowed = (target_pf * windows as f64).floor() as usize;
    let q = 2.0 * inv_reg_upper_gamma(0.5 * channels as f64, target_pf)?;
    let mut sigma_hat = sigma;
    if let Some(&x_star) = energies.get(allowed) {
        sigma_hat = sigma.max((x_star / q).sqrt());
        // Rounding may leave X* a hair above σ̂²q.
        while sigma_hat * sigma_hat * q < x_star {
            sigma_hat *= 1.0 + f64::EPSILON;
        }
    }
    let threshold = sigma_hat * sigma_hat * q;
    let exceedances = energies.iter().take_while(|&&e| e > threshold).count();
    Ok(CalibrationResult {
        sigma,
        sigma_hat,
        channels,
        target_pf,
        windows,
        exceedances,
    })
}
