//! Reflected-signal energy across a set of carrier channels.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{zeta, ReflectionParams, ZetaMode, DEFAULT_PROPAGATION_SPEED, E_HAT};

/// First IEEE 802.15.4 channel in the 2.4 GHz band, Hz.
pub const IEEE_802_15_4_START_HZ: f64 = 2.405e9;
/// IEEE 802.15.4 channel spacing, Hz.
pub const IEEE_802_15_4_SPACING_HZ: f64 = 5.0e6;
/// Number of IEEE 802.15.4 channels in the 2.4 GHz band.
pub const IEEE_802_15_4_CHANNELS: usize = 16;

/// Below this `|sin θ|` the Dirichlet ratio takes its limit value.
const SINGULAR_SIN: f64 = 1e-12;

/// Ordered carrier frequencies and the propagation speed that maps them to
/// inverse wavelengths `β_l = f_l / c₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    frequencies: Vec<f64>,
    propagation_speed: f64,
}

impl Default for ChannelSet {
    fn default() -> Self {
        ChannelSet::uniform(
            IEEE_802_15_4_START_HZ,
            IEEE_802_15_4_SPACING_HZ,
            IEEE_802_15_4_CHANNELS,
            DEFAULT_PROPAGATION_SPEED,
        )
        .expect("default channel plan is valid")
    }
}

impl ChannelSet {
    /// `count` channels starting at `start_hz`, `spacing_hz` apart.
    pub fn uniform(start_hz: f64, spacing_hz: f64, count: usize, propagation_speed: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("count", "at least one channel required"));
        }
        if count > 1 && !(spacing_hz > 0.0) {
            return Err(Error::invalid("spacing", "must be positive"));
        }
        let freqs = (0..count).map(|l| start_hz + l as f64 * spacing_hz).collect();
        Self::from_frequencies(freqs, propagation_speed)
    }

    /// Arbitrary strictly increasing carrier frequencies.
    pub fn from_frequencies(frequencies: Vec<f64>, propagation_speed: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::invalid("frequencies", "at least one channel required"));
        }
        if frequencies.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
            return Err(Error::invalid("frequencies", "must be positive and finite"));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequencies", "must be strictly increasing"));
        }
        if !(propagation_speed > 0.0) || !propagation_speed.is_finite() {
            return Err(Error::invalid("propagation_speed", "must be positive"));
        }
        Ok(ChannelSet {
            frequencies,
            propagation_speed,
        })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn propagation_speed(&self) -> f64 {
        self.propagation_speed
    }

    pub fn betas(&self) -> impl Iterator<Item = f64> + '_ {
        self.frequencies.iter().map(move |f| f / self.propagation_speed)
    }

    /// Average inverse wavelength `β̄`.
    pub fn mean_beta(&self) -> f64 {
        self.betas().sum::<f64>() / self.len() as f64
    }

    /// Inverse-wavelength spacing `ξ` when the channels are equally spaced.
    /// A single channel reports `Some(0.0)`.
    pub fn beta_spacing(&self) -> Option<f64> {
        if self.len() == 1 {
            return Some(0.0);
        }
        let f = &self.frequencies;
        let step = f[1] - f[0];
        let uniform = f
            .windows(2)
            .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1.0));
        uniform.then(|| step / self.propagation_speed)
    }

    /// Channels at the given 0-based indices, in increasing order.
    pub fn subset(&self, indices: &[usize]) -> Result<ChannelSet> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.len()) {
            return Err(Error::invalid(
                "channel_index",
                format!("{bad} out of range for {} channels", self.len()),
            ));
        }
        Self::from_frequencies(
            idx.iter().map(|&i| self.frequencies[i]).collect(),
            self.propagation_speed,
        )
    }
}

/// `count` indices out of `0..total` that keep the mean channel fixed while
/// spreading as far apart as possible: rounded points of an even grid
/// from the first to the last channel. For 16 channels this gives
/// `{0, 15}` for two and `{0, 5, 10, 15}` for four.
pub fn spread_indices(total: usize, count: usize) -> Result<Vec<usize>> {
    if count == 0 || count > total {
        return Err(Error::invalid(
            "count",
            format!("{count} channels requested out of {total}"),
        ));
    }
    if count == 1 {
        return Ok(vec![(total - 1) / 2]);
    }
    let span = (total - 1) as f64;
    let step = span / (count - 1) as f64;
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            let pos = k as f64 * step;
            // Round half away from the centre so the set stays symmetric.
            if pos <= 0.5 * span {
                (pos - 1e-9).round() as usize
            } else {
                (pos + 1e-9).round() as usize
            }
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Energy evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    /// `Σ_l ζ(β_l)²` with the closed-form `ζ`.
    Exact,
    /// Dirichlet-kernel closed form of the two-harmonic energy.
    ClosedTwoTerm,
    /// `4ê²·C·(a₁² + a₂²)/2`, the mean level of the two-harmonic energy.
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyValue {
    pub value: f64,
    pub mode: EnergyMode,
}

/// `sin(Cθ)/sin(θ)`; at `θ = nπ` the removable singularity takes its limit
/// `C·(−1)^{n(C−1)}`.
fn dirichlet_ratio(theta: f64, count: usize) -> f64 {
    let s = theta.sin();
    if s.abs() < SINGULAR_SIN {
        let n = (theta / PI).round() as i64;
        let sign = if (n * (count as i64 - 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return sign * count as f64;
    }
    (count as f64 * theta).sin() / s
}

/// `Σ_l ζ(β_l)²` for any `ζ` evaluation mode.
pub fn channel_energy(params: &ReflectionParams, d: f64, channels: &ChannelSet, mode: ZetaMode) -> f64 {
    channels.betas().map(|b| zeta(params, d, b, mode).powi(2)).sum()
}

/// Reflected-signal energy over `channels`.
///
/// [`EnergyMode::ClosedTwoTerm`] needs equally spaced channels and returns
/// an error otherwise.
pub fn energy(params: &ReflectionParams, d: f64, channels: &ChannelSet, mode: EnergyMode) -> Result<EnergyValue> {
    let value = match mode {
        EnergyMode::Exact => channel_energy(params, d, channels, ZetaMode::Closed),
        EnergyMode::Average => average_energy(params, d, channels.len()),
        EnergyMode::ClosedTwoTerm => {
            let xi = channels.beta_spacing().ok_or_else(|| {
                Error::invalid("channels", "two-term closed form needs uniform spacing")
            })?;
            let a1 = params.amplitude(d);
            let a2 = 0.5 * a1 * a1;
            let delta = params.delta();
            let mean_beta = channels.mean_beta();
            let count = channels.len();
            let term = |k: f64| {
                (2.0 * PI * k * delta * mean_beta).cos() * dirichlet_ratio(PI * k * delta * xi, count)
            };
            let sum = count as f64 * (a1 * a1 + a2 * a2) / 2.0
                + a1 * a2 * term(1.0)
                + 0.5 * a1 * a1 * term(2.0)
                + a1 * a2 * term(3.0)
                + 0.5 * a2 * a2 * term(4.0);
            // Rounding can push a true zero slightly negative.
            (4.0 * E_HAT * E_HAT * sum).max(0.0)
        }
    };
    Ok(EnergyValue { value, mode })
}

/// Mean two-harmonic energy `4ê²·C·(a₁² + a₂²)/2` for `C` channels.
pub fn average_energy(params: &ReflectionParams, d: f64, count: usize) -> f64 {
    let a1 = params.amplitude(d);
    let a2 = 0.5 * a1 * a1;
    4.0 * E_HAT * E_HAT * count as f64 * (a1 * a1 + a2 * a2) / 2.0
}

/// Per-channel signal-to-noise ratio `E / (C σ²)`.
pub fn snr(energy: f64, count: usize, sigma: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::invalid("count", "at least one channel required"));
    }
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    Ok(energy / (count as f64 * sigma * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params(gamma: f64, delta: f64) -> ReflectionParams {
        ReflectionParams::new(gamma, 3.0, delta).unwrap()
    }

    #[test]
    fn default_plan() {
        let ch = ChannelSet::default();
        assert_eq!(ch.len(), 16);
        assert_relative_eq!(ch.mean_beta(), 2.4425e9 / 3e8, max_relative = 1e-14);
        let xi = ch.beta_spacing().unwrap();
        assert_relative_eq!(xi, 5e6 / 3e8, max_relative = 1e-9);
        assert_relative_eq!(1.0 / (2.0 * 16.0 * xi), 1.875, max_relative = 1e-9);
    }

    #[test]
    fn frequencies_must_increase() {
        assert!(ChannelSet::from_frequencies(vec![2.41e9, 2.405e9], 3e8).is_err());
        assert!(ChannelSet::from_frequencies(vec![2.41e9, 2.41e9], 3e8).is_err());
        assert!(ChannelSet::uniform(2.4e9, 5e6, 0, 3e8).is_err());
    }

    #[test]
    fn spread_subsets() {
        assert_eq!(spread_indices(16, 2).unwrap(), vec![0, 15]);
        assert_eq!(spread_indices(16, 4).unwrap(), vec![0, 5, 10, 15]);
        assert_eq!(spread_indices(16, 16).unwrap(), (0..16).collect::<Vec<_>>());
        let eight = spread_indices(16, 8).unwrap();
        assert_eq!(eight.len(), 8);
        let mean = eight.iter().sum::<usize>() as f64 / 8.0;
        assert_abs_diff_eq!(mean, 7.5, epsilon = 1e-12);
        assert!(spread_indices(16, 17).is_err());
    }

    #[test]
    fn subset_keeps_order() {
        let ch = ChannelSet::default();
        let sub = ch.subset(&[15, 0]).unwrap();
        assert_eq!(sub.frequencies(), &[2.405e9, 2.48e9]);
        assert!(ch.subset(&[16]).is_err());
    }

    #[test]
    fn zero_reflection_zero_energy() {
        let ch = ChannelSet::default();
        for mode in [EnergyMode::Exact, EnergyMode::ClosedTwoTerm, EnergyMode::Average] {
            assert_eq!(energy(&params(0.0, 0.7), 3.0, &ch, mode).unwrap().value, 0.0);
        }
    }

    #[test]
    fn closed_form_matches_channel_sum_odd_count() {
        let ch = ChannelSet::uniform(2.405e9, 5e6, 15, 3e8).unwrap();
        let p = params(0.7, 0.8);
        let closed = energy(&p, 3.0, &ch, EnergyMode::ClosedTwoTerm).unwrap().value;
        let brute = channel_energy(&p, 3.0, &ch, ZetaMode::TwoTerm);
        assert_relative_eq!(closed, brute, max_relative = 1e-10);
    }

    #[test]
    fn closed_form_is_exact_for_even_count_too() {
        // The symmetric Dirichlet sum over half-integer offsets is exact.
        let ch = ChannelSet::default();
        for delta in [0.05, 0.3, 0.8, 1.9, 3.7] {
            let p = params(0.7, delta);
            let closed = energy(&p, 3.0, &ch, EnergyMode::ClosedTwoTerm).unwrap().value;
            let brute = channel_energy(&p, 3.0, &ch, ZetaMode::TwoTerm);
            assert_relative_eq!(closed, brute, max_relative = 1e-10);
        }
    }

    #[test]
    fn singular_points_use_limit() {
        // Δξ = 1 puts every Dirichlet ratio on a removable singularity.
        for count in [15usize, 16] {
            let ch = ChannelSet::uniform(2.405e9, 5e6, count, 3e8).unwrap();
            let delta = 1.0 / ch.beta_spacing().unwrap();
            let p = params(0.5, delta);
            let closed = energy(&p, 3.0, &ch, EnergyMode::ClosedTwoTerm).unwrap().value;
            let brute = channel_energy(&p, 3.0, &ch, ZetaMode::TwoTerm);
            assert_relative_eq!(closed, brute, max_relative = 1e-8);
        }
        for count in [15usize, 16] {
            let ch = ChannelSet::uniform(2.405e9, 5e6, count, 3e8).unwrap();
            let delta = 0.5 / ch.beta_spacing().unwrap();
            let p = params(0.5, delta);
            let closed = energy(&p, 3.0, &ch, EnergyMode::ClosedTwoTerm).unwrap().value;
            let brute = channel_energy(&p, 3.0, &ch, ZetaMode::TwoTerm);
            assert_relative_eq!(closed, brute, max_relative = 1e-8);
        }
    }

    #[test]
    fn closed_two_term_rejects_uneven_channels() {
        let ch = ChannelSet::default().subset(&[0, 1, 5]).unwrap();
        assert!(energy(&params(0.5, 1.0), 3.0, &ch, EnergyMode::ClosedTwoTerm).is_err());
        assert!(energy(&params(0.5, 1.0), 3.0, &ch, EnergyMode::Exact).is_ok());
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr(0.0, 16, 1.0).unwrap(), 0.0);
        assert_eq!(snr(16.0, 16, 1.0).unwrap(), 1.0);
        let p = params(0.7, 0.5);
        let e = average_energy(&p, 3.0, 16);
        // Independent evaluation: A = 0.7·(7/6)^{-3/2}
        let a: f64 = 0.7 * (3.5f64 / 3.0).powf(-1.5);
        let ehat = 10.0 / std::f64::consts::LN_10;
        let manual = 4.0 * ehat * ehat * 16.0 * (a * a + a.powi(4) / 4.0) / 2.0;
        assert_relative_eq!(snr(e, 16, 0.5).unwrap(), manual / (16.0 * 0.25), max_relative = 1e-12);
        assert!(snr(1.0, 0, 1.0).is_err());
        assert!(snr(1.0, 4, 0.0).is_err());
    }

    #[test]
    fn average_grows_with_distance_and_count() {
        let p = params(0.35, 1.0);
        assert!(average_energy(&p, 3.0, 16) > average_energy(&p, 2.0, 16));
        assert!(average_energy(&p, 3.0, 8) > average_energy(&p, 3.0, 2));
    }
}
