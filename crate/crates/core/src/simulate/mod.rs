//! Seeded Monte Carlo harness for the multi-channel measurement model
//! `z_l = ζ(β_l) + ν_l`, `ν_l ~ N(0, σ²)` i.i.d.
//!
//! Trial `t` draws from a ChaCha8 stream keyed by the seed with stream id
//! `t`, so results do not depend on how trials are split across threads.
//! Normal variates come from `rand_distr::StandardNormal`.

mod quadform;
pub mod quadrature;

pub use quadform::{
    quadratic_cf, sample_exceedance, sf_via_cf_inversion, sf_via_cf_inversion_with_tol,
    QuadraticFormSpec, DEFAULT_CF_TOLERANCE,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::energy::ChannelSet;
use crate::error::{Error, Result};
use crate::model::{zeta, LinkGeometry, Point, ReflectionParams, ZetaMode};

/// Trials per work unit; sums are combined per chunk in index order.
const CHUNK: usize = 4096;

/// Noise level, trial count and seed around a fixed per-channel signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSpec {
    signal: Vec<f64>,
    sigma: f64,
    trials: usize,
    seed: u64,
}

impl SimSpec {
    /// Signal from the closed-form `ζ` at each channel of `channels`.
    pub fn reflection(
        params: &ReflectionParams,
        distance: f64,
        channels: &ChannelSet,
        sigma: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(distance > 0.0) {
            return Err(Error::invalid("distance", "must be positive"));
        }
        let signal = channels
            .betas()
            .map(|b| zeta(params, distance, b, ZetaMode::Closed))
            .collect();
        Self::with_means(signal, sigma, trials, seed)
    }

    /// Signal for a reflector at `point`, with `Δ` taken from the link geometry.
    pub fn from_geometry(
        params: &ReflectionParams,
        geom: &LinkGeometry,
        point: Point,
        channels: &ChannelSet,
        sigma: f64,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let params = params.with_delta(geom.excess_path_length(point))?;
        Self::reflection(&params, geom.distance(), channels, sigma, trials, seed)
    }

    /// Explicit per-channel signal in dB.
    pub fn with_means(signal: Vec<f64>, sigma: f64, trials: usize, seed: u64) -> Result<Self> {
        if signal.is_empty() {
            return Err(Error::invalid("signal", "at least one channel required"));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("{sigma} must be positive")));
        }
        if trials == 0 {
            return Err(Error::invalid("trials", "at least one trial required"));
        }
        Ok(SimSpec {
            signal,
            sigma,
            trials,
            seed,
        })
    }

    pub fn channels(&self) -> usize {
        self.signal.len()
    }

    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn signal_energy(&self) -> f64 {
        self.signal.iter().map(|v| v * v).sum()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn key(&self) -> [u8; 32] {
        ChaCha8Rng::seed_from_u64(self.seed).get_seed()
    }

    fn fill_trial(&self, key: [u8; 32], trial: usize, out: &mut [f64]) {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(trial as u64);
        for (o, s) in out.iter_mut().zip(&self.signal) {
            let g: f64 = rng.sample(StandardNormal);
            *o = s + self.sigma * g;
        }
    }

    fn trial_energy(&self, key: [u8; 32], trial: usize, buf: &mut [f64]) -> f64 {
        self.fill_trial(key, trial, buf);
        buf.iter().map(|v| v * v).sum()
    }
}

/// Row-major `trials × channels` matrix of simulated measurements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurements {
    pub trials: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl Measurements {
    pub fn row(&self, trial: usize) -> &[f64] {
        &self.data[trial * self.channels..(trial + 1) * self.channels]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.channels)
    }
}

pub fn simulate_measurements(spec: &SimSpec) -> Measurements {
    let c = spec.channels();
    let key = spec.key();
    let mut data = vec![0.0; spec.trials * c];
    data.par_chunks_mut(c)
        .enumerate()
        .for_each(|(t, row)| spec.fill_trial(key, t, row));
    Measurements {
        trials: spec.trials,
        channels: c,
        data,
    }
}

/// Window energy `Σ_l z_l²` for every trial.
pub fn simulate_energies(spec: &SimSpec) -> Vec<f64> {
    let key = spec.key();
    (0..spec.trials)
        .into_par_iter()
        .map_init(
            || vec![0.0; spec.channels()],
            |buf, t| spec.trial_energy(key, t, buf),
        )
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRates {
    pub trials: usize,
    pub detections: usize,
    pub detection_rate: f64,
    pub mean_energy: f64,
}

/// Fraction of trials whose energy exceeds `threshold`, and mean energy.
pub fn empirical_rates(spec: &SimSpec, threshold: f64) -> EmpiricalRates {
    let key = spec.key();
    let chunks = spec.trials.div_ceil(CHUNK);
    let parts: Vec<(usize, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut buf = vec![0.0; spec.channels()];
            let end = ((c + 1) * CHUNK).min(spec.trials);
            let mut hits = 0;
            let mut sum = 0.0;
            for t in c * CHUNK..end {
                let e = spec.trial_energy(key, t, &mut buf);
                sum += e;
                if e > threshold {
                    hits += 1;
                }
            }
            (hits, sum)
        })
        .collect();
    let detections = parts.iter().map(|p| p.0).sum();
    let total: f64 = parts.iter().map(|p| p.1).sum();
    EmpiricalRates {
        trials: spec.trials,
        detections,
        detection_rate: detections as f64 / spec.trials as f64,
        mean_energy: total / spec.trials as f64,
    }
}

/// Standard deviation of a binomial proportion.
pub fn binomial_std(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value `√(−ln(α/2)/2)/√n` of the KS statistic.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(0.5 * alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{prob_false_alarm, threshold_for_pf};
    use approx::assert_abs_diff_eq;

    fn default_params(gamma: f64, delta: f64) -> ReflectionParams {
        ReflectionParams::new(gamma, 3.0, delta).unwrap()
    }

    #[test]
    fn pure_noise_channel_means() {
        let spec = SimSpec::reflection(&default_params(0.0, 0.4), 3.0, &ChannelSet::default(), 0.5, 20_000, 3)
            .unwrap();
        let m = simulate_measurements(&spec);
        for l in 0..16 {
            let mean = m.rows().map(|r| r[l]).sum::<f64>() / m.trials as f64;
            assert!(mean.abs() < 4.0 * 0.5 / (m.trials as f64).sqrt());
        }
    }

    #[test]
    fn noise_free_limit() {
        let params = default_params(0.5, 0.7);
        let channels = ChannelSet::default();
        let spec = SimSpec::reflection(&params, 3.0, &channels, 1e-9, 10, 1).unwrap();
        let m = simulate_measurements(&spec);
        for row in m.rows() {
            for (z, b) in row.iter().zip(channels.betas()) {
                assert_abs_diff_eq!(*z, zeta(&params, 3.0, b, ZetaMode::Closed), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn sample_variance() {
        let spec = SimSpec::with_means(vec![0.0; 4], 0.5, 100_000, 9).unwrap();
        let m = simulate_measurements(&spec);
        let n = m.trials as f64;
        for l in 0..4 {
            let mean = m.rows().map(|r| r[l]).sum::<f64>() / n;
            let var = m.rows().map(|r| (r[l] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            // sd of the sample variance is σ²√(2/(n−1))
            assert!((var - 0.25).abs() < 3.0 * 0.25 * (2.0 / (n - 1.0)).sqrt());
        }
    }

    #[test]
    fn deterministic_and_consistent() {
        let spec = SimSpec::with_means(vec![0.1, 0.2, 0.3], 1.0, 5000, 42).unwrap();
        let a = simulate_measurements(&spec);
        let b = simulate_measurements(&spec);
        assert_eq!(a, b);
        let energies = simulate_energies(&spec);
        for (row, e) in a.rows().zip(&energies) {
            assert_eq!(row.iter().map(|v| v * v).sum::<f64>(), *e);
        }
        let other = SimSpec::with_means(vec![0.1, 0.2, 0.3], 1.0, 5000, 43).unwrap();
        assert_ne!(simulate_measurements(&other), a);
    }

    #[test]
    fn false_alarm_rate() {
        let x = threshold_for_pf(4, 1.0, 0.05).unwrap();
        let spec = SimSpec::with_means(vec![0.0; 4], 1.0, 200_000, 5).unwrap();
        let r = empirical_rates(&spec, x);
        let pf = prob_false_alarm(4, 1.0, x).unwrap();
        assert!((r.detection_rate - pf).abs() < 3.0 * binomial_std(pf, r.trials));
        assert_abs_diff_eq!(r.mean_energy, 4.0, epsilon = 0.05);
    }

    #[test]
    fn noise_free_occupied_always_detects() {
        let spec = SimSpec::with_means(vec![2.0; 4], 1e-6, 1000, 5).unwrap();
        assert_eq!(empirical_rates(&spec, 15.0).detection_rate, 1.0);
    }

    #[test]
    fn ks_on_uniform() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.0005 + 1e-12);
        assert_abs_diff_eq!(ks_critical_value(1, 0.01), 1.6276, epsilon = 1e-4);
    }

    #[test]
    fn invalid_specs() {
        assert!(SimSpec::with_means(vec![], 1.0, 1, 0).is_err());
        assert!(SimSpec::with_means(vec![0.0], 0.0, 1, 0).is_err());
        assert!(SimSpec::with_means(vec![0.0], 1.0, 0, 0).is_err());
    }
}
